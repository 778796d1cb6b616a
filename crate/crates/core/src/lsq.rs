//! Small dense nonlinear least squares (Levenberg–Marquardt) and the linear
//! solve it needs.

/// Gaussian elimination with partial pivoting. `None` when singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LmOptions {
    pub max_iter: usize,
    /// Stop when `½‖r‖²` falls below this.
    pub cost_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            cost_tol: 1e-30,
        }
    }
}

pub(crate) type Projection<'a> = &'a dyn Fn(&mut [f64]);

/// Minimizes `½‖r(x)‖²`. `model` returns the residual vector and the
/// Jacobian rows. `project`, when given, is applied after every trial step.
pub(crate) fn levenberg_marquardt<F>(
    x0: &[f64],
    model: F,
    project: Option<Projection>,
    opts: LmOptions,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> (Vec<f64>, Vec<Vec<f64>>),
{
    let mut x = x0.to_vec();
    if let Some(p) = project {
        p(&mut x);
    }
    let n = x.len();
    let (mut r, mut jac) = model(&x);
    let mut cost = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let mut mu = 1e-3;
    for _ in 0..opts.max_iter {
        if cost <= opts.cost_tol {
            break;
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (row, ri) in jac.iter().zip(&r) {
            for a in 0..n {
                jtr[a] += row[a] * ri;
                for b in a..n {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }
        let diag_scale = (0..n).map(|a| jtj[a][a]).fold(0.0, f64::max).max(1e-300);
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += mu * diag_scale;
            }
            let Some(step) = solve_linear(m, jtr.iter().map(|v| -v).collect()) else {
                mu *= 10.0;
                continue;
            };
            let mut cand: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            if let Some(p) = project {
                p(&mut cand);
            }
            let (rc, jc) = model(&cand);
            let cc = 0.5 * rc.iter().map(|v| v * v).sum::<f64>();
            if cc.is_finite() && cc < cost {
                let rel = (cost - cc) / cost.max(1e-300);
                x = cand;
                r = rc;
                jac = jc;
                cost = cc;
                mu = (mu * 0.3).max(1e-15);
                improved = rel > 1e-15;
                break;
            }
            mu *= 10.0;
            if mu > 1e20 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    (x, cost)
}
