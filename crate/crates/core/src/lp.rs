//! Dense primal simplex for `max cᵀz s.t. Az ≤ b, z ≥ 0` with `b ≥ 0`, so the
//! slack basis is feasible from the start. Bland's rule prevents cycling.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpResult {
    Optimal { z: Vec<f64>, value: f64 },
    Unbounded,
}

pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpResult {
    let nv = c.len();
    let m = a.len();
    debug_assert!(b.iter().all(|v| *v >= 0.0));
    let width = nv + m + 1;
    let mut tab: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = vec![0.0; width];
            r[..nv].copy_from_slice(row);
            r[nv + i] = 1.0;
            r[width - 1] = *bi;
            r
        })
        .collect();
    // reduced costs: objective row holds -c
    let mut obj = vec![0.0; width];
    obj.iter_mut().zip(c).for_each(|(o, ci)| *o = -ci);
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    let eps = 1e-12;

    for _ in 0..50_000 {
        let Some(enter) = (0..width - 1).find(|&j| obj[j] < -eps) else {
            let mut z = vec![0.0; nv];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < nv {
                    z[bv] = tab[i][width - 1];
                }
            }
            return LpResult::Optimal {
                value: obj[width - 1],
                z,
            };
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = tab[i][enter];
            if aij > eps {
                let ratio = tab[i][width - 1] / aij;
                let better = match leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return LpResult::Unbounded;
        };
        let p = tab[row][enter];
        tab[row].iter_mut().for_each(|v| *v /= p);
        let pivot_row = tab[row].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i != row {
                let f = r[enter];
                if f != 0.0 {
                    r.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        let f = obj[enter];
        obj.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
        basis[row] = enter;
    }
    LpResult::Unbounded
}
