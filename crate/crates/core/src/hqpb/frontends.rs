//! Inhomogeneous problems reduced to the homogeneous two-constraint form.

use serde::Serialize;

use super::{solve, DualSolution, HqpbInstance, Recovery};
use crate::basis::MatrixSet;
use crate::error::{Error, Result};
use crate::linalg::{dot, quad_form_unchecked, SymMatrix};
use crate::pdcomb::find_pd_combination;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrontendSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Primal objective minus dual value of the homogeneous problem.
    pub gap: f64,
    pub dual: DualSolution,
    /// Recovered point of the homogeneous problem.
    pub lifted: Vec<f64>,
}

/// `[[A, a], [aᵀ, corner]]`.
fn bordered(a: &SymMatrix, v: &[f64], corner: f64) -> SymMatrix {
    let n = a.order();
    SymMatrix::from_fn(n + 1, |i, j| match (i < n, j < n) {
        (true, true) => a.get(i, j),
        (true, false) => v[i],
        (false, true) => v[j],
        (false, false) => corner,
    })
}

fn unit_corner(n: usize) -> SymMatrix {
    SymMatrix::from_fn(n + 1, |i, j| if i == n && j == n { 1.0 } else { 0.0 })
}

fn recovered(result: (DualSolution, Recovery)) -> Result<(DualSolution, Vec<f64>, f64)> {
    match result.1 {
        Recovery::Recovered(p) => Ok((result.0, p.x, p.gap)),
        Recovery::Failed(f) => Err(Error::RecoveryFailed(Box::new(f))),
    }
}

/// Minimizes `xᵀA₀x + 2a₀ᵀx` subject to `m ≤ xᵀA₁x + 2a₁ᵀx ≤ M` through the
/// homogenization `(x, t)` with `t² = 1`.
#[allow(clippy::too_many_arguments)]
pub fn gtrs_solve(
    a0: &SymMatrix,
    lin0: &[f64],
    a1: &SymMatrix,
    lin1: &[f64],
    lower: f64,
    upper: f64,
    tol: &Tolerances,
    seed: u64,
) -> Result<FrontendSolution> {
    let n = a0.order();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 variables, got {n}")));
    }
    if a1.order() != n {
        return Err(Error::dims("constraint matrix order", n, a1.order()));
    }
    for v in [lin0, lin1] {
        if v.len() != n {
            return Err(Error::dims("linear term", n, v.len()));
        }
    }
    let pair = MatrixSet::new(vec![a0.clone(), a1.clone()])?;
    if !find_pd_combination(&pair, None, tol, crate::pdcomb::DEFAULT_MAX_ITER, seed)?.is_found() {
        return Err(Error::Hypothesis(
            "no positive definite combination of the objective and constraint matrices".into(),
        ));
    }
    let instance = HqpbInstance {
        objective: bordered(a0, lin0, 0.0),
        first: bordered(a1, lin1, 0.0),
        first_bounds: [lower, upper],
        second: unit_corner(n),
        second_bounds: [1.0, 1.0],
        slater_point: None,
    };
    let (dual, lifted, gap) = recovered(solve(&instance, tol, seed)?)?;
    let t = lifted[n];
    if t.abs() < tol.tol_feas {
        return Err(Error::DegenerateRecovery { z: t });
    }
    let x: Vec<f64> = lifted[..n].iter().map(|v| v / t).collect();
    let value = quad_form_unchecked(a0, &x) + 2.0 * dot(lin0, &x);
    Ok(FrontendSolution {
        x,
        value,
        gap,
        dual,
        lifted,
    })
}

/// Minimizes `‖Ax − b‖² / (‖x‖² + 1)` over `m ≤ ‖x‖² ≤ M` via the substitution
/// `y = x/√(‖x‖²+1)`, `z = 1/√(‖x‖²+1)`. `a` is given by rows.
pub fn trtls_solve(
    a: &[Vec<f64>],
    b: &[f64],
    lower: f64,
    upper: f64,
    tol: &Tolerances,
    seed: u64,
) -> Result<FrontendSolution> {
    let rows = a.len();
    if b.len() != rows {
        return Err(Error::dims("right-hand side", rows, b.len()));
    }
    let n = a.first().map(Vec::len).unwrap_or(0);
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 columns, got {n}")));
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("ragged coefficient matrix".into()));
    }
    if !(0.0 <= lower && lower < upper && upper.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bounds need 0 ≤ m < M, got [{lower}, {upper}]"
        )));
    }
    let ata = SymMatrix::from_fn(n, |i, j| (0..rows).map(|k| a[k][i] * a[k][j]).sum());
    let atb: Vec<f64> = (0..n).map(|i| -(0..rows).map(|k| a[k][i] * b[k]).sum::<f64>()).collect();
    let instance = HqpbInstance {
        objective: bordered(&ata, &atb, dot(b, b)),
        first: unit_corner(n),
        first_bounds: [1.0 / (upper + 1.0), 1.0 / (lower + 1.0)],
        second: SymMatrix::identity(n + 1),
        second_bounds: [1.0, 1.0],
        slater_point: None,
    };
    let (dual, lifted, gap) = recovered(solve(&instance, tol, seed)?)?;
    let z = lifted[n];
    if z.abs() < tol.tol_feas {
        return Err(Error::DegenerateRecovery { z });
    }
    let x: Vec<f64> = lifted[..n].iter().map(|v| v / z).collect();
    Ok(FrontendSolution {
        value: trtls_objective(a, b, &x),
        x,
        gap,
        dual,
        lifted,
    })
}

/// `‖Ax − b‖² / (‖x‖² + 1)`.
pub fn trtls_objective(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    let res: f64 = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let r = dot(row, x) - bi;
            r * r
        })
        .sum();
    res / (dot(x, x) + 1.0)
}
