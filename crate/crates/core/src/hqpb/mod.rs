//! Homogeneous quadratic programs with two two-sided constraints,
//!
//! ```text
//! minimize xᵀA₀x  subject to  m₁ ≤ xᵀA₁x ≤ M₁,  m₂ ≤ xᵀA₂x ≤ M₂,
//! ```
//!
//! solved through the Lagrangian dual in the reduced variables
//! `γ_i = μ_i − λ_i`, followed by recovery of a primal point on the null
//! space of `A₀ + γ₁A₁ + γ₂A₂`. Inhomogeneous trust-region front-ends live in
//! [`frontends`].

mod frontends;
mod kelley;
mod recover;

use serde::{Deserialize, Serialize};

pub use frontends::{gtrs_solve, trtls_objective, trtls_solve, FrontendSolution};
pub use recover::primal_recover;

use crate::basis::{rank_and_basis, MatrixSet};
use crate::error::{Error, Result};
use crate::linalg::{quad_form_unchecked, SymMatrix};
use crate::slemma::find_strict;
use crate::rng::SeedStream;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HqpbInstance {
    pub objective: SymMatrix,
    pub first: SymMatrix,
    /// `[m₁, M₁]` with `m₁ < M₁`.
    pub first_bounds: [f64; 2],
    pub second: SymMatrix,
    /// `[m₂, M₂]` with `m₂ ≤ M₂`; equal bounds make the constraint an equality.
    pub second_bounds: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_point: Option<Vec<f64>>,
}

impl HqpbInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.objective.order();
        if n < 3 {
            return Err(Error::InvalidInput(format!("order must be at least 3, got {n}")));
        }
        for m in [&self.first, &self.second] {
            if m.order() != n {
                return Err(Error::dims("constraint matrix order", n, m.order()));
            }
        }
        let [m1, big1] = self.first_bounds;
        let [m2, big2] = self.second_bounds;
        if [m1, big1, m2, big2].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("constraint bounds"));
        }
        if m1 >= big1 {
            return Err(Error::InvalidInput(format!(
                "first bounds need m₁ < M₁, got [{m1}, {big1}]"
            )));
        }
        if m2 > big2 {
            return Err(Error::InvalidInput(format!(
                "second bounds need m₂ ≤ M₂, got [{m2}, {big2}]"
            )));
        }
        if let Some(p) = &self.slater_point {
            if p.len() != n {
                return Err(Error::dims("Slater point", n, p.len()));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.objective.order()
    }

    pub fn second_is_equality(&self) -> bool {
        self.second_bounds[0] == self.second_bounds[1]
    }

    pub(crate) fn matrices(&self) -> [&SymMatrix; 3] {
        [&self.objective, &self.first, &self.second]
    }

    /// `1 + max ‖A_i‖_F`.
    pub fn scale(&self) -> f64 {
        Tolerances::scale(self.matrices())
    }

    fn bounds(&self, i: usize) -> [f64; 2] {
        if i == 0 {
            self.first_bounds
        } else {
            self.second_bounds
        }
    }

    /// `A₀ + γ₁A₁ + γ₂A₂`.
    pub fn pencil(&self, gamma: [f64; 2]) -> SymMatrix {
        self.objective
            .add(&self.first.scaled(gamma[0]))
            .and_then(|m| m.add(&self.second.scaled(gamma[1])))
            .expect("orders validated")
    }

    /// Concave piecewise-linear dual objective in the reduced variables.
    pub fn dual_objective(&self, gamma: [f64; 2]) -> f64 {
        (0..2)
            .map(|i| {
                let [lo, hi] = self.bounds(i);
                let g = gamma[i];
                if g >= 0.0 {
                    -g * hi
                } else {
                    -g * lo
                }
            })
            .sum()
    }

    pub fn constraint_values(&self, x: &[f64]) -> [f64; 2] {
        [quad_form_unchecked(&self.first, x), quad_form_unchecked(&self.second, x)]
    }

    /// Largest bound violation at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let v = self.constraint_values(x);
        (0..2)
            .map(|i| {
                let [lo, hi] = self.bounds(i);
                (lo - v[i]).max(v[i] - hi).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// `1 + max |bound|`.
    pub fn bound_scale(&self) -> f64 {
        1.0 + self
            .first_bounds
            .iter()
            .chain(&self.second_bounds)
            .fold(0.0f64, |a, b| a.max(b.abs()))
    }

    pub fn is_feasible(&self, x: &[f64], tol: &Tolerances) -> bool {
        self.violation(x) <= tol.tol_feas * self.bound_scale()
    }

    /// Rank of `{A₀, A₁, A₂}` below 3, or a positive definite combination.
    pub fn hypothesis_holds(&self, tol: &Tolerances, seed: u64) -> bool {
        let mats: Vec<SymMatrix> = self.matrices().into_iter().cloned().collect();
        let set = MatrixSet::new(mats.clone()).expect("validated instance");
        if rank_and_basis(&set, tol).rank < 3 {
            return true;
        }
        crate::pdcomb::search(&mats, tol, crate::pdcomb::DEFAULT_MAX_ITER, seed, true)
            .map(|r| r.is_found())
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualSolution {
    pub gamma: [f64; 2],
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
    pub dual_value: f64,
    /// Best upper bound from the cutting-plane master.
    pub upper_bound: f64,
    pub min_eig: f64,
    pub cuts: usize,
    pub box_radius: f64,
    pub hypothesis: bool,
}

impl DualSolution {
    fn from_gamma(
        instance: &HqpbInstance,
        gamma: [f64; 2],
        min_eig: f64,
        upper_bound: f64,
        cuts: usize,
        box_radius: f64,
        hypothesis: bool,
    ) -> Self {
        let lambda = [(-gamma[0]).max(0.0), (-gamma[1]).max(0.0)];
        let mu = [gamma[0].max(0.0), gamma[1].max(0.0)];
        let [m1, big1] = instance.first_bounds;
        let [m2, big2] = instance.second_bounds;
        DualSolution {
            gamma,
            lambda,
            mu,
            dual_value: lambda[0] * m1 - mu[0] * big1 + lambda[1] * m2 - mu[1] * big2,
            upper_bound,
            min_eig,
            cuts,
            box_radius,
            hypothesis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimalRecovery {
    pub x: Vec<f64>,
    pub constraint_values: [f64; 2],
    pub objective: f64,
    /// `objective − dualValue`.
    pub gap: f64,
    pub null_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecoveryFailure {
    pub best_x: Vec<f64>,
    pub violation: f64,
    pub gap: f64,
    pub null_dim: usize,
}

impl std::fmt::Display for RecoveryFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "best point has violation {:e} and gap {:e} (null space dimension {})",
            self.violation, self.gap, self.null_dim
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Recovery {
    Recovered(PrimalRecovery),
    Failed(RecoveryFailure),
}

/// Strictly feasible point(s): one point for two-sided inequalities, or a
/// pair straddling the equality when `m₂ = M₂`.
pub fn slater_points(instance: &HqpbInstance, tol: &Tolerances, seed: u64) -> Option<Vec<Vec<f64>>> {
    let n = instance.order();
    let root = SeedStream::new(seed).split("hqpb-slater");
    let neg1 = instance.first.scaled(-1.0);
    let neg2 = instance.second.scaled(-1.0);
    let [m1, big1] = instance.first_bounds;
    let [m2, big2] = instance.second_bounds;
    let supplied = instance.slater_point.as_deref();
    let eps = tol.tol_feas;
    if instance.second_is_equality() {
        let below = [(&instance.first, big1), (&neg1, -m1), (&instance.second, m2)];
        let above = [(&instance.first, big1), (&neg1, -m1), (&neg2, -m2)];
        let p = find_strict(&below, n, supplied, eps, root.split("below"))?;
        let q = find_strict(&above, n, supplied, eps, root.split("above"))?;
        Some(vec![p, q])
    } else {
        let rows = [(&instance.first, big1), (&neg1, -m1), (&instance.second, big2), (&neg2, -m2)];
        Some(vec![find_strict(&rows, n, supplied, eps, root)?])
    }
}

/// Dual problem in the reduced variables. Unboundedness and an empty dual
/// feasible set are reported before the Slater requirement is checked,
/// since both already decide the instance.
pub fn dual_solve(instance: &HqpbInstance, tol: &Tolerances, seed: u64) -> Result<DualSolution> {
    instance.validate()?;
    tol.validate()?;
    let hypothesis = instance.hypothesis_holds(tol, seed);
    let dual = kelley::solve(instance, tol, seed, hypothesis)?;
    if slater_points(instance, tol, seed).is_none() {
        return Err(Error::Slater("no strictly feasible point found".into()));
    }
    Ok(dual)
}

/// Dual solve followed by primal recovery, retrying with a null-space
/// threshold widened tenfold (twice) before reporting failure.
pub fn solve(instance: &HqpbInstance, tol: &Tolerances, seed: u64) -> Result<(DualSolution, Recovery)> {
    let dual = dual_solve(instance, tol, seed)?;
    let mut last = None;
    for widen in [1.0, 10.0, 100.0] {
        match recover::recover_with(instance, &dual, tol, seed, widen) {
            Ok(p) => return Ok((dual, Recovery::Recovered(p))),
            Err(f) => last = Some(f),
        }
    }
    Ok((dual, Recovery::Failed(last.expect("at least one attempt"))))
}
