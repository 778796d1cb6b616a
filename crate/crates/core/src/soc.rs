//! Second-order optimality checks at a KKT point: constraint qualification,
//! the lineality space of the critical cone, and a single multiplier whose
//! Lagrangian Hessian is positive semidefinite on a regular cone inside it.

use serde::{Deserialize, Serialize};

use crate::basis::{vector_rank, MatrixSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, null_space, SubspaceCone, SymMatrix};
use crate::lp::{maximize, LpResult};
use crate::yuan::{yuan_certificate, SimplexWeights, YuanOutcome};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Vertex {
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub mu: Vec<f64>,
}

/// First- and second-order data at a candidate point. `hessians[i]` is the
/// Lagrangian Hessian at multiplier vertex `vertices[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KktPointData {
    pub n: usize,
    /// Number of inequality constraints (length of each `lambda`).
    pub p: usize,
    pub grad_f: Vec<f64>,
    #[serde(default)]
    pub grad_g_active: Vec<Vec<f64>>,
    #[serde(default)]
    pub grad_h: Vec<Vec<f64>>,
    pub hessians: Vec<SymMatrix>,
    pub vertices: Vec<Vertex>,
}

impl KktPointData {
    pub fn q(&self) -> usize {
        self.grad_h.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if self.grad_f.len() != n {
            return Err(Error::dims("objective gradient", n, self.grad_f.len()));
        }
        for g in self.grad_g_active.iter().chain(&self.grad_h) {
            if g.len() != n {
                return Err(Error::dims("constraint gradient", n, g.len()));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("constraint gradient"));
            }
        }
        if self.hessians.is_empty() {
            return Err(Error::InvalidInput("at least one Hessian is required".into()));
        }
        for h in &self.hessians {
            if h.order() != n {
                return Err(Error::dims("Hessian order", n, h.order()));
            }
        }
        if self.vertices.len() != self.hessians.len() {
            return Err(Error::dims("multiplier vertices", self.hessians.len(), self.vertices.len()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.lambda.len() != self.p {
                return Err(Error::dims("vertex inequality multipliers", self.p, v.lambda.len()));
            }
            if v.mu.len() != self.q() {
                return Err(Error::dims("vertex equality multipliers", self.q(), v.mu.len()));
            }
            if v.lambda.iter().chain(&v.mu).any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("vertex multipliers"));
            }
            if v.lambda.iter().any(|x| *x < 0.0) {
                return Err(Error::VertexInvalid { index: i });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MfcqReport {
    pub holds: bool,
    pub equality_rank: usize,
    /// Optimal margin `δ*` of the direction problem (capped at 1).
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

/// Independent equality gradients plus a direction `u` in their null space
/// with `∇g_iᵀu ≤ −δ` for every active inequality, `‖u‖_∞ ≤ 1`.
pub fn mfcq_check(data: &KktPointData, tol: &Tolerances) -> Result<MfcqReport> {
    data.validate()?;
    let n = data.n;
    let q = data.q();
    let equality_rank = vector_rank(&data.grad_h, tol.tol_rank);
    let rank_ok = equality_rank == q;

    if data.grad_g_active.is_empty() {
        return Ok(MfcqReport {
            holds: rank_ok,
            equality_rank,
            margin: 1.0,
            witness: Some(vec![0.0; n]),
        });
    }

    let z = if q == 0 {
        SubspaceCone::full(n).basis().to_vec()
    } else {
        null_space(n, &data.grad_h, tol.tol_rank)
    };
    let r = z.len();
    if r == 0 {
        return Ok(MfcqReport {
            holds: false,
            equality_rank,
            margin: 0.0,
            witness: None,
        });
    }
    // variables: w⁺ (r), w⁻ (r), δ⁺, δ⁻ with u = Z(w⁺ − w⁻)
    let nv = 2 * r + 2;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |coef_w: Vec<f64>, coef_d: f64, b: f64| {
        let mut row = vec![0.0; nv];
        for k in 0..r {
            row[k] = coef_w[k];
            row[r + k] = -coef_w[k];
        }
        row[2 * r] = coef_d;
        row[2 * r + 1] = -coef_d;
        rows.push(row);
        rhs.push(b);
    };
    for g in &data.grad_g_active {
        push(z.iter().map(|c| dot(c, g)).collect(), 1.0, 0.0);
    }
    for j in 0..n {
        let coord: Vec<f64> = z.iter().map(|c| c[j]).collect();
        push(coord.clone(), 0.0, 1.0);
        push(coord.iter().map(|v| -v).collect(), 0.0, 1.0);
    }
    push(vec![0.0; r], 1.0, 1.0);
    let mut c = vec![0.0; nv];
    c[2 * r] = 1.0;
    c[2 * r + 1] = -1.0;

    let (margin, witness) = match maximize(&c, &rows, &rhs) {
        LpResult::Optimal { z: sol, value } => {
            let w: Vec<f64> = (0..r).map(|k| sol[k] - sol[r + k]).collect();
            let mut u = vec![0.0; n];
            for (wk, col) in w.iter().zip(&z) {
                crate::linalg::axpy(*wk, col, &mut u);
            }
            (value, Some(u))
        }
        LpResult::Unbounded => (f64::INFINITY, None),
    };
    let holds = rank_ok && margin > tol.tol_feas;
    Ok(MfcqReport {
        holds,
        equality_rank,
        margin,
        witness: holds.then_some(witness).flatten(),
    })
}

/// Null space of the stacked objective, active inequality and equality
/// gradients: the largest subspace inside the critical cone.
pub fn critical_lineality(data: &KktPointData, tol: &Tolerances) -> Result<SubspaceCone> {
    let n = data.n;
    if data.grad_f.len() != n {
        return Err(Error::dims("objective gradient", n, data.grad_f.len()));
    }
    let rows: Vec<Vec<f64>> = std::iter::once(data.grad_f.clone())
        .chain(data.grad_g_active.iter().cloned())
        .chain(data.grad_h.iter().cloned())
        .collect();
    let basis = null_space(n, &rows, tol.tol_rank);
    SubspaceCone::from_orthonormal(n, basis, 1e-8)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SocCertificate {
    pub weights: SimplexWeights,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub restricted_min_eig: f64,
    pub cone_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SocOutcome {
    Certificate(SocCertificate),
    /// Direction in the cone on which every vertex Hessian is negative.
    #[serde(rename_all = "camelCase")]
    Falsifier { v: Vec<f64>, values: Vec<f64> },
    #[serde(rename_all = "camelCase")]
    Inconclusive {
        best_cert_value: f64,
        best_falsifier_max: f64,
    },
}

pub fn soc_certificate(
    data: &KktPointData,
    cone: Option<&SubspaceCone>,
    tol: &Tolerances,
    seed: u64,
) -> Result<SocOutcome> {
    data.validate()?;
    let derived;
    let cone = match cone {
        Some(k) => {
            if k.ambient() != data.n {
                return Err(Error::dims("cone ambient dimension", data.n, k.ambient()));
            }
            k
        }
        None => {
            derived = critical_lineality(data, tol)?;
            &derived
        }
    };
    if cone.dim() < 3 {
        return Err(Error::ConeTooSmall { dim: cone.dim() });
    }
    let set = MatrixSet::new(data.hessians.clone())?;
    Ok(match yuan_certificate(&set, cone, tol, seed)? {
        YuanOutcome::Certificate {
            weights,
            min_eig_restricted,
        } => {
            let combine = |pick: &dyn Fn(&Vertex) -> &Vec<f64>, len: usize| -> Vec<f64> {
                let mut out = vec![0.0; len];
                for (ti, v) in weights.t.iter().zip(&data.vertices) {
                    crate::linalg::axpy(*ti, pick(v), &mut out);
                }
                out
            };
            let lambda = combine(&|v| &v.lambda, data.p);
            let mu = combine(&|v| &v.mu, data.q());
            if let Some(i) = lambda.iter().position(|x| *x < 0.0) {
                return Err(Error::VertexInvalid { index: i });
            }
            SocOutcome::Certificate(SocCertificate {
                weights,
                lambda,
                mu,
                restricted_min_eig: min_eig_restricted,
                cone_dim: cone.dim(),
            })
        }
        YuanOutcome::Falsifier { x, values } => SocOutcome::Falsifier { v: x, values },
        YuanOutcome::Inconclusive {
            best_cert_value,
            best_falsifier_max,
        } => SocOutcome::Inconclusive {
            best_cert_value,
            best_falsifier_max,
        },
    })
}
