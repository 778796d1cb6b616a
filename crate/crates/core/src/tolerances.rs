use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Numerical thresholds shared by every module.
///
/// Thresholds are applied relative to a scale factor `1 + max ‖M‖_F` over the
/// matrices involved in the decision, see [`Tolerances::scale`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Tolerances {
    pub tol_eig: f64,
    pub tol_psd: f64,
    pub tol_rank: f64,
    pub tol_feas: f64,
    pub tol_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_eig: 1e-10,
            tol_psd: 1e-8,
            tol_rank: 1e-9,
            tol_feas: 1e-7,
            tol_gap: 1e-5,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("tolEig", self.tol_eig),
            ("tolPsd", self.tol_psd),
            ("tolRank", self.tol_rank),
            ("tolFeas", self.tol_feas),
            ("tolGap", self.tol_gap),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `1 + max ‖M‖_F` over `mats`.
    pub fn scale<'a, I>(mats: I) -> f64
    where
        I: IntoIterator<Item = &'a SymMatrix>,
    {
        1.0 + mats
            .into_iter()
            .map(SymMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }
}
