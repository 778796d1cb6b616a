//! Search for a positive definite linear combination `Σ s_j M_j ≻ 0`.
//!
//! `φ(s) = λ_min(Σ s_j M_j)` is concave and positively homogeneous, so it is
//! maximized over the unit ball. A strictly positive maximum (beyond the
//! `tol_psd` margin) is a certificate; the combination is rechecked with an
//! independent eigendecomposition before it is reported.

use serde::Serialize;

use crate::ascent::{maximize_min_eig, AscentOptions, Domain, Pencil};
use crate::basis::MatrixSet;
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, normalized, restrict, SubspaceCone, SymMatrix};
use crate::rng::{unit_vector, SeedStream};
use crate::Tolerances;

/// Random starts added after the signed coordinate directions.
pub const RANDOM_STARTS: usize = 16;

/// Default supergradient iterations per start.
pub const DEFAULT_MAX_ITER: usize = 150;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PdCombination {
    /// Unit-norm coefficients.
    pub s: Vec<f64>,
    pub certified_min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum PdOutcome {
    Found(PdCombination),
    #[serde(rename_all = "camelCase")]
    NotFound { best_value: f64, best_point: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PdSearchReport {
    pub outcome: PdOutcome,
    /// Eigendecompositions spent by the search.
    pub iterations: usize,
    /// Some start used its whole iteration budget without settling.
    pub budget_exhausted: bool,
}

impl PdSearchReport {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, PdOutcome::Found(_))
    }
}

/// `λ_min(Σ s_j M_j)`.
pub fn phi(mats: &[SymMatrix], s: &[f64]) -> Result<f64> {
    let n = mats
        .first()
        .map(SymMatrix::order)
        .ok_or_else(|| Error::InvalidInput("empty matrix list".into()))?;
    Ok(eig_sym(&SymMatrix::combination(n, s, mats)?)?.min_value())
}

pub fn find_pd_combination(
    mats: &MatrixSet,
    cone: Option<&SubspaceCone>,
    tol: &Tolerances,
    max_iter: usize,
    seed: u64,
) -> Result<PdSearchReport> {
    let working = match cone {
        Some(k) => {
            if k.dim() == 0 {
                return Err(Error::InvalidInput("cone has dimension 0".into()));
            }
            mats.members()
                .iter()
                .map(|m| restrict(m, k))
                .collect::<Result<Vec<_>>>()?
        }
        None => mats.members().to_vec(),
    };
    search(&working, tol, max_iter, seed, false)
}

/// Search over already-restricted matrices. With `stop_early` the ascent
/// ends as soon as the certificate threshold is crossed.
pub(crate) fn search(
    mats: &[SymMatrix],
    tol: &Tolerances,
    max_iter: usize,
    seed: u64,
    stop_early: bool,
) -> Result<PdSearchReport> {
    let k = mats.len();
    let n = mats[0].order();
    let scale = Tolerances::scale(mats);
    let threshold = tol.tol_psd * scale;

    let mut starts = Vec::with_capacity(2 * k + RANDOM_STARTS);
    for j in 0..k {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; k];
            e[j] = sign;
            starts.push(e);
        }
    }
    let mut rng = SeedStream::new(seed).split("pdcomb").rng();
    for _ in 0..RANDOM_STARTS {
        starts.push(unit_vector(&mut rng, k));
    }

    let pencil = Pencil::new(None, mats);
    let opts = AscentOptions {
        iterations: max_iter.max(1),
        target: stop_early.then_some(threshold * 2.0),
        smoothing: true,
    };
    let r = maximize_min_eig(&pencil, &Domain::Ball, &starts, opts);

    let outcome = match normalized(&r.point) {
        Some(s) if r.value > threshold => {
            let combo = SymMatrix::combination(n, &s, mats)?;
            let certified = eig_sym(&combo)?.min_value();
            if certified > threshold {
                PdOutcome::Found(PdCombination {
                    s,
                    certified_min_eig: certified,
                })
            } else {
                PdOutcome::NotFound {
                    best_value: certified,
                    best_point: s,
                }
            }
        }
        _ => PdOutcome::NotFound {
            best_value: r.value,
            best_point: r.point,
        },
    };
    Ok(PdSearchReport {
        outcome,
        iterations: r.evaluations,
        budget_exhausted: r.budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{express_in_basis, generate};
    use crate::jnr::dines_lift;
    use crate::random::{random_grid, random_symmetric};
    use proptest::prelude::*;

    fn run(mats: Vec<SymMatrix>) -> PdSearchReport {
        find_pd_combination(
            &MatrixSet::new(mats).unwrap(),
            None,
            &Tolerances::default(),
            DEFAULT_MAX_ITER,
            0,
        )
        .unwrap()
    }

    #[test]
    fn identity_is_found() {
        let r = run(vec![SymMatrix::identity(3)]);
        let PdOutcome::Found(c) = r.outcome else { panic!("{r:?}") };
        assert_eq!(c.s, vec![1.0]);
        assert!((c.certified_min_eig - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dines_lift_is_found_at_identity_direction() {
        let b1 = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]], 0.0).unwrap();
        let b2 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]], 0.0).unwrap();
        let lift = dines_lift(&b1, &b2).unwrap();
        let r = run(lift.into_members());
        let PdOutcome::Found(c) = r.outcome else { panic!("{r:?}") };
        assert!(c.certified_min_eig >= 1.0 - 1e-8);
        assert!((c.s[2] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn opposite_diagonals_not_found() {
        let r = run(vec![
            SymMatrix::from_diagonal(&[1.0, -1.0]),
            SymMatrix::from_diagonal(&[-1.0, 1.0]),
        ]);
        let PdOutcome::NotFound { best_value, .. } = r.outcome else { panic!("{r:?}") };
        assert!(best_value <= Tolerances::default().tol_psd);
    }

    #[test]
    fn cone_restriction_can_create_definiteness() {
        let a = SymMatrix::from_diagonal(&[1.0, -1.0, 2.0]);
        let k = SubspaceCone::from_orthonormal(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]], 1e-12)
            .unwrap();
        let set = MatrixSet::new(vec![a]).unwrap();
        let tol = Tolerances::default();
        assert!(!find_pd_combination(&set, None, &tol, 100, 0).unwrap().is_found());
        assert!(find_pd_combination(&set, Some(&k), &tol, 100, 0).unwrap().is_found());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn phi_is_positively_homogeneous(seed in 0u64..1000, n in 2usize..7, k in 1usize..4) {
            let mut rng = SeedStream::new(seed).rng();
            let mats: Vec<SymMatrix> = (0..k).map(|_| random_symmetric(&mut rng, n)).collect();
            let s = crate::rng::gaussian_vector(&mut rng, k);
            let base = phi(&mats, &s).unwrap();
            for alpha in [0.5, 2.0] {
                let scaled: Vec<f64> = s.iter().map(|v| v * alpha).collect();
                let v = phi(&mats, &scaled).unwrap() / alpha;
                prop_assert!((v - base).abs() <= 1e-10 * (1.0 + base.abs()));
            }
        }

        #[test]
        fn adding_identity_makes_found(seed in 0u64..1000, n in 2usize..6, k in 1usize..4) {
            let mut rng = SeedStream::new(seed).rng();
            let mut mats: Vec<SymMatrix> = (0..k).map(|_| random_symmetric(&mut rng, n)).collect();
            mats.push(SymMatrix::identity(n));
            let r = run(mats.clone());
            let PdOutcome::Found(c) = r.outcome else { panic!("not found") };
            let check = eig_sym(&SymMatrix::combination(n, &c.s, &mats).unwrap()).unwrap();
            prop_assert!(check.min_value() > 0.0);
        }

        #[test]
        fn found_survives_change_of_basis(seed in 0u64..1000, n in 2usize..6) {
            let mut rng = SeedStream::new(seed).rng();
            let k = 3;
            let mut old: Vec<SymMatrix> = (0..k - 1).map(|_| random_symmetric(&mut rng, n)).collect();
            old.push(crate::random::random_positive_definite(&mut rng, n, 0.5));
            let first = run(old.clone());
            prop_assume!(first.is_found());
            let mix = random_grid(&mut rng, k, k);
            let new = generate(&mix, &MatrixSet::new(old.clone()).unwrap()).unwrap();
            // skip ill-conditioned mixes where the new set is not a basis
            let r = crate::basis::rank_and_basis(&new, &Tolerances::default());
            prop_assume!(r.rank == k);
            let a = express_in_basis(&old, new.members()).unwrap();
            let PdOutcome::Found(c) = first.outcome else { unreachable!() };
            let s2 = crate::basis::transfer_pd(&c.s, &a).unwrap();
            prop_assert!(phi(new.members(), &s2).unwrap() > 0.0);
            prop_assert!(run(new.into_members()).is_found());
        }
    }
}
