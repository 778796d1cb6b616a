//! Yuan-type alternative on a regular cone: either a convex combination of
//! the forms is positive semidefinite on the cone's subspace, or some
//! direction in the cone makes every form negative.

use rand::Rng;
use serde::Serialize;

use crate::ascent::{maximize_min_eig, AscentOptions, Domain, Pencil};
use crate::basis::{rank_and_basis, MatrixSet};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, norm, quad_form_unchecked, restrict, SubspaceCone, SymMatrix};
use crate::pdcomb::{self, PdCombination, PdOutcome};
use crate::rng::{unit_vector, SeedStream};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexWeights {
    pub t: Vec<f64>,
}

impl SimplexWeights {
    pub fn is_valid(&self, tol_feas: f64) -> bool {
        self.t.iter().all(|v| *v >= 0.0) && (self.t.iter().sum::<f64>() - 1.0).abs() <= tol_feas
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum YuanOutcome {
    #[serde(rename_all = "camelCase")]
    Certificate {
        weights: SimplexWeights,
        min_eig_restricted: f64,
    },
    #[serde(rename_all = "camelCase")]
    Falsifier { x: Vec<f64>, values: Vec<f64> },
    #[serde(rename_all = "camelCase")]
    Inconclusive {
        best_cert_value: f64,
        best_falsifier_max: f64,
    },
}

/// Result of the generation/definiteness precondition shared by the
/// certificate modules.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HypothesisReport {
    pub rank: usize,
    pub basis_indices: Vec<usize>,
    /// The basis was padded with the identity to reach three generators.
    pub padded: bool,
    pub combination: PdCombination,
    pub marginal: bool,
}

/// Checks that `mats` is generated by at most three matrices with a positive
/// definite combination on `cone` (padding a short basis with the identity).
pub fn check_hypothesis(
    mats: &[SymMatrix],
    cone: Option<&SubspaceCone>,
    tol: &Tolerances,
    seed: u64,
) -> Result<HypothesisReport> {
    let set = MatrixSet::new(mats.to_vec())?;
    let basis = rank_and_basis(&set, tol);
    if basis.rank > 3 {
        return Err(Error::Hypothesis(format!(
            "the forms span a space of dimension {} (at most 3 allowed)",
            basis.rank
        )));
    }
    let n = set.order();
    let mut generators = basis.basis_members(&set);
    let padded = basis.rank < 3;
    if padded {
        generators.push(SymMatrix::identity(n));
    }
    let restricted = match cone {
        Some(k) => generators
            .iter()
            .map(|g| restrict(g, k))
            .collect::<Result<Vec<_>>>()?,
        None => generators,
    };
    let report = pdcomb::search(&restricted, tol, pdcomb::DEFAULT_MAX_ITER, seed, true)?;
    match report.outcome {
        PdOutcome::Found(combination) => Ok(HypothesisReport {
            rank: basis.rank,
            basis_indices: basis.basis_indices,
            padded,
            combination,
            marginal: basis.marginal,
        }),
        PdOutcome::NotFound { best_value, .. } => Err(Error::Hypothesis(format!(
            "no positive definite combination of the generators (best min eigenvalue {best_value:e})"
        ))),
    }
}

pub fn yuan_certificate(
    set: &MatrixSet,
    cone: &SubspaceCone,
    tol: &Tolerances,
    seed: u64,
) -> Result<YuanOutcome> {
    if cone.ambient() != set.order() {
        return Err(Error::dims("cone ambient dimension", set.order(), cone.ambient()));
    }
    if cone.dim() < 3 {
        return Err(Error::Hypothesis(format!(
            "cone dimension {} is below 3",
            cone.dim()
        )));
    }
    let root = SeedStream::new(seed);
    check_hypothesis(set.members(), Some(cone), tol, seed)?;

    let restricted: Vec<SymMatrix> = set
        .members()
        .iter()
        .map(|b| restrict(b, cone))
        .collect::<Result<_>>()?;
    let scale = Tolerances::scale(set.members());
    let m = set.len();

    let best = maximize_simplex(&restricted, tol, root)?;
    if best.1 >= -tol.tol_psd * scale {
        let combo = SymMatrix::combination(cone.dim(), &best.0, &restricted)?;
        return Ok(YuanOutcome::Certificate {
            min_eig_restricted: eig_sym(&combo)?.min_value(),
            weights: SimplexWeights { t: best.0 },
        });
    }

    let (y, gmax) = search_falsifier(&restricted, Some(&best.0), tol, root.split("falsifier"))?;
    if gmax < -tol.tol_feas {
        let x = cone.embed(&y);
        let values = set
            .members()
            .iter()
            .map(|b| quad_form_unchecked(b, &x))
            .collect();
        return Ok(YuanOutcome::Falsifier { x, values });
    }
    debug_assert_eq!(best.0.len(), m);
    Ok(YuanOutcome::Inconclusive {
        best_cert_value: best.1,
        best_falsifier_max: gmax,
    })
}

/// Maximizes `λ_min(Σ t_i R_i)` over the simplex, starting from the uniform
/// weights and then each vertex.
fn maximize_simplex(restricted: &[SymMatrix], tol: &Tolerances, root: SeedStream) -> Result<(Vec<f64>, f64)> {
    let m = restricted.len();
    let mut starts = vec![vec![1.0 / m as f64; m]];
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        starts.push(e);
    }
    let mut rng = root.split("simplex").rng();
    for _ in 0..2 {
        let mut t: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let s: f64 = t.iter().sum();
        t.iter_mut().for_each(|v| *v /= s);
        starts.push(t);
    }
    let pencil = Pencil::new(None, restricted);
    let opts = AscentOptions {
        iterations: 120,
        target: Some(0.0),
        smoothing: true,
    };
    let r = maximize_min_eig(&pencil, &Domain::Simplex, &starts, opts);
    let _ = tol;
    Ok((r.point, r.value))
}

/// Multistart minimization of `max_i yᵀR_i y` over the unit sphere. Returns
/// the best unit vector found and its value.
fn search_falsifier(
    restricted: &[SymMatrix],
    weights: Option<&[f64]>,
    tol: &Tolerances,
    stream: SeedStream,
) -> Result<(Vec<f64>, f64)> {
    let k = restricted[0].order();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for r in restricted {
        starts.push(eig_sym(r)?.min_vector().to_vec());
    }
    if let Some(t) = weights {
        let combo = SymMatrix::combination(k, t, restricted)?;
        starts.push(eig_sym(&combo)?.min_vector().to_vec());
    }
    let mut rng = stream.rng();
    for _ in 0..16 {
        starts.push(unit_vector(&mut rng, k));
    }

    let unit = {
        let largest = restricted.iter().map(SymMatrix::frobenius_norm).fold(0.0, f64::max);
        if largest > 0.0 {
            2f64.powi(largest.log2().round() as i32)
        } else {
            1.0
        }
    };
    let mats: Vec<SymMatrix> = restricted.iter().map(|r| r.scaled(1.0 / unit)).collect();
    let accept = -tol.tol_feas / unit;

    let mut best_y = starts[0].clone();
    let mut best_val = f64::INFINITY;
    for start in &starts {
        let v0 = max_form(&mats, start);
        if v0 < best_val {
            best_val = v0;
            best_y = start.clone();
        }
        if v0 < accept {
            return Ok((start.clone(), v0 * unit));
        }
    }
    for start in &starts {
        let (y, v) = descend_sphere(&mats, start, accept);
        if v < best_val {
            best_val = v;
            best_y = y;
        }
        if best_val < accept {
            break;
        }
    }
    Ok((best_y, best_val * unit))
}

fn max_form(mats: &[SymMatrix], y: &[f64]) -> f64 {
    mats.iter()
        .map(|m| quad_form_unchecked(m, y))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smoothed max `τ log Σ exp(yᵀM_i y/τ)` minimized on the sphere by
/// Riemannian gradient steps with backtracking, for decreasing `τ`.
fn descend_sphere(mats: &[SymMatrix], start: &[f64], accept: f64) -> (Vec<f64>, f64) {
    let smoothed = |y: &[f64], tau: f64| -> (f64, Vec<f64>) {
        let vals: Vec<f64> = mats.iter().map(|m| quad_form_unchecked(m, y)).collect();
        let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = vals.iter().map(|v| ((v - top) / tau).exp()).collect();
        let z: f64 = w.iter().sum();
        let mut g = vec![0.0; y.len()];
        for (m, wi) in mats.iter().zip(&w) {
            let p = wi / z;
            if p < 1e-18 {
                continue;
            }
            let my = m.mul_vec(y).expect("orders agree");
            g.iter_mut().zip(my).for_each(|(a, b)| *a += 2.0 * p * b);
        }
        let radial = crate::linalg::dot(&g, y);
        g.iter_mut().zip(y).for_each(|(a, b)| *a -= radial * b);
        (top + tau * z.ln(), g)
    };

    let mut y = start.to_vec();
    let mut best = (y.clone(), max_form(mats, &y));
    let mut alpha = 0.5;
    let mut tau = 1e-1;
    while tau >= 1e-9 {
        let (mut f, mut g) = smoothed(&y, tau);
        for _ in 0..150 {
            let gn = norm(&g);
            if gn < 1e-15 {
                break;
            }
            let mut moved = false;
            for _ in 0..40 {
                let mut cand: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a - alpha * b).collect();
                let cn = norm(&cand);
                cand.iter_mut().for_each(|v| *v /= cn);
                let (fc, gc) = smoothed(&cand, tau);
                if fc <= f - 1e-4 * alpha * gn * gn {
                    y = cand;
                    f = fc;
                    g = gc;
                    alpha = (alpha * 2.0).min(10.0);
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            let exact = max_form(mats, &y);
            if exact < best.1 {
                best = (y.clone(), exact);
            }
            if best.1 < accept || !moved {
                break;
            }
        }
        if best.1 < accept {
            break;
        }
        tau *= 0.1;
        alpha = alpha.max(1e-6);
    }
    best
}

/// Independent check of a certificate: weights on the simplex and the
/// restricted combination PSD to `tol_psd·scale`.
pub fn verify_certificate(
    set: &MatrixSet,
    cone: &SubspaceCone,
    weights: &SimplexWeights,
    tol: &Tolerances,
) -> Result<bool> {
    if weights.t.len() != set.len() {
        return Err(Error::dims("simplex weights", set.len(), weights.t.len()));
    }
    let combo = SymMatrix::combination(set.order(), &weights.t, set.members())?;
    let value = eig_sym(&restrict(&combo, cone)?)?.min_value();
    let scale = Tolerances::scale(set.members());
    Ok(weights.is_valid(tol.tol_feas) && value >= -tol.tol_psd * scale)
}

/// Independent check of a falsifier: a unit vector in the cone making every
/// form more negative than `−tol_feas`.
pub fn verify_falsifier(set: &MatrixSet, cone: &SubspaceCone, x: &[f64], tol: &Tolerances) -> bool {
    x.len() == set.order()
        && (norm(x) - 1.0).abs() <= 1e-9
        && cone.distance(x) <= 1e-9
        && set
            .members()
            .iter()
            .all(|b| quad_form_unchecked(b, x) < -tol.tol_feas)
}

/// Falsifier search on its own: a unit vector in `cone` with every form below
/// `−tol_feas`, if one is found.
pub fn falsifier_search(
    set: &MatrixSet,
    cone: &SubspaceCone,
    tol: &Tolerances,
    seed: u64,
) -> Result<Option<Vec<f64>>> {
    if cone.ambient() != set.order() {
        return Err(Error::dims("cone ambient dimension", set.order(), cone.ambient()));
    }
    if cone.dim() == 0 {
        return Ok(None);
    }
    let restricted: Vec<SymMatrix> = set
        .members()
        .iter()
        .map(|b| restrict(b, cone))
        .collect::<Result<_>>()?;
    let (y, v) = search_falsifier(&restricted, None, tol, SeedStream::new(seed).split("falsifier"))?;
    Ok((v < -tol.tol_feas).then(|| cone.embed(&y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_cone;
    use proptest::prelude::*;

    fn full(set: Vec<SymMatrix>) -> YuanOutcome {
        let set = MatrixSet::new(set).unwrap();
        yuan_certificate(&set, &SubspaceCone::full(set.order()), &Tolerances::default(), 0).unwrap()
    }

    #[test]
    fn balanced_pair_certificate() {
        let out = full(vec![
            SymMatrix::from_diagonal(&[1.0, -1.0, 0.0]),
            SymMatrix::from_diagonal(&[-1.0, 1.0, 0.0]),
        ]);
        let YuanOutcome::Certificate { weights, min_eig_restricted } = out else { panic!("{out:?}") };
        assert_eq!(weights.t, vec![0.5, 0.5]);
        assert_eq!(min_eig_restricted, 0.0);
    }

    #[test]
    fn identity_certificate() {
        let out = full(vec![SymMatrix::identity(3)]);
        let YuanOutcome::Certificate { weights, .. } = out else { panic!("{out:?}") };
        assert_eq!(weights.t, vec![1.0]);
    }

    #[test]
    fn negative_pair_falsifier() {
        let i3 = SymMatrix::identity(3);
        let out = full(vec![i3.scaled(-1.0), i3.scaled(-2.0)]);
        let YuanOutcome::Falsifier { x, values } = out else { panic!("{out:?}") };
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
        assert_eq!(values, vec![-1.0, -2.0]);
    }

    #[test]
    fn falsifier_search_examples() {
        let tol = Tolerances::default();
        let k = SubspaceCone::full(3);
        let neg = MatrixSet::new(vec![SymMatrix::identity(3).scaled(-1.0)]).unwrap();
        assert_eq!(falsifier_search(&neg, &k, &tol, 0).unwrap(), Some(vec![1.0, 0.0, 0.0]));
        let pos = MatrixSet::new(vec![SymMatrix::identity(3)]).unwrap();
        assert_eq!(falsifier_search(&pos, &k, &tol, 0).unwrap(), None);
        let pair = MatrixSet::new(vec![
            SymMatrix::from_diagonal(&[1.0, -1.0, 0.0]),
            SymMatrix::from_diagonal(&[-1.0, 1.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(falsifier_search(&pair, &k, &tol, 0).unwrap(), None);
    }

    #[test]
    fn small_cone_and_large_rank_are_rejected() {
        let tol = Tolerances::default();
        let set = MatrixSet::new(vec![SymMatrix::identity(3)]).unwrap();
        let k2 = SubspaceCone::from_orthonormal(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 1e-12)
            .unwrap();
        assert!(matches!(yuan_certificate(&set, &k2, &tol, 0), Err(Error::Hypothesis(_))));
        let four: Vec<SymMatrix> = (0..4)
            .map(|i| {
                let mut d = vec![0.0; 4];
                d[i] = 1.0;
                SymMatrix::from_diagonal(&d)
            })
            .collect();
        let set = MatrixSet::new(four).unwrap();
        assert!(matches!(
            yuan_certificate(&set, &SubspaceCone::full(4), &tol, 0),
            Err(Error::Hypothesis(_))
        ));
    }

    fn random_instance(seed: u64, n: usize, m: usize) -> MatrixSet {
        crate::random::random_rank3_set(&mut SeedStream::new(seed).rng(), n, m)
    }

    fn kind(o: &YuanOutcome) -> u8 {
        match o {
            YuanOutcome::Certificate { .. } => 0,
            YuanOutcome::Falsifier { .. } => 1,
            YuanOutcome::Inconclusive { .. } => 2,
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn outcomes_verify_and_scale(seed in 0u64..10_000, n in 3usize..7, m in 1usize..5, p in -3i32..4) {
            let set = random_instance(seed, n, m);
            let tol = Tolerances::default();
            let cone = SubspaceCone::full(n);
            let hyp = check_hypothesis(set.members(), Some(&cone), &tol, seed);
            prop_assume!(hyp.is_ok());
            let out = yuan_certificate(&set, &cone, &tol, seed).unwrap();
            match &out {
                YuanOutcome::Certificate { weights, .. } => {
                    prop_assert!(verify_certificate(&set, &cone, weights, &tol).unwrap());
                }
                YuanOutcome::Falsifier { x, .. } => prop_assert!(verify_falsifier(&set, &cone, x, &tol)),
                YuanOutcome::Inconclusive { .. } => {}
            }
            let alpha = 2f64.powi(p);
            let scaled = MatrixSet::new(set.members().iter().map(|b| b.scaled(alpha)).collect()).unwrap();
            let out2 = yuan_certificate(&scaled, &cone, &tol, seed).unwrap();
            prop_assert_eq!(kind(&out), kind(&out2));
            if let (YuanOutcome::Certificate { weights: a, .. }, YuanOutcome::Certificate { weights: b, .. }) = (&out, &out2) {
                prop_assert_eq!(&a.t, &b.t);
            }
        }

        #[test]
        fn reduction_to_restricted_problem(seed in 0u64..10_000, n in 4usize..7, m in 1usize..4) {
            let set = random_instance(seed, n, m);
            let tol = Tolerances::default();
            let mut rng = SeedStream::new(seed ^ 77).rng();
            let cone = random_cone(&mut rng, n, 3);
            let hyp = check_hypothesis(set.members(), Some(&cone), &tol, seed);
            prop_assume!(hyp.is_ok());
            let restricted = MatrixSet::new(
                set.members().iter().map(|b| restrict(b, &cone).unwrap()).collect(),
            ).unwrap();
            let a = yuan_certificate(&set, &cone, &tol, seed).unwrap();
            let b = yuan_certificate(&restricted, &SubspaceCone::full(3), &tol, seed).unwrap();
            prop_assume!(kind(&a) != 2 && kind(&b) != 2);
            prop_assert_eq!(kind(&a), kind(&b));
        }
    }
}
