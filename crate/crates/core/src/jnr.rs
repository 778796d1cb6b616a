//! Empirical probes of the joint range `{(xᵀB₁x, …, xᵀB_mx) : x ∈ ℝⁿ}`:
//! sampling, approximate membership, convexity and acuteness checks, plus the
//! classic small pairs whose ranges are not acute or not closed.

use serde::Serialize;

use crate::basis::{rank_and_basis, MatrixSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym, norm, quad_form_unchecked, SymMatrix};
use crate::lsq::{levenberg_marquardt, LmOptions};
use crate::pdcomb::{self, PdOutcome};
use crate::rng::{gaussian_vector, unit_vector, SeedStream};
use crate::Tolerances;

pub const THETAS: [f64; 3] = [0.25, 0.5, 0.75];

pub fn image(set: &MatrixSet, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != set.order() {
        return Err(Error::dims("preimage", set.order(), x.len()));
    }
    Ok(image_of(set, x))
}

fn image_of(set: &MatrixSet, x: &[f64]) -> Vec<f64> {
    set.members().iter().map(|b| quad_form_unchecked(b, x)).collect()
}

fn apply(b: &SymMatrix, x: &[f64]) -> Vec<f64> {
    b.mul_vec(x).expect("order checked by caller")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RangePointCloud {
    pub points: Vec<Vec<f64>>,
    pub preimages: Vec<Vec<f64>>,
    pub seed: u64,
}

impl RangePointCloud {
    /// Largest `|points[i]_j − x_iᵀB_jx_i|`.
    pub fn recompute_deviation(&self, set: &MatrixSet) -> f64 {
        self.points
            .iter()
            .zip(&self.preimages)
            .flat_map(|(p, x)| p.iter().zip(image_of(set, x)).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// Images of `count` uniform unit vectors followed by the images of `±v` for
/// the extreme eigenvectors of every member.
pub fn sample_range(set: &MatrixSet, count: usize, seed: u64) -> Result<RangePointCloud> {
    let n = set.order();
    let mut rng = SeedStream::new(seed).split("jnr-sample").rng();
    let mut preimages: Vec<Vec<f64>> = (0..count).map(|_| unit_vector(&mut rng, n)).collect();
    for b in set.members() {
        let e = eig_sym(b)?;
        for k in [0, n - 1] {
            let v = e.vectors[k].clone();
            preimages.push(v.iter().map(|c| -c).collect());
            preimages.push(v);
        }
    }
    let points = preimages.iter().map(|x| image_of(set, x)).collect();
    Ok(RangePointCloud { points, preimages, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipResult {
    pub target: Vec<f64>,
    /// `‖image(argmin) − target‖₂`.
    pub residual: f64,
    pub argmin: Vec<f64>,
    pub member: bool,
}

/// `‖image(x) − target‖²` and its gradient `4 Σ_j r_j B_j x`.
pub fn membership_objective(set: &MatrixSet, target: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_target(set, target)?;
    if x.len() != set.order() {
        return Err(Error::dims("preimage", set.order(), x.len()));
    }
    let mut grad = vec![0.0; x.len()];
    let mut value = 0.0;
    for (b, t) in set.members().iter().zip(target) {
        let bx = apply(b, x);
        let r = dot(x, &bx) - t;
        value += r * r;
        crate::linalg::axpy(4.0 * r, &bx, &mut grad);
    }
    Ok((value, grad))
}

fn check_target(set: &MatrixSet, target: &[f64]) -> Result<()> {
    if target.len() != set.len() {
        return Err(Error::dims("membership target", set.len(), target.len()));
    }
    if target.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("membership target"));
    }
    Ok(())
}

/// Multistart Levenberg–Marquardt on `image(x) − target`, optionally inside
/// the ball `‖x‖ ≤ norm_cap`. Evidence-grade: a large residual does not prove
/// non-membership.
pub fn membership_test(
    set: &MatrixSet,
    target: &[f64],
    tol: &Tolerances,
    starts: usize,
    seed: u64,
    norm_cap: Option<f64>,
) -> Result<MembershipResult> {
    check_target(set, target)?;
    Ok(membership_from(set, target, tol, starts, &[], seed, norm_cap))
}

fn membership_from(
    set: &MatrixSet,
    target: &[f64],
    tol: &Tolerances,
    starts: usize,
    hints: &[Vec<f64>],
    seed: u64,
    norm_cap: Option<f64>,
) -> MembershipResult {
    let n = set.order();
    let mut rng = SeedStream::new(seed).split("jnr-membership").rng();
    let radius = norm(target).sqrt().max(1.0);
    let mut inits: Vec<Vec<f64>> = hints.to_vec();
    for _ in 0..starts.max(1) {
        let mut x = gaussian_vector(&mut rng, n);
        let s = radius / norm(&x).max(1e-300);
        x.iter_mut().for_each(|v| *v *= s);
        inits.push(x);
    }
    let project = norm_cap.map(|cap| {
        move |x: &mut [f64]| {
            let r = norm(x);
            if r > cap {
                x.iter_mut().for_each(|v| *v *= cap / r);
            }
        }
    });
    let project_ref = project.as_ref().map(|p| p as &dyn Fn(&mut [f64]));
    let model = |x: &[f64]| {
        let mut r = Vec::with_capacity(set.len());
        let mut jac = Vec::with_capacity(set.len());
        for (b, t) in set.members().iter().zip(target) {
            let bx = apply(b, x);
            r.push(dot(x, &bx) - t);
            jac.push(bx.iter().map(|v| 2.0 * v).collect());
        }
        (r, jac)
    };
    let threshold = tol.tol_feas * (1.0 + norm(target));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for x0 in inits {
        let (x, _) = levenberg_marquardt(&x0, model, project_ref, LmOptions::default());
        let res = norm(&image_of(set, &x).iter().zip(target).map(|(a, b)| a - b).collect::<Vec<_>>());
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, x));
        }
        if res <= 1e-3 * threshold {
            break;
        }
    }
    let (residual, argmin) = best.expect("at least one start");
    MembershipResult {
        target: target.to_vec(),
        residual,
        argmin,
        member: residual <= threshold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexityFailure {
    pub target: Vec<f64>,
    pub residual: f64,
    /// `None` for the cone probe `2·image(x)`.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexityReport {
    /// Whether the set has rank ≤ 2, or rank 3 with a positive definite
    /// combination; otherwise the probe carries no guarantee.
    pub guaranteed: bool,
    pub rank: usize,
    pub pairs: usize,
    pub probes: usize,
    pub max_residual: f64,
    pub failures: Vec<ConvexityFailure>,
}

pub fn convexity_probe(set: &MatrixSet, pairs: usize, tol: &Tolerances, seed: u64) -> Result<ConvexityReport> {
    let root = SeedStream::new(seed);
    let basis = rank_and_basis(set, tol);
    let guaranteed = match basis.rank {
        0..=2 => true,
        3 => {
            let members = basis.basis_members(set);
            let seed = root.split("jnr-hypothesis").split_index(0).seed();
            let rep = pdcomb::search(&members, tol, pdcomb::DEFAULT_MAX_ITER, seed, true)?;
            matches!(rep.outcome, PdOutcome::Found(_))
        }
        _ => false,
    };
    let n = set.order();
    let mut rng = root.split("jnr-convexity").rng();
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut probes = 0;
    for pair in 0..pairs {
        let x = gaussian_vector(&mut rng, n);
        let y = gaussian_vector(&mut rng, n);
        let (ix, iy) = (image_of(set, &x), image_of(set, &y));
        let mut check = |target: Vec<f64>, hint: Vec<f64>, theta: Option<f64>, k: u64| {
            probes += 1;
            let sub = root.split_index(pair as u64 * 8 + k).seed();
            let r = membership_from(set, &target, tol, 8, &[hint], sub, None);
            max_residual = max_residual.max(r.residual);
            if !r.member {
                failures.push(ConvexityFailure {
                    target,
                    residual: r.residual,
                    theta,
                });
            }
        };
        for (k, theta) in THETAS.iter().enumerate() {
            let target: Vec<f64> = ix.iter().zip(&iy).map(|(a, b)| theta * a + (1.0 - theta) * b).collect();
            let hint: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| theta.sqrt() * a + (1.0 - theta).sqrt() * b)
                .collect();
            check(target, hint, Some(*theta), k as u64);
        }
        let doubled: Vec<f64> = ix.iter().map(|v| 2.0 * v).collect();
        let hint: Vec<f64> = y.iter().map(|v| std::f64::consts::SQRT_2 * v).collect();
        check(doubled, hint, None, 3);
    }
    Ok(ConvexityReport {
        guaranteed,
        rank: basis.rank,
        pairs,
        probes,
        max_residual,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AcutenessWitness {
    pub p: Vec<f64>,
    pub x_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

/// Looks for a unit `p` with both `p` and `−p` in the range by alternating
/// membership solves for `x₊`, `x₋` with the update
/// `p ← normalize(image(x₊) − image(x₋))`.
pub fn acuteness_probe(set: &MatrixSet, tol: &Tolerances, seed: u64) -> Result<Option<AcutenessWitness>> {
    let m = set.len();
    let root = SeedStream::new(seed).split("jnr-acute");
    let mut rng = root.rng();
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for j in 0..m {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; m];
            p[j] = s;
            directions.push(p);
        }
    }
    if m >= 2 {
        for (a, b) in [(1.0, -1.0), (-1.0, 1.0)] {
            let mut p = vec![0.0; m];
            p[0] = a / std::f64::consts::SQRT_2;
            p[1] = b / std::f64::consts::SQRT_2;
            directions.push(p);
        }
    }
    for _ in 0..8 {
        directions.push(unit_vector(&mut rng, m));
    }
    for (k, p0) in directions.into_iter().enumerate() {
        let mut p = p0;
        let stream = root.split_index(k as u64);
        for round in 0..20u64 {
            let minus: Vec<f64> = p.iter().map(|v| -v).collect();
            let plus_r = membership_from(set, &p, tol, 4, &[], stream.split_index(2 * round).seed(), None);
            let minus_r = membership_from(set, &minus, tol, 4, &[], stream.split_index(2 * round + 1).seed(), None);
            if plus_r.residual <= tol.tol_feas && minus_r.residual <= tol.tol_feas {
                return Ok(Some(AcutenessWitness {
                    p,
                    x_plus: plus_r.argmin,
                    x_minus: minus_r.argmin,
                    residual_plus: plus_r.residual,
                    residual_minus: minus_r.residual,
                }));
            }
            let diff: Vec<f64> = image_of(set, &plus_r.argmin)
                .iter()
                .zip(image_of(set, &minus_r.argmin))
                .map(|(a, b)| a - b)
                .collect();
            let Some(next) = crate::linalg::normalized(&diff) else { break };
            if next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-12 {
                break;
            }
            p = next;
        }
    }
    Ok(None)
}

/// The pair `[[1,1,0],[1,0,0],[0,0,0]]`, `[[0,1,0],[1,1,0],[0,0,0]]`: rank 2,
/// convex range equal to the whole plane, hence not acute.
pub fn non_acute_pair() -> MatrixSet {
    let b1 = SymMatrix::from_fn(3, |i, j| match (i, j) {
        (0, 0) | (0, 1) | (1, 0) => 1.0,
        _ => 0.0,
    });
    let b2 = SymMatrix::from_fn(3, |i, j| match (i, j) {
        (1, 1) | (0, 1) | (1, 0) => 1.0,
        _ => 0.0,
    });
    MatrixSet::new(vec![b1, b2]).expect("fixed pair")
}

/// The pair `diag(1,−1,0)`, `[[2,−1,0],[−1,0,0],[0,0,0]]` whose range
/// contains points converging to `(1,1)` but not `(1,1)` itself.
pub fn non_closed_pair() -> MatrixSet {
    let b1 = SymMatrix::from_diagonal(&[1.0, -1.0, 0.0]);
    let b2 = SymMatrix::from_fn(3, |i, j| match (i, j) {
        (0, 0) => 2.0,
        (0, 1) | (1, 0) => -1.0,
        _ => 0.0,
    });
    MatrixSet::new(vec![b1, b2]).expect("fixed pair")
}

/// `((k + 1/k)/√2, k/√2, 0)`, with image `(1 + 1/(2k²), 1 + 1/k²)`.
pub fn closure_sequence(k: f64) -> Vec<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![(k + 1.0 / k) * r, k * r, 0.0]
}

pub fn closure_limit_image(k: f64) -> [f64; 2] {
    [1.0 + 1.0 / (2.0 * k * k), 1.0 + 1.0 / (k * k)]
}

/// `max |xᵀB₂x − xᵀB₁x − (x₁−x₂)²|` over `samples` Gaussian points.
pub fn closure_identity_deviation(samples: usize, seed: u64) -> f64 {
    let set = non_closed_pair();
    let mut rng = SeedStream::new(seed).split("jnr-identity").rng();
    (0..samples)
        .map(|_| {
            let x = gaussian_vector(&mut rng, 3);
            let im = image_of(&set, &x);
            (im[1] - im[0] - (x[0] - x[1]).powi(2)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosureRow {
    pub k: f64,
    pub image: [f64; 2],
    pub expected: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosureGapReport {
    pub rows: Vec<ClosureRow>,
    pub identity_samples: usize,
    pub identity_max_deviation: f64,
}

pub const CLOSURE_KS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

pub fn closure_gap_demo(identity_samples: usize, seed: u64) -> ClosureGapReport {
    let set = non_closed_pair();
    let rows = CLOSURE_KS
        .iter()
        .map(|&k| {
            let im = image_of(&set, &closure_sequence(k));
            ClosureRow {
                k,
                image: [im[0], im[1]],
                expected: closure_limit_image(k),
            }
        })
        .collect();
    ClosureGapReport {
        rows,
        identity_samples,
        identity_max_deviation: closure_identity_deviation(identity_samples, seed),
    }
}

/// `{blockdiag(B₁,0,0), blockdiag(B₂,0,0), I_{n+2}}`.
pub fn dines_lift(b1: &SymMatrix, b2: &SymMatrix) -> Result<MatrixSet> {
    let n = b1.order();
    if b2.order() != n {
        return Err(Error::dims("second matrix order", n, b2.order()));
    }
    MatrixSet::new(vec![b1.pad_zeros(2), b2.pad_zeros(2), SymMatrix::identity(n + 2)])
}
