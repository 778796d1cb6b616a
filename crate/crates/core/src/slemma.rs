//! S-lemma certificates for quadratic implications
//! `xᵀB_ix ≤ β_i (i ≥ 1) ⇒ xᵀB₀x ≥ β₀`, in an inequality form and a form
//! where the first constraint is an equality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ascent::{maximize_min_eig, AscentOptions, Domain, Pencil};
use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym, quad_form_unchecked, SymMatrix};
use crate::rng::{gaussian_vector, unit_vector, SeedStream};
use crate::yuan::check_hypothesis;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Variant {
    Inequality,
    EqualityFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SLemmaInstance {
    pub objective: SymMatrix,
    pub objective_level: f64,
    pub constraints: Vec<SymMatrix>,
    pub levels: Vec<f64>,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_point: Option<Vec<f64>>,
}

impl SLemmaInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.objective.order();
        let m = self.constraints.len();
        if m == 0 {
            return Err(Error::InvalidInput("at least one constraint is required".into()));
        }
        if self.levels.len() != m {
            return Err(Error::dims("constraint levels", m, self.levels.len()));
        }
        for b in &self.constraints {
            if b.order() != n {
                return Err(Error::dims("constraint matrix order", n, b.order()));
            }
        }
        if !self.objective_level.is_finite() || self.levels.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("constraint levels"));
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

    fn all_matrices(&self) -> Vec<SymMatrix> {
        std::iter::once(self.objective.clone())
            .chain(self.constraints.iter().cloned())
            .collect()
    }

    /// `σ = 1 + max |β_i|` over objective and constraint levels.
    pub fn level_scale(&self) -> f64 {
        1.0 + self
            .levels
            .iter()
            .chain(std::iter::once(&self.objective_level))
            .fold(0.0f64, |a, b| a.max(b.abs()))
    }

    /// `(xᵀB₀x, xᵀB₁x, …)`.
    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        std::iter::once(&self.objective)
            .chain(&self.constraints)
            .map(|b| quad_form_unchecked(b, x))
            .collect()
    }

    /// Largest constraint violation at `x`, with the equality read two-sided.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .zip(&self.levels)
            .enumerate()
            .map(|(i, (b, beta))| {
                let v = quad_form_unchecked(b, x) - beta;
                if i == 0 && self.variant == Variant::EqualityFirst {
                    v.abs()
                } else {
                    v.max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_counterexample(&self, x: &[f64], tol: &Tolerances) -> bool {
        x.len() == self.order()
            && self.violation(x) <= tol.tol_feas
            && quad_form_unchecked(&self.objective, x) < self.objective_level - tol.tol_feas
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SLemmaCertificate {
    pub t: Vec<f64>,
    pub psd_min_eig: f64,
    /// `β₀ + Σ t_iβ_i`.
    pub scalar_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SLemmaOutcome {
    Certificate(SLemmaCertificate),
    #[serde(rename_all = "camelCase")]
    Counterexample { x: Vec<f64>, values: Vec<f64> },
    #[serde(rename_all = "camelCase")]
    Inconclusive {
        best_phi: f64,
        box_radius: f64,
        best_counterexample_gap: f64,
    },
}

/// Strictly feasible point(s). `second` is present for the equality variant
/// and lies strictly above the first level.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SlaterWitness {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<Vec<f64>>,
}

const SLATER_DIRECTIONS: usize = 2048;
const SLATER_SCALINGS: usize = 20;

/// Smallest value of `level − tol − xᵀBx` over `rows`.
fn strict_margin(rows: &[(&SymMatrix, f64)], x: &[f64], tol: f64) -> f64 {
    rows.iter()
        .map(|(b, level)| level - tol - quad_form_unchecked(b, x))
        .fold(f64::INFINITY, f64::min)
}

/// Interval of `s = r² ≥ 0` along direction `d` on which `s·dᵀB_id < level_i − tol`
/// for every row.
fn ray_interval(rows: &[(&SymMatrix, f64)], d: &[f64], tol: f64) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for (b, level) in rows {
        let q = quad_form_unchecked(b, d);
        let rhs = level - tol;
        if q > 0.0 {
            hi = hi.min(rhs / q);
        } else if q < 0.0 {
            lo = lo.max(rhs / q);
        } else if rhs <= 0.0 {
            return None;
        }
    }
    (lo < hi).then_some((lo, hi))
}

pub(crate) fn find_strict(
    rows: &[(&SymMatrix, f64)],
    n: usize,
    supplied: Option<&[f64]>,
    tol: f64,
    stream: SeedStream,
) -> Option<Vec<f64>> {
    if let Some(p) = supplied {
        if strict_margin(rows, p, tol) > 0.0 {
            return Some(p.to_vec());
        }
    }
    let zero = vec![0.0; n];
    if strict_margin(rows, &zero, tol) > 0.0 {
        return Some(zero);
    }
    let mut rng = stream.rng();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..SLATER_DIRECTIONS {
        let d = unit_vector(&mut rng, n);
        let Some((lo, hi)) = ray_interval(rows, &d, tol) else { continue };
        let span = if hi.is_finite() { hi - lo } else { 4.0 * (1.0 + lo) };
        for j in 0..SLATER_SCALINGS {
            let s = lo + span * (j as f64 + 0.5) / SLATER_SCALINGS as f64;
            let x: Vec<f64> = d.iter().map(|v| v * s.sqrt()).collect();
            let margin = strict_margin(rows, &x, tol);
            if margin > 0.0 && best.as_ref().is_none_or(|(_, b)| margin > *b) {
                best = Some((x, margin));
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(x, _)| x)
}

pub fn slater_check(instance: &SLemmaInstance, tol: &Tolerances, seed: u64) -> Option<SlaterWitness> {
    let n = instance.order();
    let root = SeedStream::new(seed).split("slater");
    let rows: Vec<(&SymMatrix, f64)> = instance
        .constraints
        .iter()
        .zip(instance.levels.iter().copied())
        .collect();
    let supplied = instance.slater_point.as_deref();
    let point = find_strict(&rows, n, supplied, tol.tol_feas, root.split("below"))?;
    match instance.variant {
        Variant::Inequality => Some(SlaterWitness { point, second: None }),
        Variant::EqualityFirst => {
            let flipped = instance.constraints[0].scaled(-1.0);
            let mut above = rows.clone();
            above[0] = (&flipped, -instance.levels[0]);
            let second = find_strict(&above, n, supplied, tol.tol_feas, root.split("above"))?;
            Some(SlaterWitness {
                point,
                second: Some(second),
            })
        }
    }
}

fn block_with_level(b: &SymMatrix, level: f64, sigma: f64) -> SymMatrix {
    let n = b.order();
    SymMatrix::from_fn(n + 1, |i, j| {
        if i < n && j < n {
            b.get(i, j)
        } else if i == n && j == n {
            -level / sigma
        } else {
            0.0
        }
    })
}

const MAX_BOX: f64 = 1e6;

pub fn slemma_certificate(instance: &SLemmaInstance, tol: &Tolerances, seed: u64) -> Result<SLemmaOutcome> {
    instance.validate()?;
    tol.validate()?;
    let n = instance.order();
    let root = SeedStream::new(seed);
    let hyp = check_hypothesis(&instance.all_matrices(), None, tol, seed)?;
    if hyp.rank == 3 && n < 3 {
        return Err(Error::Hypothesis(format!(
            "three independent forms need at least 3 variables, found {n}"
        )));
    }
    let slater = slater_check(instance, tol, seed)
        .ok_or_else(|| Error::Slater("no strictly feasible point found".into()))?;

    let (t, phi, radius) = maximize_phi(instance, tol);
    if let Some(cert) = accept_certificate(instance, &t, tol)? {
        return Ok(SLemmaOutcome::Certificate(cert));
    }
    match search_counterexample(instance, &slater, tol, root.split("counterexample")) {
        Ok(x) => Ok(SLemmaOutcome::Counterexample {
            values: instance.values(&x),
            x,
        }),
        Err(gap) => Ok(SLemmaOutcome::Inconclusive {
            best_phi: phi,
            box_radius: radius,
            best_counterexample_gap: gap,
        }),
    }
}

/// Maximizes `Φ(t) = λ_min(blockdiag(B₀ + Σt_iB_i, −(β₀ + Σt_iβ_i)/σ))` over a
/// sign-constrained box that grows tenfold while the optimum presses on it.
fn maximize_phi(instance: &SLemmaInstance, tol: &Tolerances) -> (Vec<f64>, f64, f64) {
    let m = instance.constraints.len();
    let sigma = instance.level_scale();
    let base = block_with_level(&instance.objective, instance.objective_level, sigma);
    let terms: Vec<SymMatrix> = instance
        .constraints
        .iter()
        .zip(&instance.levels)
        .map(|(b, l)| block_with_level(b, *l, sigma))
        .collect();
    let pencil = Pencil::new(Some(&base), &terms);
    let scale = Tolerances::scale(base_and(&instance.objective, &instance.constraints));
    let threshold = -tol.tol_psd * scale;

    let mut radius = 1.0;
    let mut best: (Vec<f64>, f64) = (vec![0.0; m], f64::NEG_INFINITY);
    loop {
        let lower: Vec<f64> = (0..m)
            .map(|i| {
                if i == 0 && instance.variant == Variant::EqualityFirst {
                    -radius
                } else {
                    0.0
                }
            })
            .collect();
        let upper = vec![radius; m];
        let mut starts = vec![vec![0.0; m]];
        if best.1.is_finite() {
            starts.insert(0, best.0.clone());
        }
        let mid: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect();
        starts.push(mid);
        let r = maximize_min_eig(
            &pencil,
            &Domain::Box { lower, upper },
            &starts,
            AscentOptions {
                iterations: 150,
                target: Some(0.0),
                smoothing: true,
            },
        );
        if r.value > best.1 {
            best = (r.point, r.value);
        }
        let pressing = best.0.iter().any(|v| v.abs() >= 0.99 * radius);
        if best.1 >= threshold || !pressing || radius >= MAX_BOX {
            return (best.0, best.1, radius);
        }
        radius *= 10.0;
    }
}

fn base_and<'a>(b0: &'a SymMatrix, rest: &'a [SymMatrix]) -> impl Iterator<Item = &'a SymMatrix> {
    std::iter::once(b0).chain(rest)
}

fn evaluate(instance: &SLemmaInstance, t: &[f64]) -> Result<SLemmaCertificate> {
    let n = instance.order();
    let mut combo = instance.objective.clone();
    for (ti, b) in t.iter().zip(&instance.constraints) {
        combo = combo.add(&b.scaled(*ti))?;
    }
    let psd_min_eig = eig_sym(&combo)?.min_value();
    let scalar_slack = instance.objective_level + dot(t, &instance.levels);
    debug_assert_eq!(combo.order(), n);
    Ok(SLemmaCertificate {
        t: t.to_vec(),
        psd_min_eig,
        scalar_slack,
    })
}

fn accept_certificate(instance: &SLemmaInstance, t: &[f64], tol: &Tolerances) -> Result<Option<SLemmaCertificate>> {
    let cert = evaluate(instance, t)?;
    let scale = Tolerances::scale(base_and(&instance.objective, &instance.constraints));
    let ok = cert.psd_min_eig >= -tol.tol_psd * scale
        && cert.scalar_slack <= tol.tol_feas * instance.level_scale();
    Ok(ok.then_some(cert))
}

/// On failure returns the smallest `xᵀB₀x − β₀` reached among nearly
/// feasible iterates.
fn search_counterexample(
    instance: &SLemmaInstance,
    slater: &SlaterWitness,
    tol: &Tolerances,
    stream: SeedStream,
) -> std::result::Result<Vec<f64>, f64> {
    let n = instance.order();
    let mut best_gap = f64::INFINITY;
    let note = |x: &[f64], best_gap: &mut f64| {
        if instance.violation(x) <= tol.tol_feas {
            let g = quad_form_unchecked(&instance.objective, x) - instance.objective_level;
            *best_gap = best_gap.min(g);
        }
        instance.is_counterexample(x, tol)
    };

    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        candidates.push(e);
    }
    if let Ok(e) = eig_sym(&instance.objective) {
        candidates.extend(e.vectors.iter().cloned());
    }
    candidates.push(slater.point.clone());
    if let Some(s) = &slater.second {
        candidates.push(s.clone());
    }
    let mut rng = stream.rng();
    for _ in 0..8 {
        let r: f64 = rng.random_range(0.5..2.0);
        candidates.push(gaussian_vector(&mut rng, n).iter().map(|v| v * r).collect());
    }
    for x in &candidates {
        if note(x, &mut best_gap) {
            return Ok(x.clone());
        }
    }
    // rays through each candidate scaled onto the constraint boundary
    for x in &candidates {
        for s in ray_scalings(instance, x) {
            let y: Vec<f64> = x.iter().map(|v| v * s).collect();
            if note(&y, &mut best_gap) {
                return Ok(y);
            }
        }
    }

    let w_max = 10.0 * (1.0 + instance.objective.frobenius_norm()) / tol.tol_feas;
    for start in &candidates {
        let mut x = start.clone();
        let mut w = 1.0;
        loop {
            if let Some(found) = penalty_descent(instance, &mut x, w, tol, &mut |y| note(y, &mut best_gap)) {
                return Ok(found);
            }
            if w >= w_max {
                break;
            }
            w = (w * 10.0).min(w_max);
        }
    }
    Err(best_gap)
}

/// Scalings `c` for which `c·x` lands on a constraint boundary.
fn ray_scalings(instance: &SLemmaInstance, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (b, level) in instance.constraints.iter().zip(&instance.levels) {
        let q = quad_form_unchecked(b, x);
        if q != 0.0 && level / q > 0.0 {
            out.push((level / q).sqrt());
        }
    }
    out
}

/// Gradient descent with backtracking on
/// `xᵀB₀x + w·Σ viol_i(x)²`; `check` is consulted at every iterate.
fn penalty_descent(
    instance: &SLemmaInstance,
    x: &mut Vec<f64>,
    w: f64,
    _tol: &Tolerances,
    check: &mut dyn FnMut(&[f64]) -> bool,
) -> Option<Vec<f64>> {
    let eq = instance.variant == Variant::EqualityFirst;
    let eval = |x: &[f64]| -> (f64, Vec<f64>) {
        let b0x = instance.objective.mul_vec(x).expect("order");
        let mut f = dot(x, &b0x) - instance.objective_level;
        let mut g: Vec<f64> = b0x.iter().map(|v| 2.0 * v).collect();
        for (i, (b, level)) in instance.constraints.iter().zip(&instance.levels).enumerate() {
            let bx = b.mul_vec(x).expect("order");
            let mut v = dot(x, &bx) - level;
            if !(eq && i == 0) {
                v = v.max(0.0);
            }
            if v != 0.0 {
                f += w * v * v;
                g.iter_mut().zip(&bx).for_each(|(a, c)| *a += 4.0 * w * v * c);
            }
        }
        (f, g)
    };
    let (mut f, mut g) = eval(x);
    let mut alpha = 1e-2 / (1.0 + w);
    for _ in 0..300 {
        let gg = dot(&g, &g);
        if gg == 0.0 || !f.is_finite() {
            return None;
        }
        let mut moved = false;
        for _ in 0..40 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - alpha * b).collect();
            let (fc, gc) = eval(&cand);
            if fc <= f - 1e-4 * alpha * gg {
                *x = cand;
                f = fc;
                g = gc;
                alpha *= 2.0;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if check(x) {
            return Some(x.clone());
        }
        if !moved {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub pass: bool,
    pub psd_min_eig: f64,
    pub scalar_slack: f64,
    /// Index of the first multiplier with the wrong sign.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_violation: Option<usize>,
    pub samples_checked: usize,
    pub sample_failures: usize,
}

pub const VERIFY_SAMPLES: usize = 1000;
const VERIFY_DRAWS: usize = 100_000;

pub fn verify_certificate(
    instance: &SLemmaInstance,
    cert: &SLemmaCertificate,
    tol: &Tolerances,
    seed: u64,
) -> Result<VerificationReport> {
    instance.validate()?;
    let m = instance.constraints.len();
    if cert.t.len() != m {
        return Err(Error::dims("certificate multipliers", m, cert.t.len()));
    }
    let sign_violation = cert.t.iter().enumerate().position(|(i, ti)| {
        !(i == 0 && instance.variant == Variant::EqualityFirst) && *ti < 0.0
    });
    let fresh = evaluate(instance, &cert.t)?;
    let scale = Tolerances::scale(base_and(&instance.objective, &instance.constraints));
    let sigma = instance.level_scale();
    let mut pass = sign_violation.is_none()
        && fresh.psd_min_eig >= -tol.tol_psd * scale
        && fresh.scalar_slack <= tol.tol_feas * sigma;

    let n = instance.order();
    let mut rng = SeedStream::new(seed).split("verify").rng();
    let rows: Vec<(&SymMatrix, f64)> = instance
        .constraints
        .iter()
        .zip(instance.levels.iter().copied())
        .collect();
    let mut checked = 0;
    let mut failures = 0;
    let mut draws = 0;
    while checked < VERIFY_SAMPLES && draws < VERIFY_DRAWS {
        draws += 1;
        let d = unit_vector(&mut rng, n);
        let s = match instance.variant {
            Variant::Inequality => {
                let span = 4.0 * (1.0 + sigma);
                let s: f64 = rng.random_range(0.0..span);
                s
            }
            Variant::EqualityFirst => {
                let q = quad_form_unchecked(&instance.constraints[0], &d);
                let level = instance.levels[0];
                if q == 0.0 || level / q < 0.0 {
                    continue;
                }
                level / q
            }
        };
        let x: Vec<f64> = d.iter().map(|v| v * s.sqrt()).collect();
        let feasible = rows.iter().enumerate().all(|(i, (b, level))| {
            let v = quad_form_unchecked(b, &x);
            if i == 0 && instance.variant == Variant::EqualityFirst {
                (v - level).abs() <= tol.tol_feas * (1.0 + level.abs())
            } else {
                v <= *level
            }
        });
        if !feasible {
            continue;
        }
        checked += 1;
        let allowed = tol.tol_feas * sigma + tol.tol_psd * scale * s;
        if quad_form_unchecked(&instance.objective, &x) < instance.objective_level - allowed {
            failures += 1;
        }
    }
    if failures > 0 {
        pass = false;
    }
    Ok(VerificationReport {
        pass,
        psd_min_eig: fresh.psd_min_eig,
        scalar_slack: fresh.scalar_slack,
        sign_violation,
        samples_checked: checked,
        sample_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_symmetric;
    use proptest::prelude::*;
    use rand::Rng;

    fn inst(b0: SymMatrix, beta0: f64, b1: SymMatrix, beta1: f64) -> SLemmaInstance {
        SLemmaInstance {
            objective: b0,
            objective_level: beta0,
            constraints: vec![b1],
            levels: vec![beta1],
            variant: Variant::Inequality,
            slater_point: None,
        }
    }

    fn i3() -> SymMatrix {
        SymMatrix::identity(3)
    }

    #[test]
    fn slater_examples() {
        let tol = Tolerances::default();
        let a = inst(i3(), 0.0, i3(), 1.0);
        assert_eq!(slater_check(&a, &tol, 0).unwrap().point, vec![0.0; 3]);
        let mut b = inst(i3(), 0.0, i3().scaled(-1.0), -1.0);
        let w = slater_check(&b, &tol, 0).unwrap();
        assert!(quad_form_unchecked(&b.constraints[0], &w.point) < -1.0 - tol.tol_feas);
        b.slater_point = Some(vec![2.0, 0.0, 0.0]);
        assert_eq!(slater_check(&b, &tol, 0).unwrap().point, vec![2.0, 0.0, 0.0]);
        let c = inst(i3(), 0.0, SymMatrix::zeros(3), 0.0);
        assert!(slater_check(&c, &tol, 0).is_none());
    }

    #[test]
    fn unconditional_certificate() {
        let out = slemma_certificate(&inst(i3(), 0.0, i3(), 1.0), &Tolerances::default(), 0).unwrap();
        let SLemmaOutcome::Certificate(c) = out else { panic!("{out:?}") };
        assert_eq!(c.t, vec![0.0]);
    }

    #[test]
    fn tight_ball_certificate() {
        let instance = inst(i3().scaled(-1.0), -1.0, i3(), 1.0);
        let tol = Tolerances::default();
        let out = slemma_certificate(&instance, &tol, 0).unwrap();
        let SLemmaOutcome::Certificate(c) = out else { panic!("{out:?}") };
        assert!((c.t[0] - 1.0).abs() < 1e-7, "{:?}", c.t);
        assert!(c.scalar_slack.abs() <= tol.tol_feas);
        let report = verify_certificate(&instance, &c, &tol, 0).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.samples_checked, VERIFY_SAMPLES);
    }

    #[test]
    fn unit_sphere_counterexample() {
        let instance = inst(i3().scaled(-1.0), -0.5, i3(), 1.0);
        let out = slemma_certificate(&instance, &Tolerances::default(), 0).unwrap();
        let SLemmaOutcome::Counterexample { x, values } = out else { panic!("{out:?}") };
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
        assert_eq!(values, vec![-1.0, 1.0]);
    }

    #[test]
    fn verification_examples() {
        let tol = Tolerances::default();
        let exact = inst(i3().scaled(-1.0), -1.0, i3(), 1.0);
        let cert = SLemmaCertificate { t: vec![1.0], psd_min_eig: 0.0, scalar_slack: 0.0 };
        let r = verify_certificate(&exact, &cert, &tol, 0).unwrap();
        assert!(r.pass);
        assert_eq!((r.psd_min_eig, r.scalar_slack), (0.0, 0.0));

        let neg = inst(i3().scaled(-1.0), 0.0, i3(), 1.0);
        let zero = SLemmaCertificate { t: vec![0.0], psd_min_eig: 0.0, scalar_slack: 0.0 };
        let r = verify_certificate(&neg, &zero, &tol, 0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.psd_min_eig, -1.0);

        let wrong_sign = SLemmaCertificate { t: vec![-1.0], psd_min_eig: 0.0, scalar_slack: 0.0 };
        let r = verify_certificate(&exact, &wrong_sign, &tol, 0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.sign_violation, Some(0));
    }

    #[test]
    fn missing_slater_point_is_an_error() {
        let instance = inst(i3(), 0.0, SymMatrix::zeros(3), 0.0);
        assert!(matches!(
            slemma_certificate(&instance, &Tolerances::default(), 0),
            Err(Error::Slater(_))
        ));
    }

    #[test]
    fn equality_variant_on_sphere() {
        // ‖x‖² = 1 ⇒ xᵀdiag(2,1,1)x ≥ 1, certified by t₁ = −1
        let instance = SLemmaInstance {
            objective: SymMatrix::from_diagonal(&[2.0, 1.0, 1.0]),
            objective_level: 1.0,
            constraints: vec![i3()],
            levels: vec![1.0],
            variant: Variant::EqualityFirst,
            slater_point: None,
        };
        let tol = Tolerances::default();
        let out = slemma_certificate(&instance, &tol, 0).unwrap();
        let SLemmaOutcome::Certificate(c) = out else { panic!("{out:?}") };
        assert!((c.t[0] + 1.0).abs() < 1e-6, "{:?}", c.t);
        assert!(verify_certificate(&instance, &c, &tol, 0).unwrap().pass);
    }

    fn sphere_grid_min(b0: &SymMatrix, b1: &SymMatrix) -> bool {
        // true when some unit x has xᵀB₁x ≤ 0 and xᵀB₀x < 0
        let steps = 120;
        for i in 0..=steps {
            let th = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..2 * steps {
                let ph = std::f64::consts::PI * j as f64 / steps as f64;
                let x = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                if quad_form_unchecked(b1, &x) <= -1e-3 && quad_form_unchecked(b0, &x) < -1e-3 {
                    return true;
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homogeneous_case_agrees_with_sphere_grid(seed in 0u64..10_000) {
            let mut rng = SeedStream::new(seed).rng();
            let b0 = random_symmetric(&mut rng, 3);
            let b1 = random_symmetric(&mut rng, 3);
            let instance = inst(b0.clone(), 0.0, b1.clone(), 0.0);
            let tol = Tolerances::default();
            let Ok(out) = slemma_certificate(&instance, &tol, seed) else {
                return Ok(());
            };
            match out {
                SLemmaOutcome::Certificate(c) => {
                    prop_assert!(verify_certificate(&instance, &c, &tol, seed).unwrap().pass);
                    prop_assert!(!sphere_grid_min(&b0, &b1));
                }
                SLemmaOutcome::Counterexample { x, .. } => {
                    prop_assert!(instance.is_counterexample(&x, &tol));
                }
                SLemmaOutcome::Inconclusive { .. } => {}
            }
        }

        #[test]
        fn equality_certificate_with_nonnegative_weight_serves_inequality(seed in 0u64..10_000) {
            let mut rng = SeedStream::new(seed).rng();
            let b0 = random_symmetric(&mut rng, 3);
            let b1 = crate::random::random_positive_definite(&mut rng, 3, 0.5);
            let beta0 = -(rng.random::<f64>() + 0.1) * 5.0;
            let eq = SLemmaInstance {
                variant: Variant::EqualityFirst,
                ..inst(b0, beta0, b1, 1.0)
            };
            let tol = Tolerances::default();
            let Ok(SLemmaOutcome::Certificate(c)) = slemma_certificate(&eq, &tol, seed) else {
                return Ok(());
            };
            prop_assume!(c.t[0] >= 0.0);
            let ineq = SLemmaInstance { variant: Variant::Inequality, ..eq };
            prop_assert!(verify_certificate(&ineq, &c, &tol, seed).unwrap().pass);
        }
    }
}
