//! Primal recovery on the null space of the optimal dual pencil.

use rand::Rng;

use super::{DualSolution, HqpbInstance, PrimalRecovery, RecoveryFailure};
use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym, orthonormal_basis, quad_form_unchecked, SymMatrix};
use crate::lsq::{levenberg_marquardt, LmOptions};
use crate::rng::{gaussian_vector, SeedStream};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Fixed(f64),
    Free(f64, f64),
}

pub fn primal_recover(
    instance: &HqpbInstance,
    dual: &DualSolution,
    tol: &Tolerances,
    seed: u64,
) -> Result<PrimalRecovery> {
    recover_with(instance, dual, tol, seed, 1.0).map_err(|f| Error::RecoveryFailed(Box::new(f)))
}

struct Judge<'a> {
    instance: &'a HqpbInstance,
    dual_value: f64,
    feas: f64,
    gap_tol: f64,
    best: Option<(Vec<f64>, f64, f64)>,
}

impl Judge<'_> {
    /// Records `x` and returns the recovery when it is acceptable.
    fn offer(&mut self, x: &[f64], null_dim: usize) -> Option<PrimalRecovery> {
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let violation = self.instance.violation(x);
        let objective = quad_form_unchecked(&self.instance.objective, x);
        let gap = objective - self.dual_value;
        let merit = violation / self.feas + gap.abs() / self.gap_tol;
        let better = self
            .best
            .as_ref()
            .is_none_or(|(_, v, g)| merit < v / self.feas + g.abs() / self.gap_tol);
        if better {
            self.best = Some((x.to_vec(), violation, gap));
        }
        (violation <= self.feas && gap.abs() <= self.gap_tol).then(|| PrimalRecovery {
            x: x.to_vec(),
            constraint_values: self.instance.constraint_values(x),
            objective,
            gap,
            null_dim,
        })
    }
}

pub(super) fn recover_with(
    instance: &HqpbInstance,
    dual: &DualSolution,
    tol: &Tolerances,
    seed: u64,
    widen: f64,
) -> std::result::Result<PrimalRecovery, RecoveryFailure> {
    let n = instance.order();
    let pencil = instance.pencil(dual.gamma);
    let threshold = widen * tol.tol_psd.max(1e-8) * (1.0 + pencil.frobenius_norm());
    let null = match eig_sym(&pencil) {
        Ok(e) => {
            let raw: Vec<Vec<f64>> = e
                .values
                .iter()
                .zip(&e.vectors)
                .filter(|(v, _)| **v <= threshold)
                .map(|(_, v)| v.clone())
                .collect();
            canonical_basis(n, &raw)
        }
        Err(_) => Vec::new(),
    };
    let d = null.len();

    let targets: Vec<Target> = (0..2)
        .map(|i| {
            let [lo, hi] = instance.bounds(i);
            if lo == hi {
                Target::Fixed(lo)
            } else if dual.mu[i] > tol.tol_feas {
                Target::Fixed(hi)
            } else if dual.lambda[i] > tol.tol_feas {
                Target::Fixed(lo)
            } else {
                Target::Free(lo, hi)
            }
        })
        .collect();

    let mut judge = Judge {
        instance,
        dual_value: dual.dual_value,
        feas: tol.tol_feas * instance.bound_scale(),
        gap_tol: tol.tol_gap * (1.0 + dual.dual_value.abs()),
        best: None,
    };
    let mats = [&instance.first, &instance.second];

    if let Some(p) = judge.offer(&vec![0.0; n], d) {
        return Ok(polish(instance, &targets, &judge, p));
    }
    match d {
        0 => {}
        1 => {
            for s in ray_scalings(&mats, &targets, &null[0]) {
                let x: Vec<f64> = null[0].iter().map(|v| v * s.sqrt()).collect();
                if let Some(p) = judge.offer(&x, d) {
                    return Ok(polish(instance, &targets, &judge, p));
                }
            }
        }
        2 => {
            if let Some(p) = plane_search(&mats, &targets, &null, &mut judge) {
                return Ok(polish(instance, &targets, &judge, p));
            }
        }
        _ => {}
    }
    let stream = SeedStream::new(seed).split("hqpb-recover");
    if d > 0 {
        if let Some(p) = subspace_lsq(&mats, &targets, &null, &mut judge, stream.split("subspace")) {
            return Ok(polish(instance, &targets, &judge, p));
        }
    }
    if let Some(p) = full_lsq(instance, dual.dual_value, &mut judge, stream.split("full")) {
        return Ok(polish(instance, &targets, &judge, p));
    }
    let (best_x, violation, gap) = judge.best.unwrap_or((vec![0.0; n], f64::INFINITY, f64::INFINITY));
    Err(RecoveryFailure {
        best_x,
        violation,
        gap,
        null_dim: d,
    })
}

/// Gauss–Newton refinement of an accepted point on the active targets and
/// the objective gap; kept only if it stays feasible and shrinks the gap.
fn polish(instance: &HqpbInstance, targets: &[Target], judge: &Judge<'_>, p: PrimalRecovery) -> PrimalRecovery {
    if p.gap == 0.0 {
        return p;
    }
    let mats = [&instance.first, &instance.second];
    let (x, _) = levenberg_marquardt(
        &p.x,
        |x| {
            let (mut r, mut jac) = residuals_for(&mats, targets, x);
            let ax = instance.objective.mul_vec(x).expect("order");
            r.push(dot(x, &ax) - judge.dual_value);
            jac.push(ax.iter().map(|g| 2.0 * g).collect());
            (r, jac)
        },
        None,
        LmOptions {
            max_iter: 50,
            ..LmOptions::default()
        },
    );
    let objective = quad_form_unchecked(&instance.objective, &x);
    let gap = objective - judge.dual_value;
    if x.iter().all(|v| v.is_finite()) && instance.violation(&x) <= judge.feas && gap.abs() < p.gap.abs() {
        PrimalRecovery {
            constraint_values: instance.constraint_values(&x),
            x,
            objective,
            gap,
            null_dim: p.null_dim,
        }
    } else {
        p
    }
}

/// Orthonormal basis of `span(raw)` built from the projections of the
/// coordinate axes, so coordinate-aligned null spaces come out as axes.
fn canonical_basis(n: usize, raw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if raw.is_empty() {
        return Vec::new();
    }
    let projected: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut p = vec![0.0; n];
            for q in raw {
                crate::linalg::axpy(q[i], q, &mut p);
            }
            p
        })
        .collect();
    let basis = orthonormal_basis(&projected, 1e-8);
    if basis.len() == raw.len() {
        basis
    } else {
        raw.to_vec()
    }
}

/// Values of `s = r² ≥ 0` that meet fixed targets along direction `u`,
/// or sample the feasible interval when every target is free.
fn ray_scalings(mats: &[&SymMatrix; 2], targets: &[Target], u: &[f64]) -> Vec<f64> {
    let q: Vec<f64> = mats.iter().map(|m| quad_form_unchecked(m, u)).collect();
    let mut out = Vec::new();
    for (qi, t) in q.iter().zip(targets) {
        if let Target::Fixed(v) = t {
            if *qi != 0.0 && v / qi >= 0.0 {
                out.push(v / qi);
            }
        }
    }
    if out.is_empty() {
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        for (qi, t) in q.iter().zip(targets) {
            if let Target::Free(a, b) = t {
                if *qi > 0.0 {
                    lo = lo.max(a / qi);
                    hi = hi.min(b / qi);
                } else if *qi < 0.0 {
                    lo = lo.max(b / qi);
                    hi = hi.min(a / qi);
                }
            }
        }
        if lo <= hi {
            out.push(lo);
            if hi.is_finite() {
                out.push(0.5 * (lo + hi));
            }
        }
    }
    out
}

/// Two-dimensional null space: scan the angle, bisect sign changes of the
/// compatibility function for two fixed targets, and try each angle's ray.
fn plane_search(
    mats: &[&SymMatrix; 2],
    targets: &[Target],
    basis: &[Vec<f64>],
    judge: &mut Judge<'_>,
) -> Option<PrimalRecovery> {
    let dir = |theta: f64| -> Vec<f64> {
        basis[0]
            .iter()
            .zip(&basis[1])
            .map(|(u, w)| theta.cos() * u + theta.sin() * w)
            .collect()
    };
    let try_theta = |theta: f64, judge: &mut Judge<'_>| -> Option<PrimalRecovery> {
        let u = dir(theta);
        for s in ray_scalings(mats, targets, &u) {
            let x: Vec<f64> = u.iter().map(|v| v * s.sqrt()).collect();
            if let Some(p) = judge.offer(&x, 2) {
                return Some(p);
            }
        }
        None
    };
    if let Some(p) = try_theta(0.0, judge) {
        return Some(p);
    }
    const STEPS: usize = 720;
    let grid: Vec<f64> = (0..=STEPS)
        .map(|j| std::f64::consts::PI * j as f64 / STEPS as f64)
        .collect();
    if let [Target::Fixed(t1), Target::Fixed(t2)] = targets {
        let h = |theta: f64| {
            let u = dir(theta);
            t2 * quad_form_unchecked(mats[0], &u) - t1 * quad_form_unchecked(mats[1], &u)
        };
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut ha, hb) = (h(a), h(b));
            if ha == 0.0 {
                if let Some(p) = try_theta(a, judge) {
                    return Some(p);
                }
                continue;
            }
            if ha.signum() == hb.signum() {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let hm = h(mid);
                if hm.signum() == ha.signum() {
                    a = mid;
                    ha = hm;
                } else {
                    b = mid;
                }
            }
            if let Some(p) = try_theta(0.5 * (a + b), judge) {
                return Some(p);
            }
        }
    }
    for &theta in &grid[1..] {
        if let Some(p) = try_theta(theta, judge) {
            return Some(p);
        }
    }
    None
}

fn residuals_for(mats: &[&SymMatrix; 2], targets: &[Target], x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut r = Vec::new();
    let mut jac = Vec::new();
    for (m, t) in mats.iter().zip(targets) {
        let mx = m.mul_vec(x).expect("order");
        let v = dot(x, &mx);
        let grad: Vec<f64> = mx.iter().map(|g| 2.0 * g).collect();
        match t {
            Target::Fixed(level) => {
                r.push(v - level);
                jac.push(grad);
            }
            Target::Free(lo, hi) => {
                if v > *hi {
                    r.push(v - hi);
                    jac.push(grad);
                } else if v < *lo {
                    r.push(lo - v);
                    jac.push(grad.iter().map(|g| -g).collect());
                } else {
                    r.push(0.0);
                    jac.push(vec![0.0; x.len()]);
                }
            }
        }
    }
    (r, jac)
}

fn start_points(dim: usize, count: usize, stream: SeedStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(count);
    for j in 0..dim.min(count) {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        out.push(e);
    }
    while out.len() < count {
        let r: f64 = (rng.random::<f64>() * 4.0 - 2.0).exp();
        out.push(gaussian_vector(&mut rng, dim).iter().map(|v| v * r).collect());
    }
    out
}

/// Least squares on the targets in null-space coordinates.
fn subspace_lsq(
    mats: &[&SymMatrix; 2],
    targets: &[Target],
    basis: &[Vec<f64>],
    judge: &mut Judge<'_>,
    stream: SeedStream,
) -> Option<PrimalRecovery> {
    let d = basis.len();
    let n = basis[0].len();
    let embed = |y: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (yi, b) in y.iter().zip(basis) {
            crate::linalg::axpy(*yi, b, &mut x);
        }
        x
    };
    for y0 in start_points(d, 16, stream) {
        let (y, _) = levenberg_marquardt(
            &y0,
            |y| {
                let x = embed(y);
                let (r, jx) = residuals_for(mats, targets, &x);
                let jy = jx
                    .iter()
                    .map(|row| basis.iter().map(|b| dot(row, b)).collect())
                    .collect();
                (r, jy)
            },
            None,
            LmOptions::default(),
        );
        if let Some(p) = judge.offer(&embed(&y), d) {
            return Some(p);
        }
    }
    None
}

/// Least squares in the full space on bound violations plus the objective
/// gap to the dual value.
fn full_lsq(
    instance: &HqpbInstance,
    dual_value: f64,
    judge: &mut Judge<'_>,
    stream: SeedStream,
) -> Option<PrimalRecovery> {
    let n = instance.order();
    let mats = [&instance.first, &instance.second];
    let targets: Vec<Target> = (0..2)
        .map(|i| {
            let [lo, hi] = instance.bounds(i);
            if lo == hi {
                Target::Fixed(lo)
            } else {
                Target::Free(lo, hi)
            }
        })
        .collect();
    for x0 in start_points(n, 16, stream) {
        let (x, _) = levenberg_marquardt(
            &x0,
            |x| {
                let (mut r, mut jac) = residuals_for(&mats, &targets, x);
                let ax = instance.objective.mul_vec(x).expect("order");
                r.push(dot(x, &ax) - dual_value);
                jac.push(ax.iter().map(|g| 2.0 * g).collect());
                (r, jac)
            },
            None,
            LmOptions::default(),
        );
        if let Some(p) = judge.offer(&x, 0) {
            return Some(p);
        }
    }
    None
}
