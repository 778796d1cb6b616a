//! Cutting-plane solution of the reduced dual
//! `max g(γ) s.t. A₀ + γ₁A₁ + γ₂A₂ ⪰ 0` inside a growing box.

use super::{DualSolution, HqpbInstance};
use crate::ascent::{maximize_min_eig, AscentOptions, Domain, Pencil};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, quad_form_unchecked, EigenDecomposition};
use crate::pdcomb::{self, PdOutcome};
use crate::Tolerances;

const MAX_ROUNDS: usize = 400;
const BOX_DOUBLINGS: u32 = 20;

type Point = [f64; 2];

/// Half-plane `c + a·γ₁ + b·γ₂ ≥ 0`.
#[derive(Debug, Clone, Copy)]
struct Cut {
    a: f64,
    b: f64,
    c: f64,
}

impl Cut {
    fn eval(&self, p: Point) -> f64 {
        self.c + self.a * p[0] + self.b * p[1]
    }
}

fn clip(poly: &[Point], cut: &Cut) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let fp = cut.eval(p);
        let fq = cut.eval(q);
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let s = fp / (fp - fq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-15 && (a[1] - b[1]).abs() <= 1e-15);
    out
}

fn square(radius: f64) -> Vec<Point> {
    vec![[-radius, -radius], [radius, -radius], [radius, radius], [-radius, radius]]
}

/// Maximizer of the piecewise-linear dual objective over a convex polygon:
/// vertices, edge crossings of the axes, and the origin if inside. Ties go to
/// the point of smallest norm.
fn master(instance: &HqpbInstance, poly: &[Point], cuts: &[Cut], radius: f64) -> (Point, f64) {
    let mut cands: Vec<Point> = poly.to_vec();
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        for axis in 0..2 {
            if (p[axis] < 0.0) != (q[axis] < 0.0) && p[axis] != q[axis] {
                let s = p[axis] / (p[axis] - q[axis]);
                let mut c = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
                c[axis] = 0.0;
                cands.push(c);
            }
        }
    }
    if cuts.iter().all(|c| c.c >= 0.0) && radius > 0.0 {
        cands.push([0.0, 0.0]);
    }
    let mut best = cands[0];
    let mut best_val = instance.dual_objective(best);
    for c in cands.into_iter().skip(1) {
        let v = instance.dual_objective(c);
        let tie = 1e-12 * (1.0 + v.abs().max(best_val.abs()));
        let norm = |p: Point| p[0].hypot(p[1]);
        if v > best_val + tie || (v >= best_val - tie && norm(c) < norm(best)) {
            best = c;
            best_val = v;
        }
    }
    (best, best_val)
}

fn eig_at(instance: &HqpbInstance, gamma: Point) -> Result<EigenDecomposition> {
    eig_sym(&instance.pencil(gamma))
}

fn cut_from(instance: &HqpbInstance, v: &[f64]) -> Cut {
    Cut {
        a: quad_form_unchecked(&instance.first, v),
        b: quad_form_unchecked(&instance.second, v),
        c: quad_form_unchecked(&instance.objective, v),
    }
}

struct Interior {
    point: Point,
    value: f64,
}

fn interior_point(instance: &HqpbInstance, radius: f64, hint: Option<Point>) -> Interior {
    let pencil = Pencil::new(Some(&instance.objective), &[instance.first.clone(), instance.second.clone()]);
    let mut starts = vec![vec![0.0, 0.0]];
    if let Some(h) = hint {
        starts.push(h.to_vec());
    }
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        starts.push(vec![0.5 * sx * radius, 0.5 * sy * radius]);
    }
    let r = maximize_min_eig(
        &pencil,
        &Domain::Box {
            lower: vec![-radius; 2],
            upper: vec![radius; 2],
        },
        &starts,
        AscentOptions {
            iterations: 100,
            target: None,
            smoothing: true,
        },
    );
    Interior {
        point: [r.point[0], r.point[1]],
        value: r.value,
    }
}

pub(super) fn solve(instance: &HqpbInstance, tol: &Tolerances, seed: u64, hypothesis: bool) -> Result<DualSolution> {
    let scale = instance.scale();
    let mats: Vec<_> = instance.matrices().into_iter().cloned().collect();
    let pd = pdcomb::search(&mats, tol, pdcomb::DEFAULT_MAX_ITER, seed, false)?;
    let (lambda_plus, hint) = match &pd.outcome {
        PdOutcome::Found(c) => {
            let hint = (c.s[0] > 0.0).then(|| [c.s[1] / c.s[0], c.s[2] / c.s[0]]);
            (c.certified_min_eig, hint)
        }
        PdOutcome::NotFound { .. } => (1.0, None),
    };
    let base_radius = 10.0 * (1.0 + instance.objective.frobenius_norm()) / lambda_plus.max(tol.tol_eig);
    let cap = base_radius * 2f64.powi(BOX_DOUBLINGS as i32);

    let mut radius = base_radius;
    let mut cuts: Vec<Cut> = Vec::new();
    let mut best: Option<(Point, f64, f64)> = None;
    loop {
        let hint = hint.map(|h| [h[0].clamp(-radius, radius), h[1].clamp(-radius, radius)]);
        let interior = interior_point(instance, radius, hint);
        if interior.value < -tol.tol_psd * scale {
            if radius >= cap {
                return Err(Error::EmptySpectrahedron { best: interior.value });
            }
            radius *= 2.0;
            continue;
        }
        let feasible_level = if interior.value > 0.0 { 0.0 } else { -tol.tol_psd * scale };

        let mut poly = square(radius);
        for c in &cuts {
            poly = clip(&poly, c);
        }
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        let mut best_round: Option<(Point, f64)> = None;
        for _ in 0..MAX_ROUNDS {
            if poly.is_empty() {
                return Err(Error::EmptySpectrahedron { best: interior.value });
            }
            let (g_hat, ub) = master(instance, &poly, &cuts, radius);
            upper = ub;
            let e = eig_at(instance, g_hat)?;
            if e.min_value() >= feasible_level {
                let v = instance.dual_objective(g_hat);
                if v > lower {
                    lower = v;
                    best_round = Some((g_hat, e.min_value()));
                }
            } else {
                let cut = cut_from(instance, e.min_vector());
                if cut.a == 0.0 && cut.b == 0.0 && cut.c < 0.0 {
                    return Err(Error::EmptySpectrahedron { best: cut.c });
                }
                cuts.push(cut);
                poly = clip(&poly, &cut);

                let (g_b, e_b) = bisect(instance, interior.point, g_hat, feasible_level)?;
                let v = instance.dual_objective(g_b);
                if v > lower {
                    lower = v;
                    best_round = Some((g_b, e_b.min_value()));
                }
                let tangent = cut_from(instance, e_b.min_vector());
                if !(tangent.a == 0.0 && tangent.b == 0.0) {
                    cuts.push(tangent);
                    poly = clip(&poly, &tangent);
                }
            }
            if upper - lower <= 1e-3 * tol.tol_gap * (1.0 + lower.abs()) {
                break;
            }
        }
        let Some((point, min_eig)) = best_round else {
            return Err(Error::EmptySpectrahedron { best: interior.value });
        };
        let improved = best.is_none_or(|(_, v, _)| lower > v + tol.tol_gap * (1.0 + v.abs()));
        best = Some((point, lower, min_eig));
        let on_edge = point[0].abs().max(point[1].abs()) >= 0.999 * radius;
        if on_edge && improved {
            if radius >= cap {
                return Err(Error::Unbounded { radius });
            }
            radius *= 2.0;
            continue;
        }
        return Ok(DualSolution::from_gamma(
            instance,
            point,
            min_eig,
            upper.max(lower),
            cuts.len(),
            radius,
            hypothesis,
        ));
    }
}

/// Last feasible point on the segment from `inside` toward `outside`.
fn bisect(
    instance: &HqpbInstance,
    inside: Point,
    outside: Point,
    level: f64,
) -> Result<(Point, EigenDecomposition)> {
    let at = |s: f64| [inside[0] + s * (outside[0] - inside[0]), inside[1] + s * (outside[1] - inside[1])];
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut e_lo = eig_at(instance, inside)?;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let e = eig_at(instance, at(mid))?;
        if e.min_value() >= level {
            lo = mid;
            e_lo = e;
        } else {
            hi = mid;
        }
    }
    Ok((at(lo), e_lo))
}
