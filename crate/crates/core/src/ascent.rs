//! Maximization of `λ_min(C₀ + Σ t_i C_i)` over simple convex domains.
//!
//! The objective is concave and nonsmooth. A projected supergradient phase
//! locates the region of the maximizer from several starts, then a
//! log-sum-exp smoothing of the spectrum is maximized by projected gradient
//! with backtracking while the smoothing width is driven to zero.

use crate::linalg::{eig_dense, EigenDecomposition, SymMatrix};

#[derive(Debug, Clone)]
pub(crate) enum Domain {
    Ball,
    Simplex,
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl Domain {
    pub(crate) fn project(&self, t: &mut [f64]) {
        match self {
            Domain::Ball => {
                let n = crate::linalg::norm(t);
                if n > 1.0 {
                    t.iter_mut().for_each(|x| *x /= n);
                }
            }
            Domain::Simplex => project_simplex(t),
            Domain::Box { lower, upper } => {
                for ((x, lo), hi) in t.iter_mut().zip(lower).zip(upper) {
                    *x = x.clamp(*lo, *hi);
                }
            }
        }
    }

    fn radius(&self) -> f64 {
        match self {
            Domain::Ball | Domain::Simplex => 1.0,
            Domain::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (u - l))
                .fold(0.0, f64::max),
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub(crate) fn project_simplex(t: &mut [f64]) {
    let mut u = t.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cum += uj;
        let cand = (cum - 1.0) / (j as f64 + 1.0);
        if uj - cand > 0.0 {
            theta = cand;
        }
    }
    t.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Affine pencil `C₀ + Σ t_i C_i`, stored densely and divided by a power of
/// two so that results are invariant under power-of-two rescaling.
#[derive(Debug, Clone)]
pub(crate) struct Pencil {
    n: usize,
    base: Vec<f64>,
    terms: Vec<Vec<f64>>,
    unit: f64,
}

impl Pencil {
    pub(crate) fn new(base: Option<&SymMatrix>, terms: &[SymMatrix]) -> Self {
        let n = base.map(SymMatrix::order).unwrap_or_else(|| terms[0].order());
        let largest = base
            .into_iter()
            .chain(terms)
            .map(SymMatrix::frobenius_norm)
            .fold(0.0, f64::max);
        let unit = if largest > 0.0 && largest.is_finite() {
            2f64.powi(largest.log2().round() as i32)
        } else {
            1.0
        };
        let dense = |m: &SymMatrix| m.to_dense().into_iter().map(|v| v / unit).collect();
        Pencil {
            n,
            base: base.map(dense).unwrap_or_else(|| vec![0.0; n * n]),
            terms: terms.iter().map(dense).collect(),
            unit,
        }
    }

    fn assemble(&self, t: &[f64]) -> Vec<f64> {
        let mut a = self.base.clone();
        for (ti, c) in t.iter().zip(&self.terms) {
            if *ti != 0.0 {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += ti * y);
            }
        }
        a
    }

    fn eig(&self, t: &[f64]) -> EigenDecomposition {
        eig_dense(self.n, self.assemble(t))
    }

    /// `vᵀ C_i v` for every term.
    fn grad_at(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        self.terms
            .iter()
            .map(|c| {
                let mut s = 0.0;
                for i in 0..n {
                    let row = &c[i * n..(i + 1) * n];
                    s += v[i] * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                }
                s
            })
            .collect()
    }

    /// Unscaled `λ_min` at `t` together with its eigenvector.
    /// Smoothed value `λ₁ − τ log Σ exp(−(λ_k−λ₁)/τ)` (normalized units),
    /// its gradient, and the exact normalized `λ₁`.
    fn smoothed(&self, t: &[f64], tau: f64) -> (f64, Vec<f64>, f64) {
        let e = self.eig(t);
        let l1 = e.values[0];
        let w: Vec<f64> = e.values.iter().map(|l| (-(l - l1) / tau).exp()).collect();
        let z: f64 = w.iter().sum();
        let mut g = vec![0.0; self.terms.len()];
        for (k, wk) in w.iter().enumerate() {
            let p = wk / z;
            if p < 1e-18 {
                continue;
            }
            let gk = self.grad_at(&e.vectors[k]);
            g.iter_mut().zip(gk).for_each(|(a, b)| *a += p * b);
        }
        (l1 - tau * z.ln(), g, l1)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentOptions {
    /// Supergradient iterations per start.
    pub iterations: usize,
    /// Stop as soon as the exact value reaches this level (unscaled units).
    pub target: Option<f64>,
    pub smoothing: bool,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            iterations: 150,
            target: None,
            smoothing: true,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AscentResult {
    pub point: Vec<f64>,
    /// Exact `λ_min` at `point`, unscaled.
    pub value: f64,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

struct Tracker<'a> {
    pencil: &'a Pencil,
    best: Vec<f64>,
    best_value: f64,
    evaluations: usize,
    target: Option<f64>,
}

impl Tracker<'_> {
    fn offer(&mut self, t: &[f64], normalized_value: f64) {
        self.evaluations += 1;
        if normalized_value > self.best_value {
            self.best_value = normalized_value;
            self.best = t.to_vec();
        }
    }

    fn done(&self) -> bool {
        self.target
            .is_some_and(|target| self.best_value * self.pencil.unit >= target)
    }
}

pub(crate) fn maximize_min_eig(
    pencil: &Pencil,
    domain: &Domain,
    starts: &[Vec<f64>],
    opts: AscentOptions,
) -> AscentResult {
    let mut tr = Tracker {
        pencil,
        best: Vec::new(),
        best_value: f64::NEG_INFINITY,
        evaluations: 0,
        target: opts.target,
    };
    let radius = domain.radius();
    let mut budget_exhausted = false;

    'starts: for start in starts {
        let mut t = start.clone();
        domain.project(&mut t);
        let mut converged = false;
        for k in 1..=opts.iterations {
            let e = pencil.eig(&t);
            tr.offer(&t, e.values[0]);
            if tr.done() {
                break 'starts;
            }
            let g = pencil.grad_at(&e.vectors[0]);
            let gn = crate::linalg::norm(&g);
            if gn == 0.0 {
                converged = true;
                break;
            }
            let step = radius / (k as f64).sqrt() / gn;
            let mut next = t.clone();
            next.iter_mut().zip(&g).for_each(|(x, gi)| *x += step * gi);
            domain.project(&mut next);
            if next == t {
                converged = true;
                break;
            }
            t = next;
        }
        if !converged {
            budget_exhausted = true;
        }
    }

    if opts.smoothing && !tr.done() && !tr.best.is_empty() {
        smooth_phase(&mut tr, domain);
    }

    AscentResult {
        value: tr.best_value * pencil.unit,
        point: tr.best,
        evaluations: tr.evaluations,
        budget_exhausted,
    }
}

fn smooth_phase(tr: &mut Tracker<'_>, domain: &Domain) {
    let pencil = tr.pencil;
    let mut t = tr.best.clone();
    let mut alpha = 1.0;
    let mut tau = 1e-1;
    while tau >= 1e-10 {
        let (mut f, mut g, l1) = pencil.smoothed(&t, tau);
        tr.offer(&t, l1);
        for _ in 0..80 {
            let mut accepted = false;
            for _ in 0..50 {
                let mut cand = t.clone();
                cand.iter_mut().zip(&g).for_each(|(x, gi)| *x += alpha * gi);
                domain.project(&mut cand);
                let d: Vec<f64> = cand.iter().zip(&t).map(|(a, b)| a - b).collect();
                let dn = crate::linalg::norm(&d);
                if dn == 0.0 {
                    break;
                }
                let (fc, gc, lc) = pencil.smoothed(&cand, tau);
                tr.offer(&cand, lc);
                let decrease = crate::linalg::dot(&g, &d);
                if fc >= f + 1e-4 * decrease {
                    t = cand;
                    f = fc;
                    g = gc;
                    alpha *= 2.0;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-300 {
                    break;
                }
            }
            if tr.done() {
                return;
            }
            if !accepted {
                break;
            }
        }
        tau *= 0.1;
        alpha = alpha.max(1e-12);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_examples() {
        let mut a = [0.5, 0.5];
        project_simplex(&mut a);
        assert_eq!(a, [0.5, 0.5]);
        let mut b = [2.0, 0.0];
        project_simplex(&mut b);
        assert_eq!(b, [1.0, 0.0]);
        let mut c = [0.0, 0.0, 0.0];
        project_simplex(&mut c);
        for x in c {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn balances_two_opposite_forms() {
        let a = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let b = SymMatrix::from_diagonal(&[-1.0, 1.0]);
        let p = Pencil::new(None, &[a, b]);
        let r = maximize_min_eig(&p, &Domain::Simplex, &[vec![1.0, 0.0]], AscentOptions::default());
        assert!(r.value.abs() < 1e-9, "{}", r.value);
        assert!((r.point[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn ball_maximizer_of_smooth_pencil() {
        // λ_min(diag(s₁, s₂)) over the ball peaks at s = (1,1)/√2.
        let p = Pencil::new(
            None,
            &[SymMatrix::from_diagonal(&[1.0, 0.0]), SymMatrix::from_diagonal(&[0.0, 1.0])],
        );
        let r = maximize_min_eig(&p, &Domain::Ball, &[vec![1.0, 0.0]], AscentOptions::default());
        assert!((r.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }
}
