//! Random instance builders used by tests, benchmarks and the property
//! suites.

use rand::Rng;

use crate::basis::{generate, MatrixSet};
use crate::hqpb::HqpbInstance;
use crate::linalg::{orthonormal_basis, quad_form_unchecked, SubspaceCone, SymMatrix};
use crate::rng::gaussian_vector;
use crate::slemma::{SLemmaInstance, Variant};

/// Symmetric matrix with independent standard normal upper-triangle entries.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymMatrix {
    let g = gaussian_vector(rng, n * (n + 1) / 2);
    let mut k = 0;
    SymMatrix::from_fn(n, |_, _| {
        let v = g[k];
        k += 1;
        v
    })
}

/// `GGᵀ + shift·I` with a Gaussian `G`.
pub fn random_positive_definite<R: Rng + ?Sized>(rng: &mut R, n: usize, shift: f64) -> SymMatrix {
    let g: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vector(rng, n)).collect();
    SymMatrix::from_fn(n, |i, j| {
        let s: f64 = (0..n).map(|k| g[i][k] * g[j][k]).sum::<f64>() / n as f64;
        s + if i == j { shift } else { 0.0 }
    })
}

/// Random `k`-dimensional subspace of `R^n`.
pub fn random_cone<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> SubspaceCone {
    loop {
        let vs: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vector(rng, n)).collect();
        let basis = orthonormal_basis(&vs, 1e-6);
        if basis.len() == k {
            return SubspaceCone::from_orthonormal(n, basis, 1e-9)
                .expect("Gram-Schmidt output is orthonormal");
        }
    }
}

/// Random coefficient grid with standard normal entries.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| gaussian_vector(rng, cols)).collect()
}

/// `m` random combinations of two symmetric generators and one positive
/// definite generator: rank at most 3 with a positive definite combination.
pub fn random_rank3_set<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> MatrixSet {
    let mut gens: Vec<SymMatrix> = (0..2).map(|_| random_symmetric(rng, n)).collect();
    gens.push(random_positive_definite(rng, n, 0.2));
    let r = random_grid(rng, m, 3);
    generate(&r, &MatrixSet::new(gens).expect("generators share an order")).expect("three coefficients per row")
}

/// Two-sided instance with a positive definite first constraint and bounds
/// placed around a Gaussian point, which is therefore strictly feasible.
pub fn random_hqpb<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HqpbInstance {
    let objective = random_symmetric(rng, n);
    let first = random_positive_definite(rng, n, 0.3);
    let second = random_symmetric(rng, n);
    let x0 = gaussian_vector(rng, n);
    let v1 = quad_form_unchecked(&first, &x0);
    let v2 = quad_form_unchecked(&second, &x0);
    let lo1 = v1 * (1.0 - 0.5 * rng.random::<f64>());
    let hi1 = v1 * (1.1 + rng.random::<f64>());
    let lo2 = v2 - 0.1 - rng.random::<f64>();
    let hi2 = v2 + 0.1 + rng.random::<f64>();
    HqpbInstance {
        objective,
        first,
        first_bounds: [lo1, hi1],
        second,
        second_bounds: [lo2, hi2],
        slater_point: None,
    }
}

/// Inequality instance with `m ≤ 2` positive definite constraints at positive
/// levels (the origin is strictly feasible) and a random objective.
pub fn random_slemma<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> SLemmaInstance {
    let objective = random_symmetric(rng, n);
    let objective_level = 1.0 - 6.0 * rng.random::<f64>();
    let constraints = (0..m).map(|_| random_positive_definite(rng, n, 0.3)).collect();
    let levels = (0..m).map(|_| 0.5 + rng.random::<f64>()).collect();
    SLemmaInstance {
        objective,
        objective_level,
        constraints,
        levels,
        variant: Variant::Inequality,
        slater_point: None,
    }
}
