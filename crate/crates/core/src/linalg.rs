//! Symmetric matrices, quadratic forms, the Jacobi eigensolver and subspace
//! cones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        Some(v.iter().map(|x| x / n).collect())
    } else {
        None
    }
}

/// Real symmetric matrix stored by its upper triangle, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.put(i, i, *v);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymMatrix { n, upper }
    }

    /// Reads a row-major square grid, requiring exact symmetry up to `tol`
    /// (see [`symmetrize`]).
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        symmetrize(rows, tol)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed_index(self.n, i, j)]
    }

    fn put(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub(crate) fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::dims("matrix sum", self.n, other.n));
        }
        Ok(SymMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// `Σ c_j M_j`. All members must share the order `n`.
    pub fn combination(n: usize, coeffs: &[f64], mats: &[SymMatrix]) -> Result<Self> {
        if coeffs.len() != mats.len() {
            return Err(Error::dims("linear combination", mats.len(), coeffs.len()));
        }
        let mut out = Self::zeros(n);
        for (c, m) in coeffs.iter().zip(mats) {
            if m.n != n {
                return Err(Error::dims("linear combination", n, m.n));
            }
            for (o, v) in out.upper.iter_mut().zip(&m.upper) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::dims("matrix-vector product", self.n, x.len()));
        }
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
        Ok(y)
    }

    /// `blockdiag(self, 0_extra)`.
    pub fn pad_zeros(&self, extra: usize) -> Self {
        let n = self.n;
        Self::from_fn(n + extra, |i, j| if j < n { self.get(i, j) } else { 0.0 })
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        symmetrize(&rows, 1e-8).map_err(serde::de::Error::custom)
    }
}

/// Returns `(raw + rawᵀ)/2`, rejecting grids whose asymmetry exceeds
/// `tol·(1 + max|raw_ij|)`.
pub fn symmetrize(raw: &[Vec<f64>], tol: f64) -> Result<SymMatrix> {
    let n = raw.len();
    if n == 0 {
        return Err(Error::InvalidInput("matrix must have order at least 1".into()));
    }
    let mut max_abs: f64 = 0.0;
    for row in raw {
        if row.len() != n {
            return Err(Error::dims("square matrix rows", n, row.len()));
        }
        for v in row {
            if !v.is_finite() {
                return Err(Error::NonFinite("matrix entry"));
            }
            max_abs = max_abs.max(v.abs());
        }
    }
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            deviation = deviation.max((raw[i][j] - raw[j][i]).abs());
        }
    }
    let allowed = tol * (1.0 + max_abs);
    if deviation > allowed {
        return Err(Error::Asymmetry { deviation, allowed });
    }
    Ok(SymMatrix::from_fn(n, |i, j| 0.5 * (raw[i][j] + raw[j][i])))
}

/// `xᵀAx`.
pub fn quad_form(a: &SymMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.n {
        return Err(Error::dims("quadratic form", a.n, x.len()));
    }
    Ok(quad_form_unchecked(a, x))
}

pub(crate) fn quad_form_unchecked(a: &SymMatrix, x: &[f64]) -> f64 {
    let n = a.n;
    let mut s = 0.0;
    let mut k = 0;
    for i in 0..n {
        s += a.upper[k] * x[i] * x[i];
        k += 1;
        let mut row = 0.0;
        for j in i + 1..n {
            row += a.upper[k] * x[j];
            k += 1;
        }
        s += 2.0 * x[i] * row;
    }
    s
}

/// Eigenpairs of a symmetric matrix: ascending values, orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn min_vector(&self) -> &[f64] {
        &self.vectors[0]
    }

    /// `‖V·diag(λ)·Vᵀ − A‖_F`.
    pub fn reconstruction_residual(&self, a: &SymMatrix) -> f64 {
        let n = a.order();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut r = -a.get(i, j);
                for (lam, v) in self.values.iter().zip(&self.vectors) {
                    r += lam * v[i] * v[j];
                }
                s += r * r;
            }
        }
        s.sqrt()
    }

    /// `‖VᵀV − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        let k = self.vectors.len();
        let mut s = 0.0;
        for a in 0..k {
            for b in 0..k {
                let d = dot(&self.vectors[a], &self.vectors[b]) - if a == b { 1.0 } else { 0.0 };
                s += d * d;
            }
        }
        s.sqrt()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn eig_sym(a: &SymMatrix) -> Result<EigenDecomposition> {
    eig_sym_with(a, crate::Tolerances::default().tol_eig)
}

/// As [`eig_sym`], failing when the off-diagonal norm is still above
/// `tol_eig·(1+‖A‖_F)` once the sweep budget is spent.
pub fn eig_sym_with(a: &SymMatrix, tol_eig: f64) -> Result<EigenDecomposition> {
    if !a.is_finite() {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    jacobi(a.order(), a.to_dense(), a.frobenius_norm(), tol_eig)
}

pub(crate) fn eig_dense(n: usize, a: Vec<f64>) -> EigenDecomposition {
    let fro = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    match jacobi(n, a, fro, f64::INFINITY) {
        Ok(e) => e,
        Err(_) => unreachable!("infinite failure threshold"),
    }
}

fn off_norm(n: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

fn jacobi(n: usize, mut a: Vec<f64>, fro: f64, tol_eig: f64) -> Result<EigenDecomposition> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = f64::EPSILON * fro;
    let mut sweeps = 0;
    let mut off = off_norm(n, &a);
    while off > target && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // rotation is below rounding of the diagonal
                if apq.abs() < 1e-3 * f64::EPSILON * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
        off = off_norm(n, &a);
    }
    if off > target && off > tol_eig * (1.0 + fro) {
        return Err(Error::Convergence {
            sweeps,
            off_norm: off,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|r| v[r * n + k]).collect();
            orient(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
pub(crate) fn orient(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Regular cone represented by an orthonormal basis `Q` of `K ∪ (−K)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceCone {
    ambient: usize,
    /// Columns of `Q`.
    basis: Vec<Vec<f64>>,
}

impl SubspaceCone {
    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        SubspaceCone { ambient: n, basis }
    }

    /// Accepts columns that are already orthonormal to `tol`.
    pub fn from_orthonormal(ambient: usize, columns: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        for c in &columns {
            if c.len() != ambient {
                return Err(Error::dims("cone basis column", ambient, c.len()));
            }
        }
        if columns.len() > ambient {
            return Err(Error::InvalidInput(format!(
                "{} basis columns exceed the ambient dimension {ambient}",
                columns.len()
            )));
        }
        for (a, ca) in columns.iter().enumerate() {
            for (b, cb) in columns.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                if (dot(ca, cb) - target).abs() > tol {
                    return Err(Error::InvalidInput("cone basis is not orthonormal".into()));
                }
            }
        }
        Ok(SubspaceCone {
            ambient,
            basis: columns,
        })
    }

    /// Orthonormalizes an arbitrary spanning set; vectors that add less than
    /// `tol` relative to the largest input norm are dropped.
    pub fn from_spanning(ambient: usize, vectors: &[Vec<f64>], tol: f64) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::dims("cone spanning vector", ambient, v.len()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("cone spanning vector"));
            }
        }
        Ok(SubspaceCone {
            ambient,
            basis: orthonormal_basis(vectors, tol),
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// `Q y`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient];
        for (yi, col) in y.iter().zip(&self.basis) {
            axpy(*yi, col, &mut x);
        }
        x
    }

    /// `Qᵀ x`.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|c| dot(c, x)).collect()
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let p = self.embed(&self.coordinates(x));
        x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// `QᵀAQ`.
pub fn restrict(a: &SymMatrix, cone: &SubspaceCone) -> Result<SymMatrix> {
    if cone.ambient != a.order() {
        return Err(Error::dims("restriction to cone", a.order(), cone.ambient));
    }
    let aq: Vec<Vec<f64>> = cone
        .basis
        .iter()
        .map(|c| a.mul_vec(c))
        .collect::<Result<_>>()?;
    Ok(SymMatrix::from_fn(cone.dim(), |i, j| dot(&cone.basis[i], &aq[j])))
}

/// Modified Gram–Schmidt with greedy pivoting on the largest residual.
pub(crate) fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let max_norm = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Vec::new();
    }
    let mut residual: Vec<Vec<f64>> = vectors.to_vec();
    let mut used = vec![false; vectors.len()];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in residual.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nr = norm(r);
            if best.is_none_or(|(_, b)| nr > b * (1.0 + 1e-12)) {
                best = Some((i, nr));
            }
        }
        let Some((i, nr)) = best else { break };
        if nr <= tol * max_norm {
            break;
        }
        used[i] = true;
        let q: Vec<f64> = residual[i].iter().map(|x| x / nr).collect();
        for (j, r) in residual.iter_mut().enumerate() {
            if !used[j] {
                let c = dot(&q, r);
                axpy(-c, &q, r);
            }
        }
        basis.push(q);
    }
    // one reorthogonalization pass
    for k in 0..basis.len() {
        let (done, rest) = basis.split_at_mut(k);
        let q = &mut rest[0];
        for p in done.iter() {
            let c = dot(p, q);
            axpy(-c, p, q);
        }
        let nq = norm(q);
        q.iter_mut().for_each(|x| *x /= nq);
    }
    basis
}

/// Orthonormal basis of `{v : r·v = 0 for all rows r}`. Columns are taken
/// greedily from the coordinate axes with the largest residual, lowest index
/// first on ties.
pub(crate) fn null_space(n: usize, rows: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let row_basis = orthonormal_basis(rows, tol);
    let target = n - row_basis.len();
    let mut residual: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            for q in &row_basis {
                let c = dot(q, &e);
                axpy(-c, q, &mut e);
            }
            e
        })
        .collect();
    let mut used = vec![false; n];
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(target);
    while out.len() < target {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in residual.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nr = norm(r);
            if best.is_none_or(|(_, b)| nr > b + 1e-12) {
                best = Some((i, nr));
            }
        }
        let Some((i, nr)) = best else { break };
        if nr < 1e-12 {
            break;
        }
        used[i] = true;
        let mut q: Vec<f64> = residual[i].iter().map(|x| x / nr).collect();
        for p in row_basis.iter().chain(out.iter()) {
            let c = dot(p, &q);
            axpy(-c, p, &mut q);
        }
        let nq = norm(&q);
        q.iter_mut().for_each(|x| *x /= nq);
        for (j, r) in residual.iter_mut().enumerate() {
            if !used[j] {
                let c = dot(&q, r);
                axpy(-c, &q, r);
            }
        }
        out.push(q);
    }
    out
}
