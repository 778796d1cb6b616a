//! Generation relations among symmetric matrices: rank, basis selection and
//! coefficient recovery, plus transfer of positive definite combinations
//! between bases of the same span.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, SymMatrix};
use crate::Tolerances;

/// Ordered, nonempty list of symmetric matrices of a common order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MatrixSet {
    members: Vec<SymMatrix>,
}

impl MatrixSet {
    pub fn new(members: Vec<SymMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidInput("matrix set must be nonempty".into()));
        };
        let n = first.order();
        for m in &members {
            if m.order() != n {
                return Err(Error::dims("matrix set member order", n, m.order()));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite("matrix set member"));
            }
        }
        Ok(MatrixSet { members })
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn members(&self) -> &[SymMatrix] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &SymMatrix {
        &self.members[i]
    }

    pub fn into_members(self) -> Vec<SymMatrix> {
        self.members
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BasisResult {
    pub rank: usize,
    pub basis_indices: Vec<usize>,
    /// `coefficients[i][j]` is the weight of member `basis_indices[j]` in member `i`.
    pub coefficients: Vec<Vec<f64>>,
    /// Set when some rejected pivot came within a factor of ten of the threshold.
    pub marginal: bool,
}

impl BasisResult {
    pub fn basis_members(&self, set: &MatrixSet) -> Vec<SymMatrix> {
        self.basis_indices.iter().map(|&i| set.get(i).clone()).collect()
    }

    /// Largest `‖B_i − Σ_j R_ij A_j‖_F` over the set.
    pub fn reconstruction_residual(&self, set: &MatrixSet) -> f64 {
        let basis = self.basis_members(set);
        set.members()
            .iter()
            .zip(&self.coefficients)
            .map(|(b, r)| {
                let g = SymMatrix::combination(set.order(), r, &basis)
                    .expect("coefficients match basis length");
                b.sub(&g).expect("common order").frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Flattens the upper triangle with off-diagonals scaled by √2, so the flat
/// inner product equals the Frobenius inner product.
pub fn vectorize(a: &SymMatrix) -> Vec<f64> {
    let n = a.order();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let v = a.get(i, j);
            out.push(if i == j { v } else { std::f64::consts::SQRT_2 * v });
        }
    }
    out
}

/// Rank, basis members and coefficients by Gaussian elimination with partial
/// pivoting over the vectorized members, processed in input order.
pub fn rank_and_basis(set: &MatrixSet, tol: &Tolerances) -> BasisResult {
    let cols: Vec<Vec<f64>> = set.members().iter().map(vectorize).collect();
    let (basis_indices, marginal) = eliminate(&cols, tol.tol_rank);

    let basis_cols: Vec<Vec<f64>> = basis_indices.iter().map(|&i| cols[i].clone()).collect();
    let coefficients = cols
        .iter()
        .enumerate()
        .map(|(i, c)| match basis_indices.iter().position(|&b| b == i) {
            Some(p) => {
                let mut e = vec![0.0; basis_indices.len()];
                e[p] = 1.0;
                e
            }
            None => least_squares_coefficients(&basis_cols, c),
        })
        .collect();

    BasisResult {
        rank: basis_indices.len(),
        basis_indices,
        coefficients,
        marginal,
    }
}

/// Column indices accepted as pivots, in input order, and whether a rejected
/// pivot came within a factor of ten of the threshold.
fn eliminate(cols: &[Vec<f64>], tol_rank: f64) -> (Vec<usize>, bool) {
    let m = cols.len();
    let d = cols.first().map_or(0, Vec::len);
    let scale = cols.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max);
    let threshold = tol_rank * scale;

    let mut work = cols.to_vec();
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut basis_indices = Vec::new();
    let mut marginal = false;
    for j in 0..m {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..d {
            if pivot_rows.contains(&i) {
                continue;
            }
            let v = work[j][i].abs();
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let Some((r, mag)) = best else { continue };
        if scale == 0.0 || mag <= threshold {
            if scale > 0.0 && mag > 0.1 * threshold {
                marginal = true;
            }
            continue;
        }
        let pivot = work[j][r];
        for c in j + 1..m {
            let f = work[c][r] / pivot;
            if f != 0.0 {
                for i in 0..d {
                    if !pivot_rows.contains(&i) {
                        work[c][i] -= f * work[j][i];
                    }
                }
                work[c][r] = 0.0;
            }
        }
        pivot_rows.push(r);
        basis_indices.push(j);
    }
    (basis_indices, marginal)
}

/// Numerical rank of a list of vectors by the same elimination used for
/// matrix sets.
pub fn vector_rank(vectors: &[Vec<f64>], tol_rank: f64) -> usize {
    eliminate(vectors, tol_rank).0.len()
}

/// Coefficients `c` minimizing `‖Σ c_j basis_j − target‖` via modified
/// Gram–Schmidt QR of the basis columns. The basis must be independent.
fn least_squares_coefficients(basis: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let k = basis.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, col) in basis.iter().enumerate() {
        let mut v = col.clone();
        for (p, qp) in q.iter().enumerate() {
            let c = dot(qp, &v);
            r[p][j] += c;
            crate::linalg::axpy(-c, qp, &mut v);
        }
        // reorthogonalize once
        for (p, qp) in q.iter().enumerate() {
            let c = dot(qp, &v);
            r[p][j] += c;
            crate::linalg::axpy(-c, qp, &mut v);
        }
        let nv = dot(&v, &v).sqrt();
        r[j][j] = nv;
        q.push(v.iter().map(|x| x / nv).collect());
    }
    let qt: Vec<f64> = q.iter().map(|qj| dot(qj, target)).collect();
    let mut c = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = qt[j];
        for l in j + 1..k {
            s -= r[j][l] * c[l];
        }
        c[j] = s / r[j][j];
    }
    c
}

/// Expresses each of `members` in the (independent) `basis`:
/// `members[i] ≈ Σ_j a[i][j]·basis[j]`.
pub fn express_in_basis(members: &[SymMatrix], basis: &[SymMatrix]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = basis.first() else {
        return Ok(vec![Vec::new(); members.len()]);
    };
    let n = first.order();
    for m in members.iter().chain(basis) {
        if m.order() != n {
            return Err(Error::dims("basis expression", n, m.order()));
        }
    }
    let cols: Vec<Vec<f64>> = basis.iter().map(vectorize).collect();
    Ok(members
        .iter()
        .map(|m| least_squares_coefficients(&cols, &vectorize(m)))
        .collect())
}

/// Member `i` of the result is `Σ_j R[i][j]·basis_j`.
pub fn generate(coefficients: &[Vec<f64>], basis: &MatrixSet) -> Result<MatrixSet> {
    let n = basis.order();
    let members = coefficients
        .iter()
        .map(|row| {
            if row.len() != basis.len() {
                return Err(Error::dims("generation coefficients", basis.len(), row.len()));
            }
            SymMatrix::combination(n, row, basis.members())
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixSet::new(members)
}

/// Moves a combination vector from one basis to another: if
/// `A_i = Σ_j a[i][j]·Ā_j` then `Σ s_i A_i = Σ s'_j Ā_j` with
/// `s'_j = Σ_i s_i a[i][j]`.
pub fn transfer_pd(s: &[f64], change: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = s.len();
    if change.len() != k {
        return Err(Error::dims("basis change rows", k, change.len()));
    }
    for row in change {
        if row.len() != k {
            return Err(Error::dims("basis change columns", k, row.len()));
        }
    }
    Ok((0..k)
        .map(|j| (0..k).map(|i| s[i] * change[i][j]).sum())
        .collect())
}
