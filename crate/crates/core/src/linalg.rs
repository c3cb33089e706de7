//! Dense symmetric linear algebra.
//!
//! Everything in this crate works on small dense symmetric matrices (n ≤ 64),
//! so the module keeps to plain row-major storage and a cyclic Jacobi
//! eigensolver. Tolerances are relative and scaled by `1 + ‖·‖_F`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 64;
/// Default relative tolerance for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-9;
/// Default relative tolerance for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;
/// Orthonormality tolerance for subspace bases.
pub const ORTHO_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Returns `a / ‖a‖`, or `None` for a (numerically) zero vector.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= f64::MIN_POSITIVE.sqrt() {
        None
    } else {
        Some(a.iter().map(|x| x / n).collect())
    }
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s·b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Cross product in ℝ³.
pub fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Flips the sign so the first entry that is not negligible is positive.
pub fn sign_normalize(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Angle in radians between the lines spanned by `a` and `b` (in `[0, π/2]`).
pub fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let c = (dot(a, b).abs() / (na * nb)).min(1.0);
    // acos is ill-conditioned near 1, use the sine of the angle instead
    let s2 = (1.0 - c * c).max(0.0);
    let sin_from_cross = {
        let proj = scaled(b, dot(a, b) / (nb * nb));
        norm(&axpy(a, -1.0, &proj)) / na
    };
    if s2 < 1e-4 {
        sin_from_cross.min(1.0).asin()
    } else {
        c.acos()
    }
}

/// Dense real symmetric matrix stored in full row-major form.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, v) in d.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// Builds `(F + Fᵀ)/2` from the entry function `F`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = if i == j { f(i, i) } else { 0.5 * (f(i, j) + f(j, i)) };
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Parses a square array, symmetrizing it. Rejects ragged, non-finite or oversized input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "matrix dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        for r in rows {
            check_dim(n, r.len())?;
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite matrix entry".into()));
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Largest `|A_ij − A_ji|` of a raw square array.
    pub fn max_asymmetry(rows: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if let Some(o) = rows.get(j).and_then(|row| row.get(i)) {
                    worst = worst.max((v - o).abs());
                }
            }
        }
        worst
    }

    /// `x xᵀ`
    pub fn outer(x: &[f64]) -> Self {
        Self::from_fn(x.len(), |i, j| x[i] * x[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Trace inner product `⟨A, B⟩`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        dot(&self.data, &other.data)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// Quadratic form `xᵀ M x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    /// Bilinear form `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self + s·other`
    pub fn axpy(&self, s: f64, other: &SymMatrix) -> Self {
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    /// `self + s·x xᵀ`
    pub fn add_outer(&self, s: f64, x: &[f64]) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i * self.n + j] += s * x[i] * x[j];
            }
        }
        m
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.frobenius() <= tol
    }

    /// Congruence `Tᵀ M T` for a (not necessarily square) matrix `T` given by columns.
    pub fn congruence(&self, cols: &[Vec<f64>]) -> SymMatrix {
        let mcols: Vec<Vec<f64>> = cols.iter().map(|c| self.matvec(c)).collect();
        SymMatrix::from_fn(cols.len(), |i, j| dot(&cols[i], &mcols[j]))
    }

    /// Direct sum `self ⊕ other` (block diagonal).
    pub fn direct_sum(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.n + other.n;
        let mut m = SymMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.data[(self.n + i) * n + self.n + j] = other.get(i, j);
            }
        }
        m
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, s: f64) -> SymMatrix {
        self.scale(s)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scale(-1.0)
    }
}

/// `Sym(a bᵀ) = (a bᵀ + b aᵀ)/2`
pub fn sym_outer(a: &[f64], b: &[f64]) -> SymMatrix {
    assert_eq!(a.len(), b.len(), "sym_outer: length mismatch");
    SymMatrix::from_fn(a.len(), |i, j| 0.5 * (a[i] * b[j] + b[i] * a[j]))
}

/// A linear subspace of ℝⁿ given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub n: usize,
    pub basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    /// Orthonormalizes `vectors` (modified Gram–Schmidt with reorthogonalization),
    /// dropping directions whose residual falls below `tol` relative to the input norm.
    pub fn span(n: usize, vectors: &[Vec<f64>], tol: f64) -> Self {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            let scale = norm(v);
            if scale == 0.0 {
                continue;
            }
            let mut r = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&r, b);
                    r = axpy(&r, -c, b);
                }
            }
            if norm(&r) > tol * scale {
                basis.push(normalized(&r).expect("nonzero residual"));
            }
        }
        Subspace { n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        for b in &self.basis {
            p = axpy(&p, dot(x, b), b);
        }
        p
    }

    /// Coordinates of `x` in the basis (`Uᵀx`).
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// Maps coordinates back to ℝⁿ (`U c`).
    pub fn embed(&self, c: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (ci, b) in c.iter().zip(&self.basis) {
            x = axpy(&x, *ci, b);
        }
        x
    }

    /// Lifts a k×k matrix on the subspace to `U Y Uᵀ` on ℝⁿ.
    pub fn lift(&self, y: &SymMatrix) -> SymMatrix {
        let k = self.dim();
        assert_eq!(y.n(), k);
        let mut m = SymMatrix::zeros(self.n);
        for a in 0..k {
            for b in 0..k {
                let v = y.get(a, b);
                if v == 0.0 {
                    continue;
                }
                for i in 0..self.n {
                    let ui = self.basis[a][i] * v;
                    for j in 0..self.n {
                        m.data[i * self.n + j] += ui * self.basis[b][j];
                    }
                }
            }
        }
        m
    }

    /// Orthogonal complement in ℝⁿ.
    pub fn complement(&self) -> Subspace {
        let mut candidates = self.basis.clone();
        candidates.extend((0..self.n).map(|i| unit(self.n, i)));
        let all = Subspace::span(self.n, &candidates, 1e-8);
        Subspace {
            n: self.n,
            basis: all.basis[self.dim()..].to_vec(),
        }
    }

    /// `W ∩ a⊥` for this subspace `W`.
    pub fn intersect_perp(&self, a: &[f64]) -> Subspace {
        let k = self.dim();
        if k == 0 {
            return self.clone();
        }
        // coordinates c with (Uc)·a = 0
        let g = self.coords(a);
        let Some(gn) = normalized(&g) else {
            return self.clone();
        };
        let coords_space = Subspace::span(k, &[gn], 1e-12).complement();
        Subspace {
            n: self.n,
            basis: coords_space
                .basis
                .iter()
                .map(|c| {
                    let v = self.embed(c);
                    normalized(&v).unwrap_or(v)
                })
                .collect(),
        }
    }

    /// Worst deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

/// Spectral decomposition with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigDecomp {
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for (l, v) in self.values.iter().zip(&self.vectors) {
            m = m.add_outer(*l, v);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, l| m.max(l.abs()))
    }

    /// Threshold separating numerically nonzero eigenvalues.
    pub fn rank_threshold(&self, tol_scale: f64) -> f64 {
        tol_scale * self.max_abs().max(1.0)
    }

    pub fn rank(&self, tol_scale: f64) -> usize {
        let thr = self.rank_threshold(tol_scale);
        self.values.iter().filter(|l| l.abs() > thr).count()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn max(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }
}

/// Cyclic Jacobi eigendecomposition.
#[allow(clippy::needless_range_loop)]
pub fn eig(m: &SymMatrix) -> Result<EigDecomp> {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = m.rows();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect(); // v[row][col]
    let fro = m.frobenius();
    let target = JACOBI_OFF_TOL * fro;

    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                if t == 0.0 {
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    Ok(EigDecomp { values, vectors })
}

/// Count of eigenvalues with `|λ| > tol_scale · max(1, |λ|_max)`.
pub fn numerical_rank(m: &SymMatrix, tol_scale: f64) -> usize {
    match eig(m) {
        Ok(e) => e.rank(tol_scale),
        Err(_) => m.n(),
    }
}

fn split_bases(m: &SymMatrix, tol_scale: f64) -> Result<(Subspace, Subspace)> {
    let e = eig(m)?;
    let thr = e.rank_threshold(tol_scale);
    let n = m.n();
    let mut range = Vec::new();
    let mut kernel = Vec::new();
    for (l, v) in e.values.iter().zip(e.vectors) {
        if l.abs() > thr {
            range.push(v);
        } else {
            kernel.push(v);
        }
    }
    Ok((Subspace { n, basis: range }, Subspace { n, basis: kernel }))
}

/// Orthonormal basis of `range(M)` at the default rank tolerance.
pub fn range_basis(m: &SymMatrix) -> Result<Subspace> {
    split_bases(m, RANK_TOL).map(|(r, _)| r)
}

/// Orthonormal basis of `ker(M)` at the default rank tolerance.
pub fn kernel_basis(m: &SymMatrix) -> Result<Subspace> {
    split_bases(m, RANK_TOL).map(|(_, k)| k)
}

/// `M_W = Uᵀ M U` for the inclusion `U : W → ℝⁿ`.
pub fn restrict(m: &SymMatrix, w: &Subspace) -> Result<SymMatrix> {
    check_dim(m.n(), w.n)?;
    Ok(m.congruence(&w.basis))
}

pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    match eig(m) {
        Ok(e) => e.min() >= -tol * (1.0 + m.frobenius()),
        Err(_) => false,
    }
}

pub fn is_pd(m: &SymMatrix, tol: f64) -> bool {
    match eig(m) {
        Ok(e) => e.min() > tol * (1.0 + m.frobenius()),
        Err(_) => false,
    }
}

/// Largest `t` with `X − t·x xᵀ` positive semidefinite, for psd `X` and `x ∈ range(X)`.
pub fn peel_max_step(x_mat: &SymMatrix, x: &[f64]) -> Result<f64> {
    check_dim(x_mat.n(), x.len())?;
    let e = eig(x_mat)?;
    peel_step_from(&e, x)
}

pub(crate) fn peel_step_from(e: &EigDecomp, x: &[f64]) -> Result<f64> {
    let thr = e.rank_threshold(RANK_TOL);
    let xn = norm(x);
    let mut inv_quad = 0.0;
    let mut proj = vec![0.0; x.len()];
    for (l, v) in e.values.iter().zip(&e.vectors) {
        if *l > thr {
            let c = dot(v, x);
            inv_quad += c * c / l;
            proj = axpy(&proj, c, v);
        }
    }
    let residual = norm(&axpy(x, -1.0, &proj));
    if xn == 0.0 || residual > 1e-8 * xn || inv_quad <= 0.0 {
        return Err(Error::NotInRange { residual });
    }
    Ok(1.0 / inv_quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);

        let e = eig(&SymMatrix::diag(&[1.0, -1.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 0.0, -1.0]);
        assert!(close(e.vectors[0][0].abs(), 1.0, 1e-15));
        assert!(close(e.vectors[1][2].abs(), 1.0, 1e-15));
        assert!(close(e.vectors[2][1].abs(), 1.0, 1e-15));
    }

    #[test]
    fn eig_sym_outer_two_by_two() {
        let m = sym_outer(&[1.0, 0.0], &[0.0, 1.0]);
        let e = eig(&m).unwrap();
        assert!(close(e.values[0], 0.5, 1e-15));
        assert!(close(e.values[1], -0.5, 1e-15));
        let r = 0.5f64.sqrt();
        assert!(close(dot(&e.vectors[0], &[r, r]).abs(), 1.0, 1e-12));
        assert!(close(dot(&e.vectors[1], &[r, -r]).abs(), 1.0, 1e-12));
        assert!((&e.reconstruct() - &m).frobenius() < 1e-14);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&SymMatrix::diag(&[1.0, -1.0, 0.0]), RANK_TOL), 2);
        assert_eq!(numerical_rank(&SymMatrix::zeros(4), RANK_TOL), 0);
        let w = [1.0, 1.0, 2f64.sqrt()];
        let z = [-1.0, 1.0, 0.0];
        let x = SymMatrix::outer(&w).add_outer(1.0, &z);
        assert_eq!(numerical_rank(&x, RANK_TOL), 2);
    }

    #[test]
    fn range_and_kernel() {
        let r = range_basis(&SymMatrix::diag(&[1.0, 0.0, 0.0])).unwrap();
        let k = kernel_basis(&SymMatrix::diag(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(k.dim(), 2);
        assert!(close(r.basis[0][0].abs(), 1.0, 1e-15));

        assert_eq!(range_basis(&SymMatrix::identity(4)).unwrap().dim(), 4);
        assert_eq!(kernel_basis(&SymMatrix::identity(4)).unwrap().dim(), 0);

        let m = sym_outer(&unit(3, 0), &unit(3, 1));
        let r = range_basis(&m).unwrap();
        let k = kernel_basis(&m).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(k.dim(), 1);
        assert!(close(k.basis[0][2].abs(), 1.0, 1e-12));
    }

    #[test]
    fn restrict_examples() {
        let w = Subspace::span(3, &[unit(3, 0), unit(3, 1)], 1e-12);
        assert_eq!(restrict(&SymMatrix::identity(3), &w).unwrap(), SymMatrix::identity(2));

        let w = Subspace::span(3, &[unit(3, 2)], 1e-12);
        let r = restrict(&SymMatrix::diag(&[1.0, -1.0, 0.0]), &w).unwrap();
        assert_eq!(r, SymMatrix::zeros(1));

        let h = 0.5f64.sqrt();
        let w = Subspace::span(2, &[vec![h, h]], 1e-12);
        let r = restrict(&sym_outer(&unit(2, 0), &unit(2, 1)), &w).unwrap();
        assert!(close(r.get(0, 0), 0.5, 1e-15));
        // scaled by √2 on each side the form value is 1
        let w2 = [1.0, 1.0];
        assert!(close(sym_outer(&unit(2, 0), &unit(2, 1)).quad(&w2), 1.0, 1e-15));
    }

    #[test]
    fn psd_tests() {
        assert!(is_psd(&SymMatrix::identity(2), PSD_TOL));
        assert!(is_pd(&SymMatrix::identity(2), PSD_TOL));
        assert!(!is_psd(&SymMatrix::diag(&[1.0, -1.0]), PSD_TOL));
        assert!(is_psd(&SymMatrix::diag(&[0.0, 1.0]), PSD_TOL));
        assert!(!is_pd(&SymMatrix::diag(&[0.0, 1.0]), PSD_TOL));
    }

    #[test]
    fn sym_outer_examples() {
        assert_eq!(sym_outer(&unit(2, 0), &unit(2, 0)), SymMatrix::diag(&[1.0, 0.0]));
        let m = sym_outer(&unit(3, 0), &unit(3, 1));
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.5);
        assert_eq!(m.get(0, 0), 0.0);
        let m = sym_outer(&[1.0, 1.0], &[1.0, -1.0]);
        assert_eq!(m, SymMatrix::diag(&[1.0, -1.0]));
    }

    #[test]
    fn peel_examples() {
        assert!(close(
            peel_max_step(&SymMatrix::identity(2), &[1.0, 0.0]).unwrap(),
            1.0,
            1e-15
        ));
        let x = SymMatrix::diag(&[2.0, 0.0]);
        assert!(close(peel_max_step(&x, &[1.0, 0.0]).unwrap(), 2.0, 1e-15));
        let h = 0.5f64.sqrt();
        assert!(close(
            peel_max_step(&SymMatrix::identity(2), &[h, h]).unwrap(),
            1.0,
            1e-15
        ));
        assert!(matches!(peel_max_step(&x, &[0.0, 1.0]), Err(Error::NotInRange { .. })));
    }

    #[test]
    fn subspace_helpers() {
        let w = Subspace::full(3).intersect_perp(&[0.0, 0.0, 2.0]);
        assert_eq!(w.dim(), 2);
        assert!(w.basis.iter().all(|b| b[2].abs() < 1e-15));
        assert!(w.orthonormality_error() < 1e-14);
        let c = w.complement();
        assert_eq!(c.dim(), 1);
        assert!(close(c.basis[0][2].abs(), 1.0, 1e-12));
        assert!(line_angle(&[1.0, 0.0], &[1.0, 1e-9]) > 0.9e-9);
    }
}
