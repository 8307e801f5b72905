//! Dense complex matrix kernel.
//!
//! [`ComplexMatrix`] wraps a `nalgebra` dense matrix of `Complex<f64>` and adds the handful of
//! operations the rest of the crate needs: projection tests, Hermitian eigendecomposition,
//! nullspaces by singular-value thresholding, the normalised Hilbert–Schmidt inner product,
//! seeded Haar-random unitaries and geodesics in the unitary group.
//!
//! Operator norms are always the largest singular value. Frobenius norms appear only as cheap
//! upper bounds, and in the nullspace threshold.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Absolute and rank tolerances shared by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Operator-norm tolerance for identities such as `p^2 = p`.
    pub atol: f64,
    /// Relative singular-value threshold for rank and nullspace decisions.
    pub rank_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { atol: 1e-9, rank_tol: 1e-7 }
    }
}

impl TolerancePolicy {
    pub fn new(atol: f64, rank_tol: f64) -> Result<Self> {
        let policy = TolerancePolicy { atol, rank_tol };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return Err(Error::InvalidInput(format!("atol must be positive, got {}", self.atol)));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rank_tol must be positive, got {}",
                self.rank_tol
            )));
        }
        if self.rank_tol < self.atol {
            return Err(Error::InvalidInput(format!(
                "rank_tol ({}) must not be smaller than atol ({})",
                self.rank_tol, self.atol
            )));
        }
        Ok(())
    }
}

/// A dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})[", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.4}{:+.4}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &data)))
    }

    /// Real matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
        ComplexMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_complex_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
        ComplexMatrix::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Column vector from its entries.
    pub fn column(entries: &[C64]) -> Self {
        ComplexMatrix(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    /// Rank-one orthogonal projection onto the line spanned by `v`.
    pub fn projection_onto(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= f64::MIN_POSITIVE {
            return Err(Error::InvalidInput("cannot project onto the zero vector".into()));
        }
        let n = v.len();
        Ok(ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / norm2))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column_vec(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexMatrix(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(self.0.kronecker(&other.0))
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &ComplexMatrix) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let mut out = DMatrix::zeros(r1 + other.rows(), c1 + other.cols());
        out.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        out.view_mut((r1, c1), (other.rows(), other.cols())).copy_from(&other.0);
        ComplexMatrix(out)
    }

    /// Copy of the block with top-left corner `(row, col)`.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        ComplexMatrix(self.0.view((row, col), (rows, cols)).into_owned())
    }

    /// Columns `start..start+count`.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        ComplexMatrix(self.0.columns(start, count).into_owned())
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[ComplexMatrix]) -> Result<Self> {
        let rows = parts.first().map_or(0, |p| p.rows());
        if parts.iter().any(|p| p.rows() != rows) {
            return Err(Error::DimensionMismatch("hstack with differing row counts".into()));
        }
        let cols = parts.iter().map(|p| p.cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            out.view_mut((0, at), (rows, p.cols())).copy_from(&p.0);
            at += p.cols();
        }
        Ok(ComplexMatrix(out))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Trace divided by the dimension, so that the identity has trace one.
    pub fn normalized_trace(&self) -> C64 {
        self.trace() / self.rows() as f64
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        let frob = self.frobenius_norm();
        if frob == 0.0 {
            return 0.0;
        }
        self.0.singular_values().max()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `‖M*M − 1‖` in operator norm.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = ComplexMatrix(self.0.adjoint() * &self.0);
        (&gram - &ComplexMatrix::identity(self.rows())).op_norm()
    }

    /// `‖M − M*‖` in operator norm.
    pub fn self_adjoint_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).op_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data: self.row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let data = repr.data.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(repr.rows, repr.cols, data).map_err(D::Error::custom)
    }
}

/// Tracks the largest operator norm over many matrices, using the Frobenius norm to skip
/// singular value decompositions that cannot raise the maximum.
#[derive(Clone, Copy, Debug, Default)]
pub struct WorstNorm {
    pub value: f64,
}

impl WorstNorm {
    /// Offers a candidate; returns its operator norm when it was computed.
    pub fn offer(&mut self, m: &ComplexMatrix) -> Option<f64> {
        let frob = m.frobenius_norm();
        if frob <= self.value {
            return None;
        }
        let op = m.op_norm();
        if op > self.value {
            self.value = op;
        }
        Some(op)
    }
}

pub fn projection_defect(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let idempotent = (&(m * m) - m).op_norm();
    Ok(idempotent.max(m.self_adjoint_defect()))
}

/// True iff `‖M² − M‖ ≤ atol` and `‖M − M*‖ ≤ atol`.
pub fn is_projection(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<bool> {
    Ok(projection_defect(m)? <= tol.atol)
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let defect = m.self_adjoint_defect();
    let scale = m.op_norm().max(1.0);
    if defect > TolerancePolicy::default().atol * scale {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let sym = (&m.0 + m.0.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors: ComplexMatrix(vectors) })
}

/// Orthonormal basis of the numerical kernel of `m`.
///
/// Singular values at or below `rank_tol · ‖m‖_F` count as zero. Tall inputs are first
/// compressed by a QR factorisation, wide ones are padded with zero rows, so that the SVD is
/// always square and yields a full right singular basis.
pub fn nullspace(m: &ComplexMatrix, tol: &TolerancePolicy) -> Vec<Vec<C64>> {
    nullspace_below(m, tol.rank_tol * m.frobenius_norm())
}

/// Orthonormal basis for the span of right singular vectors with singular value at most
/// `threshold`.
pub fn nullspace_below(m: &ComplexMatrix, threshold: f64) -> Vec<Vec<C64>> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols == 0 {
        return vec![];
    }
    if m.frobenius_norm() == 0.0 {
        return (0..cols)
            .map(|k| (0..cols).map(|i| if i == k { ONE } else { ZERO }).collect())
            .collect();
    }
    let square = if rows > cols {
        m.0.clone().qr().r()
    } else {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(&m.0);
        padded
    };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    (0..cols)
        .filter(|&k| svd.singular_values[k] <= threshold)
        .map(|k| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect()
}

/// Numerical rank with the same threshold as [`nullspace`].
pub fn rank(m: &ComplexMatrix, tol: &TolerancePolicy) -> usize {
    m.cols() - nullspace(m, tol).len()
}

/// Normalised Hilbert–Schmidt inner product `tr(S* T)` with `tr(1) = 1`.
pub fn hs_inner(s: &ComplexMatrix, t: &ComplexMatrix) -> Result<C64> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    if s.rows() != t.rows() || s.cols() != t.cols() {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner of {}x{} and {}x{}",
            s.rows(),
            s.cols(),
            t.rows(),
            t.cols()
        )));
    }
    let total: C64 = s.0.iter().zip(t.0.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(total / s.rows() as f64)
}

/// Seeded Haar-random unitary: QR of a complex Gaussian matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(dim, &mut rng)
}

pub fn random_unitary_with(dim: usize, rng: &mut impl rand::Rng) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidInput("random_unitary needs dim >= 1".into()));
    }
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = gaussian.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            return ZERO;
        }
        let d = r[(i, i)];
        if d.norm() == 0.0 {
            ONE
        } else {
            d / d.norm()
        }
    });
    Ok(ComplexMatrix(q * phases))
}

/// Seeded complex Gaussian matrix; used for random commutant elements.
pub fn random_gaussian_with(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Eigendecomposition of a unitary matrix: `u = V diag(phases) V*` with `V` unitary.
fn unitary_eigen(u: &ComplexMatrix) -> (ComplexMatrix, Vec<C64>) {
    let (q, t) = Schur::new(u.0.clone()).unpack();
    let n = u.rows();
    let eigenvalues = (0..n).map(|k| t[(k, k)]).collect();
    (ComplexMatrix(q), eigenvalues)
}

/// Principal logarithm of a unitary, returned as the skew-Hermitian matrix `log u`.
pub fn unitary_log(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (v, eigenvalues) = unitary_eigen(u);
    let mut phases = Vec::with_capacity(eigenvalues.len());
    for lambda in eigenvalues {
        if (lambda + ONE).norm() <= 1e-10 {
            return Err(Error::BranchCut);
        }
        phases.push(I * lambda.arg());
    }
    Ok(&(&v * &ComplexMatrix::diag(&phases)) * &v.adjoint())
}

/// Exponential of a skew-Hermitian matrix, computed through the Hermitian matrix `-i·x`.
pub fn exp_skew_hermitian(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = x.scale(-I);
    let eig = hermitian_eigendecomposition(&h)?;
    let phases: Vec<C64> = eig.values.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    Ok(&(&eig.vectors * &ComplexMatrix::diag(&phases)) * &eig.vectors.adjoint())
}

/// Point `t ∈ [0,1]` on the geodesic `U0·exp(t·log(U0* U1))`, with the principal logarithm.
///
/// The endpoints are returned verbatim. Fails with [`Error::BranchCut`] when `U0* U1` has
/// eigenvalue `-1`; callers perturb an endpoint and retry.
pub fn unitary_geodesic(u0: &ComplexMatrix, u1: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !u0.is_square() || u0.rows() != u1.rows() || u0.cols() != u1.cols() {
        return Err(Error::DimensionMismatch("geodesic endpoints differ in shape".into()));
    }
    let policy = TolerancePolicy::default();
    for u in [u0, u1] {
        let defect = u.unitarity_defect();
        if defect > policy.atol {
            return Err(Error::NotUnitary(defect));
        }
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("geodesic parameter {t} outside [0,1]")));
    }
    let relative = &u0.adjoint() * u1;
    let (v, eigenvalues) = unitary_eigen(&relative);
    let mut phases = Vec::with_capacity(eigenvalues.len());
    for lambda in eigenvalues {
        if (lambda + ONE).norm() <= 1e-10 {
            return Err(Error::BranchCut);
        }
        phases.push(lambda.arg());
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    if t == 1.0 {
        return Ok(u1.clone());
    }
    let step: Vec<C64> = phases.iter().map(|&theta| C64::from_polar(1.0, t * theta)).collect();
    Ok(&(u0 * &v) * &(&ComplexMatrix::diag(&step) * &v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_ones() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    #[test]
    fn projection_examples() {
        let tol = TolerancePolicy::default();
        assert!(is_projection(&ComplexMatrix::diag_real(&[1.0, 0.0]), &tol).unwrap());
        assert!(is_projection(&half_ones(), &tol).unwrap());
        let nilpotent = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(!is_projection(&nilpotent, &tol).unwrap());
        assert!(matches!(
            is_projection(&ComplexMatrix::zeros(2, 3), &tol),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn eigen_examples() {
        let e = hermitian_eigendecomposition(&ComplexMatrix::diag_real(&[2.0, 1.0])).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 2.0).abs() < 1e-14);
        let e = hermitian_eigendecomposition(&ComplexMatrix::identity(3)).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let e = hermitian_eigendecomposition(&half_ones()).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let nilpotent = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigendecomposition(&nilpotent), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn nullspace_examples() {
        let tol = TolerancePolicy::default();
        assert_eq!(nullspace(&ComplexMatrix::zeros(2, 2), &tol).len(), 2);
        assert!(nullspace(&ComplexMatrix::identity(3), &tol).is_empty());
        let ones = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let basis = nullspace(&ones, &tol);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // proportional to (1, -1)
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!((v[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_and_tall() {
        let tol = TolerancePolicy::default();
        let wide = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0]]);
        assert_eq!(nullspace(&wide, &tol).len(), 2);
        let tall = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        assert_eq!(nullspace(&tall, &tol).len(), 1);
    }

    #[test]
    fn hs_inner_examples() {
        let id = ComplexMatrix::identity(3);
        assert!((hs_inner(&id, &id).unwrap() - ONE).norm() < 1e-15);
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(hs_inner(&a, &b).unwrap(), ZERO);
        assert!(hs_inner(&a, &id).is_err());
    }

    #[test]
    fn random_unitary_examples() {
        let u = random_unitary(1, 5).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
        assert_eq!(random_unitary(3, 42).unwrap(), random_unitary(3, 42).unwrap());
        assert_ne!(random_unitary(3, 42).unwrap(), random_unitary(3, 43).unwrap());
        for seed in 0..10 {
            assert!(random_unitary(4, seed).unwrap().unitarity_defect() < 1e-12);
        }
        assert!(random_unitary(0, 1).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let u = random_unitary(3, 1).unwrap();
        let mid = unitary_geodesic(&u, &u, 0.5).unwrap();
        assert!((&mid - &u).op_norm() < 1e-12);

        let target = ComplexMatrix::diag(&[I, -I + C64::new(1e-3, 0.0)]);
        let target = {
            // renormalise the second phase
            let z = target.get(1, 1);
            ComplexMatrix::diag(&[I, z / z.norm()])
        };
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let g = unitary_geodesic(&ComplexMatrix::identity(2), &target, t).unwrap();
            assert!(g.unitarity_defect() < 1e-10);
        }
        let v = random_unitary(3, 2).unwrap();
        let end = unitary_geodesic(&u, &v, 1.0).unwrap();
        assert_eq!(end, v);
        let near_end = unitary_geodesic(&u, &v, 1.0 - 1e-12).unwrap();
        assert!((&near_end - &v).op_norm() < 1e-10);
    }

    #[test]
    fn geodesic_branch_cut() {
        let minus = ComplexMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(
            unitary_geodesic(&ComplexMatrix::identity(2), &minus, 0.5),
            Err(Error::BranchCut)
        ));
    }

    #[test]
    fn tolerance_policy_validation() {
        assert!(TolerancePolicy::new(1e-9, 1e-7).is_ok());
        assert!(TolerancePolicy::new(0.0, 1e-7).is_err());
        assert!(TolerancePolicy::new(1e-6, 1e-7).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let u = random_unitary(3, 9).unwrap();
        let text = serde_json::to_string(&u).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(u, back);
        let bad = r#"{"rows":2,"cols":2,"data":[[1,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn unitary_log_exponentiates_back() {
        let u = random_unitary(4, 11).unwrap();
        let log = unitary_log(&u).unwrap();
        assert!((&log + &log.adjoint()).op_norm() < 1e-10);
        let back = exp_skew_hermitian(&log).unwrap();
        assert!((&back - &u).op_norm() < 1e-10);
    }
}
