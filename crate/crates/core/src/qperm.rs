//! Quantum permutations of finite sets.
//!
//! A [`QuantumPermutation`] of `n` points in dimension `d` is an `n×n` array of `d×d`
//! orthogonal projections whose rows and columns each sum to the identity (a magic unitary).
//! Construction never checks the magic-unitary conditions; call [`QuantumPermutation::verify`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigendecomposition, nullspace_below, projection_defect, random_gaussian_with,
    ComplexMatrix, TolerancePolicy, WorstNorm, C64, ONE, ZERO,
};
use crate::perm::Permutation;

pub const MAX_POINTS: usize = 64;
pub const MAX_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumPermutation {
    n: usize,
    d: usize,
    /// Row-major `n×n` array of `d×d` entries.
    entries: Vec<ComplexMatrix>,
}

impl QuantumPermutation {
    /// Builds from a nested `n×n` array; rejects ragged arrays and inconsistent entry shapes.
    pub fn new(entries: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidInput("quantum permutation of the empty set".into()));
        }
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("ragged entry array".into()));
        }
        let d = entries[0][0].rows();
        let flat: Vec<ComplexMatrix> = entries.into_iter().flatten().collect();
        Self::from_flat(n, d, flat)
    }

    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(usize, usize) -> ComplexMatrix) -> Result<Self> {
        let mut flat = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                flat.push(f(x, y));
            }
        }
        Self::from_flat(n, d, flat)
    }

    fn from_flat(n: usize, d: usize, entries: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput("n and d must be positive".into()));
        }
        if n > MAX_POINTS || d > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "n = {n}, d = {d} exceed the supported sizes ({MAX_POINTS}, {MAX_DIM})"
            )));
        }
        debug_assert_eq!(entries.len(), n * n);
        if let Some(bad) = entries.iter().position(|e| e.rows() != d || e.cols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({}, {}) is {}x{}, expected {d}x{d}",
                bad / n,
                bad % n,
                entries[bad].rows(),
                entries[bad].cols()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("entries must be finite".into()));
        }
        Ok(QuantumPermutation { n, d, entries })
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert space dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, x: usize, y: usize) -> &ComplexMatrix {
        &self.entries[x * self.n + y]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &ComplexMatrix)> {
        let n = self.n;
        self.entries.iter().enumerate().map(move |(k, e)| ((k / n, k % n), e))
    }

    /// Applies `f` to every entry.
    pub fn map_entries(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let entries: Vec<ComplexMatrix> = self.entries.iter().map(f).collect();
        let d = entries[0].rows();
        Self::from_flat(self.n, d, entries)
    }

    /// The `2×2` form `[[p, 1−p], [1−p, p]]`.
    pub fn two_point(p: &ComplexMatrix) -> Result<Self> {
        let d = p.rows();
        let c = &ComplexMatrix::identity(d) - p;
        QuantumPermutation::new(vec![vec![p.clone(), c.clone()], vec![c, p.clone()]])
    }

    /// The block form `[[p,1−p,0,0],[1−p,p,0,0],[0,0,q,1−q],[0,0,1−q,q]]`.
    pub fn four_point_blocks(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<Self> {
        let d = p.rows();
        if q.rows() != d {
            return Err(Error::DimensionMismatch("p and q differ in dimension".into()));
        }
        let id = ComplexMatrix::identity(d);
        let zero = ComplexMatrix::zeros(d, d);
        let pc = &id - p;
        let qc = &id - q;
        QuantumPermutation::new(vec![
            vec![p.clone(), pc.clone(), zero.clone(), zero.clone()],
            vec![pc, p.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), q.clone(), qc.clone()],
            vec![zero.clone(), zero, qc, q.clone()],
        ])
    }

    /// The one-dimensional quantum permutation with `u_{x,y} = 1` iff `x = σ(y)`.
    pub fn from_permutation(perm: &Permutation) -> Result<Self> {
        let n = perm.len();
        Self::from_fn(n, 1, |x, y| {
            let v = if x == perm.apply(y) { ONE } else { ZERO };
            ComplexMatrix::from_fn(1, 1, |_, _| v)
        })
    }

    /// Recovers the permutation of a one-dimensional quantum permutation with 0/1 entries.
    pub fn to_permutation(&self, tol: &TolerancePolicy) -> Option<Permutation> {
        if self.d != 1 {
            return None;
        }
        let mut images = vec![usize::MAX; self.n];
        for ((x, y), e) in self.entries() {
            let v = e.get(0, 0);
            if (v - ONE).norm() <= tol.atol {
                if images[y] != usize::MAX {
                    return None;
                }
                images[y] = x;
            } else if v.norm() > tol.atol {
                return None;
            }
        }
        Permutation::new(images).ok()
    }

    /// Entrywise block-diagonal sum.
    pub fn direct_sum(&self, other: &QuantumPermutation) -> Result<Self> {
        self.same_points(other)?;
        Self::from_fn(self.n, self.d + other.d, |x, y| self.entry(x, y).direct_sum(other.entry(x, y)))
    }

    /// Tensor product with entries `Σ_t σ_{x,t} ⊗ τ_{t,y}`.
    pub fn tensor(&self, other: &QuantumPermutation) -> Result<Self> {
        self.same_points(other)?;
        let d = self.d * other.d;
        Self::from_fn(self.n, d, |x, y| {
            let mut acc = ComplexMatrix::zeros(d, d);
            for t in 0..self.n {
                acc = &acc + &self.entry(x, t).kron(other.entry(t, y));
            }
            acc
        })
    }

    /// Conjugate representation: entry `(x,y)` is the complex conjugate of entry `(y,x)`.
    pub fn conjugate(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.entry(k % n, k / n).conj()).collect();
        QuantumPermutation { n, d: self.d, entries }
    }

    /// `v_{i,j} = u_{row(i), col(j)}`.
    pub fn relabel(&self, row_perm: &Permutation, col_perm: &Permutation) -> Result<Self> {
        if row_perm.len() != self.n || col_perm.len() != self.n {
            return Err(Error::DimensionMismatch("relabelling permutation has wrong size".into()));
        }
        Self::from_fn(self.n, self.d, |i, j| self.entry(row_perm.apply(i), col_perm.apply(j)).clone())
    }

    /// Entries `v* u_{x,y} v` for an isometry (or unitary) `v` with `d` rows.
    pub fn compress(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.rows() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "isometry has {} rows, expected {}",
                v.rows(),
                self.d
            )));
        }
        let va = v.adjoint();
        self.map_entries(|e| &(&va * e) * v)
    }

    /// Validates the magic-unitary conditions and reports the worst defects.
    pub fn verify(&self, tol: &TolerancePolicy) -> VerificationReport {
        let n = self.n;
        let id = ComplexMatrix::identity(self.d);
        let mut offending = Vec::new();
        let mut record = |kind: DefectKind, index: Vec<usize>, defect: f64| {
            if defect > tol.atol {
                offending.push(Offense { kind, index, defect });
            }
        };

        let mut projection = 0.0f64;
        for ((x, y), e) in self.entries() {
            let defect = projection_defect(e).unwrap_or(f64::INFINITY);
            projection = projection.max(defect);
            record(DefectKind::Projection, vec![x, y], defect);
        }

        let mut rows = WorstNorm::default();
        let mut cols = WorstNorm::default();
        for x in 0..n {
            let mut row_sum = -&id;
            let mut col_sum = -&id;
            for y in 0..n {
                row_sum = &row_sum + self.entry(x, y);
                col_sum = &col_sum + self.entry(y, x);
            }
            let row_defect = row_sum.op_norm();
            let col_defect = col_sum.op_norm();
            rows.value = rows.value.max(row_defect);
            cols.value = cols.value.max(col_defect);
            record(DefectKind::Row, vec![x], row_defect);
            record(DefectKind::Column, vec![x], col_defect);
        }

        let mut orthogonality = WorstNorm::default();
        for x in 0..n {
            for y in 0..n {
                for z in (y + 1)..n {
                    orthogonality.offer(&(self.entry(x, y) * self.entry(x, z)));
                    orthogonality.offer(&(self.entry(y, x) * self.entry(z, x)));
                }
            }
        }

        let valid = projection <= tol.atol && rows.value <= tol.atol && cols.value <= tol.atol;
        VerificationReport {
            valid,
            worst_projection_defect: projection,
            worst_row_defect: rows.value,
            worst_column_defect: cols.value,
            worst_orthogonality_defect: orthogonality.value,
            offending_indices: offending,
        }
    }

    /// Largest `‖[u_{x,y}, u_{z,w}]‖` over all pairs of entries.
    pub fn max_commutator(&self) -> f64 {
        let mut worst = WorstNorm::default();
        let total = self.entries.len();
        for a in 0..total {
            for b in (a + 1)..total {
                worst.offer(&self.entries[a].commutator(&self.entries[b]));
            }
        }
        worst.value
    }

    pub fn is_classical(&self, tol: &TolerancePolicy) -> bool {
        self.max_commutator() <= tol.atol
    }

    fn same_points(&self, other: &QuantumPermutation) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "quantum permutations of {} and {} points",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl Serialize for QuantumPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            d: usize,
            entries: Vec<&'a [ComplexMatrix]>,
        }
        Repr { n: self.n, d: self.d, entries: self.entries.chunks(self.n).collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            d: usize,
            entries: Vec<Vec<ComplexMatrix>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.entries.len() != repr.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but {} rows supplied",
                repr.n,
                repr.entries.len()
            )));
        }
        let q = QuantumPermutation::new(repr.entries).map_err(D::Error::custom)?;
        if q.d != repr.d {
            return Err(D::Error::custom(format!("declared d = {} but entries are {}x{}", repr.d, q.d, q.d)));
        }
        Ok(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    Projection,
    Row,
    Column,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offense {
    pub kind: DefectKind,
    /// `[x, y]` for entries, `[x]` for rows and columns.
    pub index: Vec<usize>,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub worst_projection_defect: f64,
    pub worst_row_defect: f64,
    pub worst_column_defect: f64,
    /// Largest `‖u_{x,y} u_{x,z}‖` (or column analogue) with `y ≠ z`. Implied small by the
    /// other three; reported as a cross-check.
    pub worst_orthogonality_defect: f64,
    pub offending_indices: Vec<Offense>,
}

/// Largest `‖T σ_{x,y} − τ_{x,y} T‖`.
pub fn intertwining_defect(t: &ComplexMatrix, sigma: &QuantumPermutation, tau: &QuantumPermutation) -> f64 {
    let mut worst = WorstNorm::default();
    for ((x, y), a) in sigma.entries() {
        worst.offer(&(&(t * a) - &(tau.entry(x, y) * t)));
    }
    worst.value
}

/// HS-orthonormal basis of `{T : T σ_{x,y} = τ_{x,y} T for all x, y}`.
///
/// `T` maps the space of `σ` to the space of `τ`. Because rows sum to the identity, the last
/// row and column of constraints are implied by the others and are not stacked.
pub fn intertwiners(
    sigma: &QuantumPermutation,
    tau: &QuantumPermutation,
    tol: &TolerancePolicy,
) -> Result<Vec<ComplexMatrix>> {
    sigma.same_points(tau)?;
    let (ds, dt) = (sigma.d, tau.d);
    let unknowns = ds * dt;
    let n = sigma.n;
    let reduced = if n >= 2 { n - 1 } else { 0 };
    let id_s = ComplexMatrix::identity(ds);
    let id_t = ComplexMatrix::identity(dt);
    let block_rows = unknowns;
    let mut system = ComplexMatrix::zeros(reduced * reduced * block_rows, unknowns);
    let mut at = 0;
    for x in 0..reduced {
        for y in 0..reduced {
            // row-major vec: vec(T A) = (1 ⊗ Aᵀ) vec T, vec(B T) = (B ⊗ 1) vec T
            let op = &id_t.kron(&sigma.entry(x, y).transpose()) - &tau.entry(x, y).kron(&id_s);
            for i in 0..block_rows {
                for j in 0..unknowns {
                    system.set(at + i, j, op.get(i, j));
                }
            }
            at += block_rows;
        }
    }
    let scale = (ds as f64).sqrt();
    let basis = if system.rows() == 0 {
        (0..unknowns)
            .map(|k| (0..unknowns).map(|i| if i == k { ONE } else { ZERO }).collect())
            .collect()
    } else {
        // Entries are projections, so the system has unit scale even when it nearly vanishes.
        nullspace_below(&system, tol.rank_tol * system.frobenius_norm().max(1.0))
    };
    Ok(basis
        .into_iter()
        .map(|v| ComplexMatrix::from_fn(dt, ds, |i, j| v[i * ds + j] * scale))
        .collect())
}

pub fn commutant_dimension(sigma: &QuantumPermutation, tol: &TolerancePolicy) -> Result<usize> {
    Ok(intertwiners(sigma, sigma, tol)?.len())
}

pub fn is_irreducible(sigma: &QuantumPermutation, tol: &TolerancePolicy) -> Result<bool> {
    Ok(commutant_dimension(sigma, tol)? == 1)
}

/// A unitary `U` with `U σ_{x,y} U* = τ_{x,y}`, if the irreducible inputs are equivalent.
pub fn are_equivalent(
    sigma: &QuantumPermutation,
    tau: &QuantumPermutation,
    tol: &TolerancePolicy,
) -> Result<Option<ComplexMatrix>> {
    sigma.same_points(tau)?;
    for (name, q) in [("first", sigma), ("second", tau)] {
        if !is_irreducible(q, tol)? {
            return Err(Error::Reducible(format!("{name} argument of are_equivalent")));
        }
    }
    if sigma.d != tau.d {
        return Ok(None);
    }
    let basis = intertwiners(sigma, tau, tol)?;
    match basis.len() {
        0 => Ok(None),
        1 => {
            let svd = basis[0].as_dmatrix().clone().svd(true, true);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            // Schur: T*T is scalar for an intertwiner between irreducibles.
            if smin <= 0.5 * smax {
                return Err(Error::Numerical(format!(
                    "intertwiner between irreducibles is not a multiple of a unitary (σ ratio {})",
                    smin / smax
                )));
            }
            let u = svd.u.expect("requested") * svd.v_t.expect("requested");
            Ok(Some(ComplexMatrix::from_dmatrix(u)))
        }
        k => Err(Error::Numerical(format!(
            "{k}-dimensional intertwiner space between irreducibles"
        ))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionFactor {
    pub factor: QuantumPermutation,
    pub multiplicity: usize,
    /// `d × (multiplicity · factor.d)` isometry `W` with `W* u_{x,y} W = 1 ⊗ factor_{x,y}`.
    pub isometry: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub factors: Vec<DecompositionFactor>,
    /// `max ‖u_{x,y} − W (⊕ 1 ⊗ factor_{x,y}) W*‖` with `W` the concatenated isometries.
    pub residual: f64,
    /// `‖W* W − 1‖` for the concatenated isometries.
    pub isometry_defect: f64,
    pub commutant_dimension: usize,
}

impl DecompositionReport {
    /// `Σ multiplicity · dimension`.
    pub fn total_dimension(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity * f.factor.d()).sum()
    }

    /// `Σ multiplicity²`, the commutant dimension predicted by the decomposition.
    pub fn multiplicity_square_sum(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity * f.multiplicity).sum()
    }
}

/// Splits `sigma` into irreducibles along eigenspaces of random self-adjoint commutant
/// elements, then groups equivalent factors.
pub fn decompose(sigma: &QuantumPermutation, seed: u64, tol: &TolerancePolicy) -> Result<DecompositionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let commutant = intertwiners(sigma, sigma, tol)?;
    let commutant_dim = commutant.len();
    let mut pieces = Vec::new();
    split(sigma, commutant, ComplexMatrix::identity(sigma.d), 0, sigma.d, tol, &mut rng, &mut pieces)?;

    struct Group {
        rep: QuantumPermutation,
        isometries: Vec<ComplexMatrix>,
    }
    let mut groups: Vec<Group> = Vec::new();
    'pieces: for (piece, iso) in pieces {
        for group in groups.iter_mut() {
            if group.rep.d() != piece.d() {
                continue;
            }
            if let Some(u) = are_equivalent(&group.rep, &piece, tol)? {
                group.isometries.push(&iso * &u);
                continue 'pieces;
            }
        }
        groups.push(Group { rep: piece, isometries: vec![iso] });
    }

    let factors: Vec<DecompositionFactor> = groups
        .into_iter()
        .map(|g| DecompositionFactor {
            multiplicity: g.isometries.len(),
            isometry: ComplexMatrix::hstack(&g.isometries).expect("isometries share row count"),
            factor: g.rep,
        })
        .collect();

    let all: Vec<ComplexMatrix> = factors.iter().map(|f| f.isometry.clone()).collect();
    let w = ComplexMatrix::hstack(&all)?;
    let isometry_defect = if w.is_square() { w.unitarity_defect() } else { f64::INFINITY };

    let mut residual = WorstNorm::default();
    for ((x, y), entry) in sigma.entries() {
        let mut rebuilt = ComplexMatrix::zeros(sigma.d, sigma.d);
        for f in &factors {
            let k = f.factor.d();
            for copy in 0..f.multiplicity {
                let block = f.isometry.columns(copy * k, k);
                rebuilt = &rebuilt + &(&(&block * f.factor.entry(x, y)) * &block.adjoint());
            }
        }
        residual.offer(&(entry - &rebuilt));
    }

    Ok(DecompositionReport { factors, residual: residual.value, isometry_defect, commutant_dimension: commutant_dim })
}

/// Relative gap below which neighbouring eigenvalues are treated as one eigenvalue.
const SAME_EIGENVALUE: f64 = 1e-10;

#[allow(clippy::too_many_arguments)]
fn split(
    q: &QuantumPermutation,
    commutant: Vec<ComplexMatrix>,
    isometry: ComplexMatrix,
    depth: usize,
    max_depth: usize,
    tol: &TolerancePolicy,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(QuantumPermutation, ComplexMatrix)>,
) -> Result<()> {
    if depth > max_depth {
        return Err(Error::Numerical("decomposition did not terminate within d levels".into()));
    }
    if commutant.len() <= 1 {
        out.push((q.clone(), isometry));
        return Ok(());
    }
    let d = q.d();
    let mut blocks = None;
    for _attempt in 0..2 {
        let coefficients = random_gaussian_with(commutant.len(), 1, rng);
        let mut x = ComplexMatrix::zeros(d, d);
        for (k, b) in commutant.iter().enumerate() {
            x = &x + &b.scale(coefficients.get(k, 0));
        }
        let h = (&x + &x.adjoint()).scale_real(0.5);
        let eig = hermitian_eigendecomposition(&h)?;
        if let Some(clusters) = cluster_eigenvalues(&eig.values, tol) {
            if clusters.len() >= 2 {
                let vs: Vec<ComplexMatrix> =
                    clusters.iter().map(|&(start, len)| eig.vectors.columns(start, len)).collect();
                if invariant_blocks(q, &vs, tol) {
                    blocks = Some(vs);
                    break;
                }
            }
        }
    }
    let Some(blocks) = blocks else {
        return Err(Error::Numerical(
            "random commutant element failed to split a reducible quantum permutation twice".into(),
        ));
    };
    for v in blocks {
        let sub = q.compress(&v)?;
        let sub_commutant = intertwiners(&sub, &sub, tol)?;
        split(&sub, sub_commutant, &isometry * &v, depth + 1, max_depth, tol, rng, out)?;
    }
    Ok(())
}

/// Groups ascending eigenvalues into clusters `(start, len)`; `None` when a gap is too
/// ambiguous to call.
fn cluster_eigenvalues(values: &[f64], tol: &TolerancePolicy) -> Option<Vec<(usize, usize)>> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut clusters = vec![(0usize, 1usize)];
    for k in 1..values.len() {
        let gap = (values[k] - values[k - 1]) / scale;
        if gap <= SAME_EIGENVALUE {
            clusters.last_mut().expect("non-empty").1 += 1;
        } else if gap >= tol.rank_tol {
            clusters.push((k, 1));
        } else {
            return None;
        }
    }
    Some(clusters)
}

/// Checks that the column spaces of `vs` reduce every entry of `q`.
fn invariant_blocks(q: &QuantumPermutation, vs: &[ComplexMatrix], tol: &TolerancePolicy) -> bool {
    let bound = tol.rank_tol * 10.0;
    for (_, e) in q.entries() {
        for (a, va) in vs.iter().enumerate() {
            for (b, vb) in vs.iter().enumerate() {
                if a != b && (&(&va.adjoint() * e) * vb).op_norm() > bound {
                    return false;
                }
            }
        }
    }
    true
}

/// Scalar `c·1` as a `d×d` matrix.
pub fn scalar(d: usize, c: f64) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale(C64::new(c, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn p0() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, 0.0])
    }

    fn p_plus() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let two = QuantumPermutation::two_point(&p0()).unwrap();
        assert!(two.verify(&tol()).valid);
        let blocks = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap();
        let report = blocks.verify(&tol());
        assert!(report.valid, "{report:?}");
        assert!(report.worst_orthogonality_defect <= 10.0 * tol().atol);

        let mut rows: Vec<Vec<ComplexMatrix>> =
            (0..4).map(|x| (0..4).map(|y| blocks.entry(x, y).clone()).collect()).collect();
        rows[2] = vec![ComplexMatrix::zeros(2, 2); 4];
        let broken = QuantumPermutation::new(rows).unwrap();
        let report = broken.verify(&tol());
        assert!(!report.valid);
        assert!((report.worst_row_defect - 1.0).abs() < 1e-12);
        assert!(report.offending_indices.iter().any(|o| o.kind == DefectKind::Row && o.index == vec![2]));
    }

    #[test]
    fn ragged_and_inconsistent_arrays_are_rejected() {
        let e = ComplexMatrix::identity(2);
        assert!(QuantumPermutation::new(vec![vec![e.clone(), e.clone()], vec![e.clone()]]).is_err());
        let odd = ComplexMatrix::identity(3);
        assert!(QuantumPermutation::new(vec![vec![e.clone(), odd], vec![e.clone(), e]]).is_err());
    }

    #[test]
    fn from_permutation_examples() {
        let id = QuantumPermutation::from_permutation(&Permutation::identity(3)).unwrap();
        for ((x, y), e) in id.entries() {
            assert_eq!(e.get(0, 0), if x == y { ONE } else { ZERO });
        }
        let swap = QuantumPermutation::from_permutation(&perm(&[1, 0])).unwrap();
        assert_eq!(swap.entry(0, 1).get(0, 0), ONE);
        assert_eq!(swap.entry(0, 0).get(0, 0), ZERO);
    }

    /// Permutation matrix product, computed independently of the tensor construction.
    fn permutation_matrix(p: &Permutation) -> Vec<Vec<u8>> {
        let n = p.len();
        (0..n).map(|x| (0..n).map(|y| u8::from(x == p.apply(y))).collect()).collect()
    }

    fn matmul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let n = a.len();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    }

    fn as_matrix(q: &QuantumPermutation) -> Vec<Vec<u8>> {
        let n = q.n();
        (0..n).map(|x| (0..n).map(|y| q.entry(x, y).get(0, 0).re.round() as u8).collect()).collect()
    }

    #[test]
    fn composition_matches_matrix_product() {
        for s in Permutation::all(3) {
            for t in Permutation::all(3) {
                let product = matmul(&permutation_matrix(&s), &permutation_matrix(&t));
                let composed = QuantumPermutation::from_permutation(&s.compose(&t)).unwrap();
                assert_eq!(as_matrix(&composed), product);
                let tensored = QuantumPermutation::from_permutation(&s)
                    .unwrap()
                    .tensor(&QuantumPermutation::from_permutation(&t).unwrap())
                    .unwrap();
                assert_eq!(tensored, composed);
            }
        }
    }

    #[test]
    fn direct_sum_examples() {
        let swap = QuantumPermutation::from_permutation(&perm(&[1, 0])).unwrap();
        let id = QuantumPermutation::from_permutation(&Permutation::identity(2)).unwrap();
        let sum = swap.direct_sum(&id).unwrap();
        assert_eq!(sum.d(), 2);
        assert_eq!(sum.entry(0, 0), &ComplexMatrix::diag_real(&[0.0, 1.0]));
        assert_eq!(sum.entry(0, 1), &ComplexMatrix::diag_real(&[1.0, 0.0]));
        assert!(sum.verify(&tol()).valid);
        assert!(swap.direct_sum(&QuantumPermutation::from_permutation(&Permutation::identity(3)).unwrap()).is_err());
    }

    #[test]
    fn conjugate_examples() {
        for s in Permutation::all(3) {
            let q = QuantumPermutation::from_permutation(&s).unwrap();
            assert_eq!(q.conjugate(), QuantumPermutation::from_permutation(&s.inverse()).unwrap());
        }
        let u = random_unitary(2, 3).unwrap();
        let q = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap().compress(&u).unwrap();
        assert_eq!(q.conjugate().conjugate(), q);
    }

    #[test]
    fn relabel_examples() {
        let all = Permutation::all(3);
        for pi in &all {
            let q = QuantumPermutation::from_permutation(pi).unwrap();
            assert_eq!(q.relabel(&Permutation::identity(3), &Permutation::identity(3)).unwrap(), q);
            for rho in &all {
                for tau in &all {
                    let expected = rho.inverse().compose(pi).compose(tau);
                    assert_eq!(
                        q.relabel(rho, tau).unwrap(),
                        QuantumPermutation::from_permutation(&expected).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn classicality_examples() {
        let q = QuantumPermutation::from_permutation(&perm(&[2, 0, 1])).unwrap();
        assert!(q.is_classical(&tol()));
        let blocks = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap();
        assert!((blocks.max_commutator() - 0.5).abs() < 1e-12);
        assert!(!blocks.is_classical(&tol()));
    }

    #[test]
    fn intertwiner_examples() {
        let swap3 = QuantumPermutation::from_permutation(&perm(&[1, 0, 2])).unwrap();
        assert_eq!(intertwiners(&swap3, &swap3, &tol()).unwrap().len(), 1);
        let cycle = QuantumPermutation::from_permutation(&perm(&[1, 2, 0])).unwrap();
        assert!(intertwiners(&swap3, &cycle, &tol()).unwrap().is_empty());
        let doubled = swap3.direct_sum(&swap3).unwrap();
        assert_eq!(intertwiners(&swap3, &doubled, &tol()).unwrap().len(), 2);
        assert_eq!(commutant_dimension(&doubled, &tol()).unwrap(), 4);
    }

    #[test]
    fn intertwiner_basis_is_hs_orthonormal_and_intertwines() {
        let blocks = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap();
        let sum = blocks.direct_sum(&blocks).unwrap();
        let basis = intertwiners(&blocks, &sum, &tol()).unwrap();
        assert_eq!(basis.len(), 2);
        for (a, s) in basis.iter().enumerate() {
            assert!(intertwining_defect(s, &blocks, &sum) < 1e-10);
            for (b, t) in basis.iter().enumerate() {
                let ip = (&s.adjoint() * t).normalized_trace();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn irreducibility_and_equivalence() {
        let blocks = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap();
        assert!(is_irreducible(&blocks, &tol()).unwrap());
        let swap = QuantumPermutation::from_permutation(&perm(&[1, 0])).unwrap();
        let id = QuantumPermutation::from_permutation(&Permutation::identity(2)).unwrap();
        assert!(!is_irreducible(&swap.direct_sum(&id).unwrap(), &tol()).unwrap());

        let u = are_equivalent(&blocks, &blocks, &tol()).unwrap().unwrap();
        assert!(intertwining_defect(&u, &blocks, &blocks) < 1e-10);
        assert!(u.unitarity_defect() < 1e-10);

        let w = random_unitary(2, 17).unwrap();
        let rotated = blocks.compress(&w).unwrap();
        let u = are_equivalent(&blocks, &rotated, &tol()).unwrap().unwrap();
        assert!(intertwining_defect(&u, &blocks, &rotated) < 1e-9);

        assert!(are_equivalent(&swap, &id, &tol()).unwrap().is_none());
        assert!(matches!(
            are_equivalent(&swap.direct_sum(&id).unwrap(), &swap, &tol()),
            Err(Error::Reducible(_))
        ));
    }

    #[test]
    fn decompose_block_diagonal_input() {
        let sigma = QuantumPermutation::from_permutation(&perm(&[1, 2, 0])).unwrap();
        let tau = QuantumPermutation::from_permutation(&perm(&[0, 2, 1])).unwrap();
        let input = sigma.direct_sum(&sigma).unwrap().direct_sum(&tau).unwrap();
        let report = decompose(&input, 7, &tol()).unwrap();
        assert_eq!(report.factors.len(), 2);
        let mut found: Vec<(Permutation, usize)> = report
            .factors
            .iter()
            .map(|f| (f.factor.to_permutation(&tol()).unwrap(), f.multiplicity))
            .collect();
        found.sort();
        let mut expected = vec![(perm(&[1, 2, 0]), 2), (perm(&[0, 2, 1]), 1)];
        expected.sort();
        assert_eq!(found, expected);
        assert_eq!(report.total_dimension(), 3);
        assert_eq!(report.multiplicity_square_sum(), report.commutant_dimension);
        assert!(report.residual < 1e-9);
        assert!(report.isometry_defect < 1e-9);
    }

    #[test]
    fn decompose_one_dimensional_input() {
        let q = QuantumPermutation::from_permutation(&perm(&[3, 1, 0, 2])).unwrap();
        let report = decompose(&q, 0, &tol()).unwrap();
        assert_eq!(report.factors.len(), 1);
        assert_eq!(report.factors[0].multiplicity, 1);
    }

    #[test]
    fn decompose_hidden_direct_sum() {
        let blocks = QuantumPermutation::four_point_blocks(&p0(), &p_plus()).unwrap();
        let classical = QuantumPermutation::from_permutation(&perm(&[1, 0, 3, 2])).unwrap();
        let sum = blocks.direct_sum(&classical).unwrap().direct_sum(&blocks).unwrap();
        let hidden = sum.compress(&random_unitary(5, 4).unwrap()).unwrap();
        let report = decompose(&hidden, 3, &tol()).unwrap();
        assert_eq!(report.total_dimension(), 5);
        assert_eq!(report.commutant_dimension, 5);
        assert_eq!(report.multiplicity_square_sum(), 5);
        assert!(report.residual < 1e-8, "{}", report.residual);
    }

    #[test]
    fn json_round_trip() {
        let q = QuantumPermutation::four_point_blocks(&p0(), &p_plus())
            .unwrap()
            .compress(&random_unitary(2, 1).unwrap())
            .unwrap();
        let text = serde_json::to_string(&q).unwrap();
        let back: QuantumPermutation = serde_json::from_str(&text).unwrap();
        assert_eq!(q, back);
        let bad = text.replacen("\"n\":4", "\"n\":3", 1);
        assert!(serde_json::from_str::<QuantumPermutation>(&bad).is_err());
    }
}
