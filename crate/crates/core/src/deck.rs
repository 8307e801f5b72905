//! Quantum deck transformations of finite coverings, sampled over a mesh of the base.
//!
//! A covering is stored as a [`SampledBase`] together with a sheet permutation per mesh edge:
//! the sheet `i` above `from` continues to the sheet `π(i)` above `to`. A fibered quantum
//! permutation assigns a magic unitary on the sheets to each sample; entries across distinct
//! fibers are zero by construction and never stored.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigendecomposition, unitary_geodesic, ComplexMatrix, TolerancePolicy, WorstNorm, C64, ONE,
};
use crate::perm::Permutation;
use crate::qaut::{diagonal_projection, fourier_projection};
use crate::qperm::{are_equivalent, commutant_dimension, intertwining_defect, QuantumPermutation};
use crate::weyl::{qubit_clifford_group, theta, unit_phase, weyl_qperm, FiniteAbelianGroup, WeylSystem};

/// Largest fiber jump across a mesh edge still read as continuous by [`verify_fibered`].
pub const MAX_TRANSPORT_JUMP: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshEdge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BaseRepr", into = "BaseRepr")]
pub struct SampledBase {
    points: Vec<Vec<f64>>,
    edges: Vec<MeshEdge>,
    /// Oriented plaquettes, as cyclic vertex lists. May be empty.
    faces: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct BaseRepr {
    points: Vec<Vec<f64>>,
    edges: Vec<MeshEdge>,
    #[serde(default)]
    faces: Vec<Vec<usize>>,
}

impl TryFrom<BaseRepr> for SampledBase {
    type Error = Error;

    fn try_from(r: BaseRepr) -> Result<Self> {
        SampledBase::new(r.points, r.edges, r.faces)
    }
}

impl From<SampledBase> for BaseRepr {
    fn from(b: SampledBase) -> Self {
        BaseRepr { points: b.points, edges: b.edges, faces: b.faces }
    }
}

impl SampledBase {
    pub fn new(points: Vec<Vec<f64>>, edges: Vec<MeshEdge>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("base has no sample points".into()));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidInput("sample coordinates are ragged or not finite".into()));
        }
        for (k, e) in edges.iter().enumerate() {
            if e.from >= n || e.to >= n || e.from == e.to {
                return Err(Error::InvalidInput(format!("mesh edge {k} has invalid endpoints")));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidInput(format!("mesh edge {k} has non-positive length")));
            }
        }
        let base = SampledBase { points, edges, faces };
        let lookup = base.edge_lookup();
        for (k, face) in base.faces.iter().enumerate() {
            if face.len() < 3 || face.iter().any(|&v| v >= n) {
                return Err(Error::InvalidInput(format!("face {k} is malformed")));
            }
            for (a, b) in cyclic_pairs(face) {
                if !lookup.contains_key(&(a, b)) {
                    return Err(Error::InvalidInput(format!("face {k} uses a non-edge {a}-{b}")));
                }
            }
        }
        if !base.is_connected() {
            return Err(Error::InvalidInput("mesh is not connected".into()));
        }
        Ok(base)
    }

    /// `samples` equally spaced angles on the circle; edge `k` joins `k` to `k+1`, the last
    /// edge wraps around.
    pub fn circle(samples: usize) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidInput("a sampled circle needs at least 3 points".into()));
        }
        let step = 2.0 * PI / samples as f64;
        let points = (0..samples).map(|k| vec![step * k as f64]).collect();
        let edges = (0..samples).map(|k| MeshEdge { from: k, to: (k + 1) % samples, length: step }).collect();
        Self::new(points, edges, vec![])
    }

    /// Grid `(i/ns, j/nt)` on the unit torus, point index `i·nt + j`.
    pub fn torus(ns: usize, nt: usize) -> Result<Self> {
        if ns < 3 || nt < 3 {
            return Err(Error::InvalidInput("a sampled torus needs at least 3 points per direction".into()));
        }
        let idx = |i: usize, j: usize| (i % ns) * nt + (j % nt);
        let mut points = Vec::with_capacity(ns * nt);
        let mut edges = Vec::with_capacity(2 * ns * nt);
        let mut faces = Vec::with_capacity(ns * nt);
        for i in 0..ns {
            for j in 0..nt {
                points.push(vec![i as f64 / ns as f64, j as f64 / nt as f64]);
                edges.push(MeshEdge { from: idx(i, j), to: idx(i + 1, j), length: 1.0 / ns as f64 });
                edges.push(MeshEdge { from: idx(i, j), to: idx(i, j + 1), length: 1.0 / nt as f64 });
                faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Self::new(points, edges, faces)
    }

    /// Latitude–longitude mesh of the unit sphere with `rings` interior latitudes and
    /// `meridians` longitudes. Index 0 is the north pole, the last index the south pole.
    /// Faces are oriented counterclockwise seen from outside.
    pub fn sphere(rings: usize, meridians: usize) -> Result<Self> {
        if rings < 1 || meridians < 3 {
            return Err(Error::InvalidInput("sphere mesh needs ≥ 1 ring and ≥ 3 meridians".into()));
        }
        let south = 1 + rings * meridians;
        let ring = |k: usize, j: usize| 1 + (k - 1) * meridians + j % meridians;
        let mut points = vec![vec![0.0, 0.0, 1.0]];
        for k in 1..=rings {
            let polar = PI * k as f64 / (rings + 1) as f64;
            for j in 0..meridians {
                let az = 2.0 * PI * j as f64 / meridians as f64;
                points.push(vec![polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]);
            }
        }
        points.push(vec![0.0, 0.0, -1.0]);
        let angle = |a: usize, b: usize| {
            let dot: f64 = points[a].iter().zip(&points[b]).map(|(x, y)| x * y).sum();
            dot.clamp(-1.0, 1.0).acos()
        };
        let mut pairs = Vec::new();
        let mut faces = Vec::new();
        for j in 0..meridians {
            pairs.push((0, ring(1, j)));
            pairs.push((ring(rings, j), south));
            faces.push(vec![ring(1, j), ring(1, j + 1), 0]);
            faces.push(vec![south, ring(rings, j + 1), ring(rings, j)]);
            for k in 1..=rings {
                pairs.push((ring(k, j), ring(k, j + 1)));
                if k < rings {
                    pairs.push((ring(k, j), ring(k + 1, j)));
                    faces.push(vec![ring(k + 1, j), ring(k + 1, j + 1), ring(k, j + 1), ring(k, j)]);
                }
            }
        }
        let edges = pairs.into_iter().map(|(a, b)| MeshEdge { from: a, to: b, length: angle(a, b) }).collect();
        Self::new(points, edges, faces)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// `(a, b) ↦ (edge index, traversed forwards)` in both directions.
    fn edge_lookup(&self) -> HashMap<(usize, usize), (usize, bool)> {
        let mut map = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            map.entry((e.from, e.to)).or_insert((k, true));
            map.entry((e.to, e.from)).or_insert((k, false));
        }
        map
    }

    fn is_connected(&self) -> bool {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn cyclic_pairs(face: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..face.len()).map(move |i| (face[i], face[(i + 1) % face.len()]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoveringRepr", into = "CoveringRepr")]
pub struct Covering {
    base: SampledBase,
    sheets: usize,
    transports: Vec<Permutation>,
}

#[derive(Serialize, Deserialize)]
struct TransportRepr {
    edge: usize,
    perm: Permutation,
}

/// Only the non-identity transports are written out.
#[derive(Serialize, Deserialize)]
struct CoveringRepr {
    base: SampledBase,
    sheets: usize,
    #[serde(default)]
    transports: Vec<TransportRepr>,
}

impl TryFrom<CoveringRepr> for Covering {
    type Error = Error;

    fn try_from(r: CoveringRepr) -> Result<Self> {
        let mut transports = vec![Permutation::identity(r.sheets); r.base.edges.len()];
        for t in r.transports {
            let slot = transports
                .get_mut(t.edge)
                .ok_or_else(|| Error::InvalidInput(format!("transport on unknown edge {}", t.edge)))?;
            *slot = t.perm;
        }
        Covering::new(r.base, r.sheets, transports)
    }
}

impl From<Covering> for CoveringRepr {
    fn from(c: Covering) -> Self {
        let transports = c
            .transports
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_identity())
            .map(|(edge, perm)| TransportRepr { edge, perm })
            .collect();
        CoveringRepr { base: c.base, sheets: c.sheets, transports }
    }
}

impl Covering {
    pub fn new(base: SampledBase, sheets: usize, transports: Vec<Permutation>) -> Result<Self> {
        if sheets == 0 {
            return Err(Error::InvalidInput("a covering needs at least one sheet".into()));
        }
        if transports.len() != base.edges.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} transports for {} mesh edges",
                transports.len(),
                base.edges.len()
            )));
        }
        if let Some(k) = transports.iter().position(|p| p.len() != sheets) {
            return Err(Error::DimensionMismatch(format!("transport {k} does not act on {sheets} sheets")));
        }
        let covering = Covering { base, sheets, transports };
        if let Some(k) = (0..covering.base.faces.len()).find(|&k| !covering.face_holonomy(k).is_identity()) {
            return Err(Error::InvalidInput(format!("transports do not compose to the identity around face {k}")));
        }
        Ok(covering)
    }

    pub fn trivial(base: SampledBase, sheets: usize) -> Result<Self> {
        let transports = vec![Permutation::identity(sheets); base.edges.len()];
        Self::new(base, sheets, transports)
    }

    /// The covering `z ↦ z^d` of the sampled circle: identity transports except on the
    /// wrap edge, which carries `step`.
    pub fn cyclic_circle(samples: usize, sheets: usize, step: isize) -> Result<Self> {
        let base = SampledBase::circle(samples)?;
        let mut transports = vec![Permutation::identity(sheets); samples];
        transports[samples - 1] = Permutation::shift(sheets, step);
        Self::new(base, sheets, transports)
    }

    pub fn base(&self) -> &SampledBase {
        &self.base
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn transport(&self, edge: usize) -> &Permutation {
        &self.transports[edge]
    }

    pub fn is_trivial(&self) -> bool {
        self.transports.iter().all(Permutation::is_identity)
    }

    /// Transport along a closed vertex path, following mesh edges in either direction.
    pub fn monodromy(&self, path: &[usize]) -> Result<Permutation> {
        let lookup = self.base.edge_lookup();
        let mut total = Permutation::identity(self.sheets);
        for (a, b) in cyclic_pairs(path) {
            let &(k, forward) = lookup
                .get(&(a, b))
                .ok_or_else(|| Error::InvalidInput(format!("{a}-{b} is not a mesh edge")))?;
            let step = if forward { self.transports[k].clone() } else { self.transports[k].inverse() };
            total = step.compose(&total);
        }
        Ok(total)
    }

    fn face_holonomy(&self, k: usize) -> Permutation {
        self.monodromy(&self.base.faces[k]).expect("faces are validated against the mesh")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiberedRepr", into = "FiberedRepr")]
pub struct FiberedQuantumPermutation {
    covering: Covering,
    d: usize,
    fibers: Vec<QuantumPermutation>,
}

#[derive(Serialize, Deserialize)]
struct FiberedRepr {
    covering: Covering,
    d: usize,
    fibers: Vec<QuantumPermutation>,
}

impl TryFrom<FiberedRepr> for FiberedQuantumPermutation {
    type Error = Error;

    fn try_from(r: FiberedRepr) -> Result<Self> {
        let f = FiberedQuantumPermutation::new(r.covering, r.fibers)?;
        if f.d != r.d {
            return Err(Error::DimensionMismatch(format!("declared d = {} but fibers have d = {}", r.d, f.d)));
        }
        Ok(f)
    }
}

impl From<FiberedQuantumPermutation> for FiberedRepr {
    fn from(f: FiberedQuantumPermutation) -> Self {
        FiberedRepr { covering: f.covering, d: f.d, fibers: f.fibers }
    }
}

impl FiberedQuantumPermutation {
    /// Checks shapes only; see [`verify_fibered`] for the magic-unitary and continuity checks.
    pub fn new(covering: Covering, fibers: Vec<QuantumPermutation>) -> Result<Self> {
        if fibers.len() != covering.base.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} fibers for {} base samples",
                fibers.len(),
                covering.base.len()
            )));
        }
        let d = fibers[0].d();
        if let Some(k) = fibers.iter().position(|q| q.n() != covering.sheets || q.d() != d) {
            return Err(Error::DimensionMismatch(format!("fiber {k} has the wrong shape")));
        }
        Ok(FiberedQuantumPermutation { covering, d, fibers })
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn fibers(&self) -> &[QuantumPermutation] {
        &self.fibers
    }

    pub fn fiber(&self, sample: usize) -> &QuantumPermutation {
        &self.fibers[sample]
    }

    pub fn replace_fiber(&mut self, sample: usize, q: QuantumPermutation) -> Result<()> {
        if sample >= self.fibers.len() || q.n() != self.covering.sheets || q.d() != self.d {
            return Err(Error::DimensionMismatch("replacement fiber does not fit".into()));
        }
        self.fibers[sample] = q;
        Ok(())
    }

    /// Applies `f(sample, fiber)` to every fiber.
    pub fn map_fibers(&self, mut f: impl FnMut(usize, &QuantumPermutation) -> Result<QuantumPermutation>) -> Result<Self> {
        let fibers = self.fibers.iter().enumerate().map(|(k, q)| f(k, q)).collect::<Result<Vec<_>>>()?;
        Self::new(self.covering.clone(), fibers)
    }

    /// Largest `‖u_{|x}(i,j) − u_{|x'}(π i, π j)‖` across `edge`.
    pub fn transport_jump(&self, edge: usize) -> f64 {
        let e = &self.covering.base.edges[edge];
        let pi = &self.covering.transports[edge];
        let (here, there) = (&self.fibers[e.from], &self.fibers[e.to]);
        let mut worst = WorstNorm::default();
        for ((i, j), m) in here.entries() {
            worst.offer(&(m - there.entry(pi.apply(i), pi.apply(j))));
        }
        worst.value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberedReport {
    pub valid: bool,
    pub samples: usize,
    pub worst_projection_defect: f64,
    pub worst_row_defect: f64,
    pub worst_column_defect: f64,
    pub worst_orthogonality_defect: f64,
    pub worst_transport_jump: f64,
    /// Samples whose fiber fails the magic-unitary check.
    pub invalid_samples: Vec<usize>,
    /// Mesh edges whose transport jump exceeds [`MAX_TRANSPORT_JUMP`].
    pub discontinuous_edges: Vec<usize>,
}

pub fn verify_fibered(f: &FiberedQuantumPermutation, tol: &TolerancePolicy) -> FiberedReport {
    let mut report = FiberedReport {
        valid: true,
        samples: f.fibers.len(),
        worst_projection_defect: 0.0,
        worst_row_defect: 0.0,
        worst_column_defect: 0.0,
        worst_orthogonality_defect: 0.0,
        worst_transport_jump: 0.0,
        invalid_samples: vec![],
        discontinuous_edges: vec![],
    };
    for (k, q) in f.fibers.iter().enumerate() {
        let r = q.verify(tol);
        report.worst_projection_defect = report.worst_projection_defect.max(r.worst_projection_defect);
        report.worst_row_defect = report.worst_row_defect.max(r.worst_row_defect);
        report.worst_column_defect = report.worst_column_defect.max(r.worst_column_defect);
        report.worst_orthogonality_defect = report.worst_orthogonality_defect.max(r.worst_orthogonality_defect);
        if !r.valid {
            report.invalid_samples.push(k);
        }
    }
    for edge in 0..f.covering.base.edges.len() {
        let jump = f.transport_jump(edge);
        report.worst_transport_jump = report.worst_transport_jump.max(jump);
        if jump > MAX_TRANSPORT_JUMP {
            report.discontinuous_edges.push(edge);
        }
    }
    report.valid = report.invalid_samples.is_empty() && report.discontinuous_edges.is_empty();
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub holds: bool,
    pub max_ratio: f64,
    pub worst_edge: Option<usize>,
}

/// Checks `‖u_{|x} − transported u_{|x'}‖ ≤ bound · length` on every mesh edge.
pub fn sampled_continuity_check(f: &FiberedQuantumPermutation, lipschitz_bound: f64) -> ContinuityReport {
    let mut max_ratio = 0.0;
    let mut worst_edge = None;
    for (k, e) in f.covering.base.edges.iter().enumerate() {
        let ratio = f.transport_jump(k) / e.length;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_edge = Some(k);
        }
    }
    ContinuityReport { holds: max_ratio <= lipschitz_bound, max_ratio, worst_edge }
}

/// `u_{(x,i),(y,j)} = δ_{x,y} q_{i,j}` on a trivial covering.
pub fn constant_deck_from_qperm(q: &QuantumPermutation, covering: &Covering) -> Result<FiberedQuantumPermutation> {
    if !covering.is_trivial() {
        return Err(Error::InvalidInput("constant deck transformations need a trivial covering".into()));
    }
    if q.n() != covering.sheets {
        return Err(Error::DimensionMismatch(format!("{} points for {} sheets", q.n(), covering.sheets)));
    }
    FiberedQuantumPermutation::new(covering.clone(), vec![q.clone(); covering.base.len()])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeckIntertwinerReport {
    pub holds: bool,
    pub worst_defect: f64,
    pub unitary: bool,
    pub worst_unitarity_defect: f64,
}

/// Checks `T_x σ_{|x}(i,j) = τ_{|x}(i,j) T_x` at every sample.
pub fn deck_intertwiner_check(
    sigma: &FiberedQuantumPermutation,
    tau: &FiberedQuantumPermutation,
    t: &[ComplexMatrix],
    tol: &TolerancePolicy,
) -> Result<DeckIntertwinerReport> {
    if sigma.covering != tau.covering {
        return Err(Error::InvalidInput("deck transformations live on different coverings".into()));
    }
    if t.len() != sigma.fibers.len() {
        return Err(Error::DimensionMismatch(format!("{} operators for {} samples", t.len(), sigma.fibers.len())));
    }
    if t.iter().any(|m| m.rows() != tau.d || m.cols() != sigma.d) {
        return Err(Error::DimensionMismatch(format!("operators must be {}x{}", tau.d, sigma.d)));
    }
    let mut worst_defect: f64 = 0.0;
    let mut worst_unitarity_defect: f64 = 0.0;
    for ((m, s), u) in t.iter().zip(&sigma.fibers).zip(&tau.fibers) {
        worst_defect = worst_defect.max(intertwining_defect(m, s, u));
        let unitarity = if m.is_square() { m.unitarity_defect() } else { f64::INFINITY };
        worst_unitarity_defect = worst_unitarity_defect.max(unitarity);
    }
    Ok(DeckIntertwinerReport {
        holds: worst_defect <= tol.atol,
        worst_defect,
        unitary: worst_unitarity_defect <= tol.atol,
        worst_unitarity_defect,
    })
}

/// Sorted (descending) spectrum of the Gram matrix `tr(u_{ij} u_{kl})/d`, after removing the
/// all-ones direction. Invariant under conjugating every entry by one unitary and under
/// relabelling the sheets.
pub fn fiber_profile(q: &QuantumPermutation) -> Vec<f64> {
    let n = q.n();
    let m = n * n;
    let entries: Vec<&ComplexMatrix> = (0..m).map(|k| q.entry(k / n, k % n)).collect();
    let gram = DMatrix::from_fn(m, m, |a, b| (entries[a] * entries[b]).normalized_trace().re);
    let gram = (&gram + gram.transpose()) * 0.5;
    let deflate = DMatrix::<f64>::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64);
    let deflated = &deflate * gram * &deflate;
    let mut values: Vec<f64> = deflated.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn fiber_invariant_profile(f: &FiberedQuantumPermutation) -> Vec<Vec<f64>> {
    f.fibers.iter().map(fiber_profile).collect()
}

/// `max − min` of the leading profile component along the base.
pub fn profile_range(profile: &[Vec<f64>]) -> f64 {
    let leading = profile.iter().filter_map(|p| p.first().copied());
    let (lo, hi) = leading.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// `sample_index, coordinates…, invariant components…`, one row per sample.
pub fn profile_csv(f: &FiberedQuantumPermutation, profile: &[Vec<f64>]) -> String {
    let points = f.covering.base.points();
    let dim = points.first().map_or(0, Vec::len);
    let width = profile.first().map_or(0, Vec::len);
    let mut out = String::from("sample_index");
    for c in 0..dim {
        out.push_str(&format!(",coord{c}"));
    }
    for c in 0..width {
        out.push_str(&format!(",lambda{c}"));
    }
    out.push('\n');
    for (k, (p, values)) in points.iter().zip(profile).enumerate() {
        out.push_str(&k.to_string());
        for v in p.iter().chain(values) {
            out.push_str(&format!(",{v:.12e}"));
        }
        out.push('\n');
    }
    out
}

/// First Chern number of a sampled projection family over the oriented faces, by the
/// plaquette formula `−(1/2π) Σ arg Π det(F_a* F_b)` with `F` an orthonormal frame of the range.
pub fn chern_number(projections: &[ComplexMatrix], faces: &[Vec<usize>]) -> Result<f64> {
    if faces.iter().flatten().any(|&v| v >= projections.len()) {
        return Err(Error::DimensionMismatch("face refers to a missing sample".into()));
    }
    let frames = projections.iter().map(range_frame).collect::<Result<Vec<_>>>()?;
    let rank = frames.first().map_or(0, ComplexMatrix::cols);
    if frames.iter().any(|f| f.cols() != rank) {
        return Err(Error::InvalidInput("projection family changes rank".into()));
    }
    if rank == 0 {
        return Ok(0.0);
    }
    let mut flux = 0.0;
    for face in faces {
        let mut product = ONE;
        for (a, b) in cyclic_pairs(face) {
            let overlap = &frames[a].adjoint() * &frames[b];
            product *= overlap.as_dmatrix().clone().determinant();
        }
        if product.norm() < 1e-12 {
            return Err(Error::Numerical("orthogonal frames on a plaquette; refine the mesh".into()));
        }
        flux += product.arg();
    }
    Ok(-flux / (2.0 * PI))
}

fn range_frame(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecomposition(p)?;
    let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
    Ok(eig.vectors.columns(p.rows() - rank, rank))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernComparison {
    /// Chern numbers of the entry families `x ↦ u_{|x}(i,j)`, row-major over `(i, j)`.
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
    /// Some entry family has different (rounded) Chern numbers, so no continuous unitary
    /// deck intertwiner exists.
    pub obstructed: bool,
}

pub fn chern_obstruction(sigma: &FiberedQuantumPermutation, tau: &FiberedQuantumPermutation) -> Result<ChernComparison> {
    if sigma.covering != tau.covering {
        return Err(Error::InvalidInput("deck transformations live on different coverings".into()));
    }
    let faces = sigma.covering.base.faces();
    if faces.is_empty() {
        return Err(Error::InvalidInput("the base mesh has no faces".into()));
    }
    let entry_cherns = |f: &FiberedQuantumPermutation| -> Result<Vec<f64>> {
        let n = f.covering.sheets;
        (0..n * n)
            .map(|k| {
                let family: Vec<ComplexMatrix> = f.fibers.iter().map(|q| q.entry(k / n, k % n).clone()).collect();
                chern_number(&family, faces)
            })
            .collect()
    };
    let (s, t) = (entry_cherns(sigma)?, entry_cherns(tau)?);
    let obstructed = s.iter().zip(&t).any(|(a, b)| (a.round() - b.round()).abs() > 0.5);
    Ok(ChernComparison { sigma: s, tau: t, obstructed })
}

fn matrix_projection(rank_one_index: usize) -> ComplexMatrix {
    ComplexMatrix::diag_real(if rank_one_index == 0 { &[1.0, 0.0] } else { &[0.0, 1.0] })
}

/// `γ(t) = [[cos t, sin t], [−sin t, cos t]]`.
pub fn rotation(t: f64) -> ComplexMatrix {
    let (s, c) = t.sin_cos();
    ComplexMatrix::from_real_rows(&[&[c, s], &[-s, c]])
}

/// `γ(t)* p_k γ(t)` in double-angle form, exact at multiples of `π/4`.
fn rotated_projection(k: usize, t: f64) -> ComplexMatrix {
    let phase = unit_phase(2.0 * t / (2.0 * PI));
    let (s2, c2) = (phase.im, phase.re);
    let sign = if k == 0 { 1.0 } else { -1.0 };
    ComplexMatrix::from_real_rows(&[
        &[0.5 * (1.0 + sign * c2), 0.5 * sign * s2],
        &[0.5 * sign * s2, 0.5 * (1.0 - sign * c2)],
    ])
}

/// The 2-point quantum permutation `[[γ* p_0 γ, γ* p_1 γ], [γ* p_1 γ, γ* p_0 γ]]` at angle `t`.
pub fn rotated_flip_fiber(t: f64) -> QuantumPermutation {
    QuantumPermutation::from_fn(2, 2, |i, j| rotated_projection((i + j) % 2, t)).expect("2x2 blocks")
}

/// The constant fiber `[[p_0, p_1], [p_1, p_0]]`.
pub fn constant_flip_fiber() -> QuantumPermutation {
    QuantumPermutation::from_fn(2, 2, |i, j| matrix_projection((i + j) % 2)).expect("2x2 blocks")
}

/// Trivial 2-sheeted covering of the circle with fibers `γ(x)* p_{i−j} γ(x)`.
pub fn example_trivial_2sheet_circle(samples: usize) -> Result<FiberedQuantumPermutation> {
    check_samples(samples)?;
    let covering = Covering::trivial(SampledBase::circle(samples)?, 2)?;
    let fibers = covering.base.points.iter().map(|p| rotated_flip_fiber(p[0])).collect();
    FiberedQuantumPermutation::new(covering, fibers)
}

/// The rotations `γ(x)` at the circle samples: a deck intertwiner from
/// [`example_trivial_2sheet_circle`] to the constant flip family.
pub fn circle_rotation_family(samples: usize) -> Result<Vec<ComplexMatrix>> {
    check_samples(samples)?;
    Ok(SampledBase::circle(samples)?.points.iter().map(|p| rotation(p[0])).collect())
}

/// The covering `z ↦ z²` with fibers `γ(p(e))* (δ_{e,f} p_0 + δ_{e,−f} p_1) γ(p(e))`; the sheets
/// swap across the wrap edge.
pub fn example_nontrivial_2sheet_circle(samples: usize) -> Result<FiberedQuantumPermutation> {
    check_samples(samples)?;
    let covering = Covering::cyclic_circle(samples, 2, 1)?;
    let fibers = covering.base.points.iter().map(|p| rotated_flip_fiber(p[0])).collect();
    FiberedQuantumPermutation::new(covering, fibers)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 samples, got {samples}")));
    }
    Ok(())
}

/// `½(1 + x·σ)` for a unit vector `x`.
pub fn bott_projection(x: &[f64]) -> Result<ComplexMatrix> {
    let &[a, b, c] = x else {
        return Err(Error::DimensionMismatch("Bott projection needs a point of R³".into()));
    };
    Ok(ComplexMatrix::from_complex_rows(&[
        &[C64::new(0.5 * (1.0 + c), 0.0), C64::new(0.5 * a, -0.5 * b)],
        &[C64::new(0.5 * a, 0.5 * b), C64::new(0.5 * (1.0 - c), 0.0)],
    ]))
}

/// Trivial 2-sheeted covering of the sphere with fibers `[[p, q], [q, p]]`, `p` the Bott
/// projection and `q = 1 − p`.
pub fn example_sphere_linebundle(grid: &SampledBase) -> Result<FiberedQuantumPermutation> {
    if grid.points.iter().any(|p| p.len() != 3 || (p.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidInput("grid points must be unit vectors in R³".into()));
    }
    let covering = Covering::trivial(grid.clone(), 2)?;
    let id = ComplexMatrix::identity(2);
    let fibers = grid
        .points
        .iter()
        .map(|x| {
            let p = bott_projection(x)?;
            let q = &id - &p;
            QuantumPermutation::new(vec![vec![p.clone(), q.clone()], vec![q, p]])
        })
        .collect::<Result<Vec<_>>>()?;
    FiberedQuantumPermutation::new(covering, fibers)
}

/// Chern numbers of the `p` and `q` families of [`example_sphere_linebundle`].
pub fn sphere_chern_numbers(f: &FiberedQuantumPermutation) -> Result<(f64, f64)> {
    let faces = f.covering.base.faces();
    let family = |j: usize| f.fibers.iter().map(|q| q.entry(0, j).clone()).collect::<Vec<_>>();
    Ok((chern_number(&family(0), faces)?, chern_number(&family(1), faces)?))
}

/// `v^g(s,t) = γ(s,t)* π^g γ(s,t)` with `γ(s,t) = exp(sX + tY)` and `X`, `Y` commuting
/// logarithms of `θ_{(1,0)}`, `θ_{(0,1)}` over `A = Z/2`. Sheets are the points `(a, b)`,
/// indexed `2a + b`.
#[derive(Clone, Debug)]
pub struct EquivariantTorus {
    u: QuantumPermutation,
    basis: ComplexMatrix,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl EquivariantTorus {
    pub fn new(g: &ComplexMatrix, tol: &TolerancePolicy) -> Result<Self> {
        let group = FiniteAbelianGroup::cyclic(2)?;
        let u = weyl_qperm(&group, g, tol)?;
        if commutant_dimension(&u, tol)? != 1 {
            return Err(Error::Reducible("π^g".into()));
        }
        let sys = WeylSystem::new(&group);
        let th_s = theta(&sys, 1, 0);
        let th_t = theta(&sys, 0, 1);
        let mixed = &th_s + &th_t.scale_real(2.0);
        let eig = hermitian_eigendecomposition(&mixed)?;
        let basis = eig.vectors;
        let alpha = eigenphases(&basis, &th_s)?;
        let beta = eigenphases(&basis, &th_t)?;
        Ok(EquivariantTorus { u, basis, alpha, beta })
    }

    pub fn qperm(&self) -> &QuantumPermutation {
        &self.u
    }

    pub fn gamma(&self, s: f64, t: f64) -> ComplexMatrix {
        let phases: Vec<C64> =
            self.alpha.iter().zip(&self.beta).map(|(a, b)| C64::from_polar(1.0, s * a + t * b)).collect();
        &(&self.basis * &ComplexMatrix::diag(&phases)) * &self.basis.adjoint()
    }

    pub fn fiber(&self, s: f64, t: f64) -> Result<QuantumPermutation> {
        self.u.compress(&self.gamma(s, t))
    }

    pub fn deck(&self, ns: usize, nt: usize) -> Result<FiberedQuantumPermutation> {
        let base = SampledBase::torus(ns, nt)?;
        let shift_a = Permutation::new(vec![2, 3, 0, 1])?;
        let shift_b = Permutation::new(vec![1, 0, 3, 2])?;
        let transports = base
            .edges
            .iter()
            .map(|e| {
                let (i0, j0) = (e.from / nt, e.from % nt);
                let (i1, j1) = (e.to / nt, e.to % nt);
                if i1 < i0 {
                    shift_a.clone()
                } else if j1 < j0 {
                    shift_b.clone()
                } else {
                    Permutation::identity(4)
                }
            })
            .collect();
        let fibers = base.points.iter().map(|p| self.fiber(p[0], p[1])).collect::<Result<Vec<_>>>()?;
        FiberedQuantumPermutation::new(Covering::new(base, 4, transports)?, fibers)
    }

    /// Largest defects of `v(s,1)_{(a,b),(c,d)} = v(s,0)_{(a,b+1),(c,d+1)}` and
    /// `v(1,t)_{(a,b),(c,d)} = v(0,t)_{(a+1,b),(c+1,d)}` over `samples` seam points each.
    pub fn seam_defects(&self, samples: usize) -> Result<(f64, f64)> {
        let shift_a = Permutation::new(vec![2, 3, 0, 1])?;
        let shift_b = Permutation::new(vec![1, 0, 3, 2])?;
        let mut worst = (0.0_f64, 0.0_f64);
        for k in 0..samples {
            let r = k as f64 / samples as f64;
            let top = self.fiber(r, 1.0)?;
            let bottom = self.fiber(r, 0.0)?.relabel(&shift_b, &shift_b)?;
            worst.0 = worst.0.max(max_entry_gap(&top, &bottom));
            let right = self.fiber(1.0, r)?;
            let left = self.fiber(0.0, r)?.relabel(&shift_a, &shift_a)?;
            worst.1 = worst.1.max(max_entry_gap(&right, &left));
        }
        Ok(worst)
    }
}

fn max_entry_gap(a: &QuantumPermutation, b: &QuantumPermutation) -> f64 {
    let mut worst = WorstNorm::default();
    for ((i, j), m) in a.entries() {
        worst.offer(&(m - b.entry(i, j)));
    }
    worst.value
}

/// Phases of the unitary `u`, diagonal in `basis`. Phases at `π` alternate in sign so that
/// the logarithm is traceless whenever `det u = 1`.
fn eigenphases(basis: &ComplexMatrix, u: &ComplexMatrix) -> Result<Vec<f64>> {
    let diag = &(&basis.adjoint() * u) * basis;
    let n = diag.rows();
    let off: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| diag.get(i, j).norm())
        .fold(0.0, f64::max);
    if off > 1e-9 {
        return Err(Error::Numerical(format!("θ is not diagonal in the joint eigenbasis (defect {off:e})")));
    }
    let mut flip = false;
    Ok((0..n)
        .map(|k| {
            let z = diag.get(k, k);
            if (z + ONE).norm() < 1e-9 {
                flip = !flip;
                if flip {
                    PI
                } else {
                    -PI
                }
            } else {
                z.arg()
            }
        })
        .collect())
}

pub fn example_equivariant_torus(
    ns: usize,
    nt: usize,
    g: &ComplexMatrix,
    tol: &TolerancePolicy,
) -> Result<FiberedQuantumPermutation> {
    check_samples(ns)?;
    check_samples(nt)?;
    EquivariantTorus::new(g, tol)?.deck(ns, nt)
}

/// Path of quantum permutations over `z ↦ z⁴` joining `v = π^g` to `w_{i,j} = v_{i−1,j−1}`,
/// with `Z/4` identified with `Z/2 × Z/2` lexicographically.
#[derive(Clone, Debug)]
pub struct FourSheetedPath {
    pub g: ComplexMatrix,
    /// An element `c_1 g c_2` (Clifford `c_i`) with `π^h ≅ w`.
    pub h: ComplexMatrix,
    /// Unitary `c` with `c* π^h_{i,j} c = w_{i,j}`.
    pub alignment: ComplexMatrix,
    pub v: QuantumPermutation,
    pub w: QuantumPermutation,
}

impl FourSheetedPath {
    pub fn new(g: &ComplexMatrix, tol: &TolerancePolicy) -> Result<Self> {
        let group = FiniteAbelianGroup::cyclic(2)?;
        let v = weyl_qperm(&group, g, tol)?;
        if commutant_dimension(&v, tol)? != 1 {
            return Err(Error::Reducible("π^g".into()));
        }
        let back = Permutation::shift(4, -1);
        let w = v.relabel(&back, &back)?;
        let cliffords = qubit_clifford_group();
        for c1 in &cliffords {
            for c2 in &cliffords {
                let h = &(c1 * g) * c2;
                let candidate = weyl_qperm(&group, &h, tol)?;
                if let Some(u) = are_equivalent(&w, &candidate, tol)? {
                    let h = avoid_branch_cut(g, &h);
                    let alignment = avoid_branch_cut(&ComplexMatrix::identity(4), &u);
                    return Ok(FourSheetedPath { g: g.clone(), h, alignment, v, w });
                }
            }
        }
        Err(Error::Numerical("no Clifford translate of g realises the shifted quantum permutation".into()))
    }

    /// `c(t)* π^{γ(t)} c(t)` with `γ` and `c` geodesics from `g` to `h` and from `1` to the
    /// alignment.
    pub fn fiber(&self, t: f64) -> Result<QuantumPermutation> {
        let group = FiniteAbelianGroup::cyclic(2)?;
        let gamma = unitary_geodesic(&self.g, &self.h, t)?;
        let c = unitary_geodesic(&ComplexMatrix::identity(4), &self.alignment, t)?;
        weyl_qperm(&group, &gamma, &TolerancePolicy::default())?.compress(&c)
    }

    /// Samples at `t = k/samples`; the wrap edge carries `i ↦ i − 1`.
    pub fn deck(&self, samples: usize) -> Result<FiberedQuantumPermutation> {
        let covering = Covering::cyclic_circle(samples, 4, -1)?;
        let fibers = (0..samples).map(|k| self.fiber(k as f64 / samples as f64)).collect::<Result<Vec<_>>>()?;
        FiberedQuantumPermutation::new(covering, fibers)
    }

    /// Largest gaps between the path endpoints and `v`, `w`.
    pub fn endpoint_defects(&self) -> Result<(f64, f64)> {
        Ok((max_entry_gap(&self.fiber(0.0)?, &self.v), max_entry_gap(&self.fiber(1.0)?, &self.w)))
    }
}

/// Rescales `u1` by a phase when `u0* u1` has eigenvalue `−1`. The phase making
/// `det(u0* u1) = 1` moves a 2×2 spectrum off `−1`; larger spectra get a small rotation.
fn avoid_branch_cut(u0: &ComplexMatrix, u1: &ComplexMatrix) -> ComplexMatrix {
    match unitary_geodesic(u0, u1, 0.5) {
        Err(Error::BranchCut) => {
            let det = (&u0.adjoint() * u1).as_dmatrix().clone().determinant();
            let n = u0.rows() as f64;
            let mut phase = C64::from_polar(1.0, -det.arg() / n);
            let mut candidate = u1.scale(phase);
            while matches!(unitary_geodesic(u0, &candidate, 0.5), Err(Error::BranchCut)) {
                phase *= C64::from_polar(1.0, 0.1);
                candidate = u1.scale(phase);
            }
            candidate
        }
        _ => u1.clone(),
    }
}

pub fn example_four_sheeted_path(samples: usize, g: &ComplexMatrix, tol: &TolerancePolicy) -> Result<FiberedQuantumPermutation> {
    check_samples(samples)?;
    FourSheetedPath::new(g, tol)?.deck(samples)
}

pub type Dyadic = Ratio<i64>;

/// `σ`: `x/2` on `[0,¼]`, `3x/2 − ¼` on `[¼,½]`, identity on `[½,1]`.
pub fn circle_sigma(x: Dyadic) -> Dyadic {
    let (quarter, half) = (Ratio::new(1, 4), Ratio::new(1, 2));
    if x <= quarter {
        x * half
    } else if x <= half {
        x * Ratio::new(3, 2) - quarter
    } else {
        x
    }
}

/// `τ`: identity on `[0,½]`, `x/2 + ¼` on `[½,¾]`, `3x/2 − ½` on `[¾,1]`.
pub fn circle_tau(x: Dyadic) -> Dyadic {
    let (quarter, half) = (Ratio::new(1, 4), Ratio::new(1, 2));
    if x <= half {
        x
    } else if x <= Ratio::new(3, 4) {
        x * half + quarter
    } else {
        x * Ratio::new(3, 2) - half
    }
}

fn circle_sigma_inv(y: Dyadic) -> Dyadic {
    if y <= Ratio::new(1, 8) {
        y * 2
    } else if y <= Ratio::new(1, 2) {
        (y + Ratio::new(1, 4)) * Ratio::new(2, 3)
    } else {
        y
    }
}

fn circle_tau_inv(y: Dyadic) -> Dyadic {
    if y <= Ratio::new(1, 2) {
        y
    } else if y <= Ratio::new(5, 8) {
        (y - Ratio::new(1, 4)) * 2
    } else {
        (y + Ratio::new(1, 2)) * Ratio::new(2, 3)
    }
}

/// The quantum homeomorphism `u^ρ_{x,y} = Σ_r δ_{x,σ^r(y)} p_r + Σ_s δ_{x,τ^s(y)} q_s − δ_{x,y} 1`
/// of the circle `[0,1)`, for the disjoint piecewise-linear homeomorphisms [`circle_sigma`]
/// and [`circle_tau`]. Points are exact rationals.
#[derive(Clone, Debug)]
pub struct LazyQuantumHomeomorphism {
    k: usize,
    ps: Vec<ComplexMatrix>,
    qs: Vec<ComplexMatrix>,
    probes: Vec<Dyadic>,
}

pub fn disjoint_homeo_circle(k: usize, samples: usize) -> Result<LazyQuantumHomeomorphism> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidInput(format!("dimension k = {k} must lie in 1..=16")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one probe point".into()));
    }
    Ok(LazyQuantumHomeomorphism {
        k,
        ps: (1..=k).map(|r| diagonal_projection(k, r)).collect(),
        qs: (1..=k).map(|s| fourier_projection(k, s)).collect(),
        probes: (0..samples).map(|j| Ratio::new(j as i64, samples as i64)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LazyReport {
    pub valid: bool,
    pub probes: usize,
    pub worst_projection_defect: f64,
    pub worst_row_defect: f64,
    pub worst_column_defect: f64,
}

impl LazyQuantumHomeomorphism {
    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn probes(&self) -> &[Dyadic] {
        &self.probes
    }

    pub fn p(&self, r: usize) -> &ComplexMatrix {
        &self.ps[r - 1]
    }

    pub fn q(&self, s: usize) -> &ComplexMatrix {
        &self.qs[s - 1]
    }

    fn orbit(&self, y: Dyadic, f: fn(Dyadic) -> Dyadic) -> Vec<Dyadic> {
        let mut out = Vec::with_capacity(self.k);
        let mut z = y;
        for _ in 0..self.k {
            z = f(z);
            out.push(z);
        }
        out
    }

    pub fn entry(&self, x: Dyadic, y: Dyadic) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.k, self.k);
        for (z, p) in self.orbit(y, circle_sigma).into_iter().zip(&self.ps) {
            if z == x {
                m = &m + p;
            }
        }
        for (z, q) in self.orbit(y, circle_tau).into_iter().zip(&self.qs) {
            if z == x {
                m = &m + q;
            }
        }
        if x == y {
            m = &m - &ComplexMatrix::identity(self.k);
        }
        m
    }

    /// The `y` with `u_{x,y} ≠ 0` can only be `σ^{−r}(x)`, `τ^{−s}(x)` or `x`.
    pub fn row_support(&self, x: Dyadic) -> Vec<Dyadic> {
        let mut out = vec![x];
        out.extend(self.orbit(x, circle_sigma_inv));
        out.extend(self.orbit(x, circle_tau_inv));
        out.sort();
        out.dedup();
        out
    }

    pub fn column_support(&self, y: Dyadic) -> Vec<Dyadic> {
        let mut out = vec![y];
        out.extend(self.orbit(y, circle_sigma));
        out.extend(self.orbit(y, circle_tau));
        out.sort();
        out.dedup();
        out
    }

    /// Row and column sums over the declared supports, and projection defects, at every probe.
    pub fn verify_probes(&self, tol: &TolerancePolicy) -> LazyReport {
        let id = ComplexMatrix::identity(self.k);
        let mut proj = WorstNorm::default();
        let mut rows = WorstNorm::default();
        let mut cols = WorstNorm::default();
        for &x in &self.probes {
            let mut row_sum = ComplexMatrix::zeros(self.k, self.k);
            for y in self.row_support(x) {
                let e = self.entry(x, y);
                proj.offer(&(&(&e * &e) - &e));
                proj.offer(&(&e - &e.adjoint()));
                row_sum = &row_sum + &e;
            }
            rows.offer(&(&row_sum - &id));
            let mut col_sum = ComplexMatrix::zeros(self.k, self.k);
            for z in self.column_support(x) {
                col_sum = &col_sum + &self.entry(z, x);
            }
            cols.offer(&(&col_sum - &id));
        }
        LazyReport {
            valid: proj.value.max(rows.value).max(cols.value) <= tol.atol,
            probes: self.probes.len(),
            worst_projection_defect: proj.value,
            worst_row_defect: rows.value,
            worst_column_defect: cols.value,
        }
    }

    /// `Σ_r f(σ^r y) p_r + Σ_s f(τ^s y) q_s − f(y) 1`, the image of `f` in column `y`.
    pub fn pushforward(&self, f: &dyn Fn(f64) -> f64, y: Dyadic) -> ComplexMatrix {
        let eval = |z: Dyadic| f(*z.numer() as f64 / *z.denom() as f64);
        let mut m = ComplexMatrix::identity(self.k).scale_real(-eval(y));
        for (z, p) in self.orbit(y, circle_sigma).into_iter().zip(&self.ps) {
            m = &m + &p.scale_real(eval(z));
        }
        for (z, q) in self.orbit(y, circle_tau).into_iter().zip(&self.qs) {
            m = &m + &q.scale_real(eval(z));
        }
        m
    }

    /// Largest `‖F(y') − F(y)‖ / |y' − y|` between consecutive probes (cyclically), where
    /// `F` is [`Self::pushforward`] of a function `f` on the circle `[0,1)`.
    pub fn continuity_ratio(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let n = self.probes.len();
        let values: Vec<ComplexMatrix> = self.probes.iter().map(|&y| self.pushforward(f, y)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            let gap = if j == 0 { 1.0 - to_f64(self.probes[i]) + to_f64(self.probes[0]) } else { to_f64(self.probes[j] - self.probes[i]) };
            worst = worst.max((&values[j] - &values[i]).op_norm() / gap);
        }
        worst
    }
}

fn to_f64(z: Dyadic) -> f64 {
    *z.numer() as f64 / *z.denom() as f64
}

/// `[[1, 1], [1, 1]]/2` and `[[1, −1], [−1, 1]]/2`.
pub fn plus_minus_projections() -> (ComplexMatrix, ComplexMatrix) {
    let h = 0.5;
    (
        ComplexMatrix::from_real_rows(&[&[h, h], &[h, h]]),
        ComplexMatrix::from_real_rows(&[&[h, -h], &[-h, h]]),
    )
}
