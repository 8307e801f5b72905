//! Finite simple graphs and the classical combinatorics used by the quantum checks.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::perm::Permutation;

/// Largest vertex count accepted for exhaustive isomorphism and automorphism search.
pub const MAX_SEARCH_VERTICES: usize = 16;

/// Undirected loop-free graph on `{0, …, n-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adjacency: vec![false; n * n], labels: None }
    }

    /// Builds from an edge list; repeated edges are merged, loops and out-of-range endpoints
    /// are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(x, y) in edges {
            if x >= n || y >= n {
                return Err(Error::InvalidInput(format!("edge ({x}, {y}) out of range for {n} vertices")));
            }
            if x == y {
                return Err(Error::InvalidInput(format!("loop at vertex {x}")));
            }
            g.adjacency[x * n + y] = true;
            g.adjacency[y * n + x] = true;
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch(format!("{} labels for {} vertices", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for x in 0..n {
            for y in 0..n {
                g.adjacency[x * n + y] = x != y;
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("a cycle needs at least 3 vertices".into()));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("valid path")
    }

    /// `K_{1,k}` with centre 0.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Graph::from_edges(k + 1, &edges).expect("valid star")
    }

    /// `K_4` minus an edge.
    pub fn diamond() -> Self {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]).expect("valid")
    }

    /// `C_4` on `0..4` with vertex 4 pendant at 0.
    pub fn cycle_with_pendant() -> Self {
        Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).expect("valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, &edges).expect("valid")
    }

    /// Root 0 joined to stems 1 and 2; leaves 3, 4 hang off 1 and 5, 6 off 2.
    pub fn double_cherry_tree() -> Self {
        Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).expect("valid")
    }

    /// Stem 0 with leaves 1, 2 and a single edge into the triangle `3, 4, 5`.
    pub fn cherry_on_triangle() -> Self {
        Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 3)]).expect("valid")
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let n = self.n + other.n;
        let mut g = Graph::empty(n);
        for (x, y) in self.edges() {
            g.add_edge(x, y);
        }
        for (x, y) in other.edges() {
            g.add_edge(x + self.n, y + self.n);
        }
        g
    }

    fn add_edge(&mut self, x: usize, y: usize) {
        self.adjacency[x * self.n + y] = true;
        self.adjacency[y * self.n + x] = true;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_adjacent(&self, x: usize, y: usize) -> bool {
        self.adjacency[x * self.n + y]
    }

    /// Edges `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if self.is_adjacent(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&a| a).count() / 2
    }

    pub fn degree(&self, x: usize) -> usize {
        (0..self.n).filter(|&y| self.is_adjacent(x, y)).count()
    }

    pub fn neighbours(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.is_adjacent(x, y)).collect()
    }

    /// 0/1 adjacency as integers.
    pub fn adjacency_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|x| (0..self.n).map(|y| u8::from(self.is_adjacent(x, y))).collect()).collect()
    }

    pub fn adjacency_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |x, y| {
            crate::linalg::C64::new(if self.is_adjacent(x, y) { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn complement(&self) -> Self {
        let n = self.n;
        let mut g = Graph::empty(n);
        for x in 0..n {
            for y in 0..n {
                g.adjacency[x * n + y] = x != y && !self.is_adjacent(x, y);
            }
        }
        g.labels = self.labels.clone();
        g
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(|d| d.is_finite())
    }

    fn bfs(&self, source: usize) -> Vec<Distance> {
        let mut dist = vec![Distance::Infinite; self.n];
        dist[source] = Distance::Finite(0);
        let mut queue = VecDeque::from([(source, 0usize)]);
        while let Some((x, d)) = queue.pop_front() {
            for y in 0..self.n {
                if self.is_adjacent(x, y) && dist[y] == Distance::Infinite {
                    dist[y] = Distance::Finite(d + 1);
                    queue.push_back((y, d + 1));
                }
            }
        }
        dist
    }

    /// All-pairs shortest path lengths.
    pub fn distance_matrix(&self) -> Vec<Vec<Distance>> {
        (0..self.n).map(|x| self.bfs(x)).collect()
    }

    /// Parses either the JSON form `{"n":..,"edges":[[i,j],..]}` or an edge list with one
    /// `i j` pair per line. In the edge-list form `#` starts a comment and an optional line
    /// holding a single integer fixes the vertex count.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let mut declared = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("line {}: expected integers, got {line:?}", lineno + 1)))?;
            match fields.as_slice() {
                [n] if declared.is_none() && edges.is_empty() => declared = Some(*n),
                [x, y] => edges.push((*x, *y)),
                _ => return Err(Error::InvalidInput(format!("line {}: expected \"i j\", got {line:?}", lineno + 1))),
            }
        }
        let n = declared.unwrap_or_else(|| edges.iter().map(|&(x, y)| x.max(y) + 1).max().unwrap_or(0));
        Graph::from_edges(n, &edges)
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            edges: Vec<[usize; 2]>,
            #[serde(skip_serializing_if = "Option::is_none")]
            labels: Option<&'a [String]>,
        }
        Repr { n: self.n, edges: self.edges().into_iter().map(|(x, y)| [x, y]).collect(), labels: self.labels() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            edges: Vec<[usize; 2]>,
            #[serde(default)]
            labels: Option<Vec<String>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let edges: Vec<_> = repr.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(repr.n, &edges).map_err(D::Error::custom)?;
        match repr.labels {
            Some(labels) => g.with_labels(labels).map_err(D::Error::custom),
            None => Ok(g),
        }
    }
}

/// Graph distance; `Infinite` between different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub maps: Vec<Permutation>,
    /// True when the search stopped at the limit; more maps may exist.
    pub truncated: bool,
}

/// Bijections `σ` with `(x,y) ∈ E_X ⇔ (σ(x),σ(y)) ∈ E_Y`, found by backtracking with degree
/// pruning, in lexicographic order of image lists.
pub fn isomorphism_search(x: &Graph, y: &Graph, limit: usize) -> Result<SearchResult> {
    if x.n() > MAX_SEARCH_VERTICES || y.n() > MAX_SEARCH_VERTICES {
        return Err(Error::InvalidInput(format!(
            "exhaustive search supports at most {MAX_SEARCH_VERTICES} vertices"
        )));
    }
    let mut result = SearchResult { maps: Vec::new(), truncated: false };
    if x.n() != y.n() || x.edge_count() != y.edge_count() {
        return Ok(result);
    }
    let n = x.n();
    let dx: Vec<usize> = (0..n).map(|v| x.degree(v)).collect();
    let dy: Vec<usize> = (0..n).map(|v| y.degree(v)).collect();
    let mut sx = dx.clone();
    let mut sy = dy.clone();
    sx.sort_unstable();
    sy.sort_unstable();
    if sx != sy {
        return Ok(result);
    }
    let candidates: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&w| dy[w] == dx[v]).collect()).collect();
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack(x, y, &candidates, 0, &mut images, &mut used, limit, &mut result);
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    x: &Graph,
    y: &Graph,
    candidates: &[Vec<usize>],
    v: usize,
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    limit: usize,
    out: &mut SearchResult,
) {
    if out.truncated {
        return;
    }
    if v == x.n() {
        if out.maps.len() == limit {
            out.truncated = true;
            return;
        }
        out.maps.push(Permutation::new(images.clone()).expect("injective by construction"));
        return;
    }
    for &w in &candidates[v] {
        if used[w] {
            continue;
        }
        if (0..v).any(|u| x.is_adjacent(u, v) != y.is_adjacent(images[u], w)) {
            continue;
        }
        images[v] = w;
        used[w] = true;
        backtrack(x, y, candidates, v + 1, images, used, limit, out);
        used[w] = false;
        images[v] = usize::MAX;
        if out.truncated {
            return;
        }
    }
}

pub fn automorphism_search(x: &Graph, limit: usize) -> Result<SearchResult> {
    isomorphism_search(x, x, limit)
}

pub fn find_isomorphism(x: &Graph, y: &Graph) -> Result<Option<Permutation>> {
    Ok(isomorphism_search(x, y, 1)?.maps.into_iter().next())
}

/// Unordered pairs of nontrivial permutations with disjoint supports, as index pairs `i < j`.
pub fn find_disjoint_pairs(autos: &[Permutation]) -> Vec<(usize, usize)> {
    let supports: Vec<Vec<usize>> = autos.iter().map(|p| p.support()).collect();
    let mut out = Vec::new();
    for i in 0..autos.len() {
        for j in (i + 1)..autos.len() {
            if supports[i].is_empty() || supports[j].is_empty() {
                continue;
            }
            if supports[i].iter().all(|v| !supports[j].contains(v)) {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cherry {
    pub stem: usize,
    /// Sorted ascending.
    pub leaves: [usize; 2],
}

impl Cherry {
    pub fn vertices(&self) -> [usize; 3] {
        [self.stem, self.leaves[0], self.leaves[1]]
    }

    /// Swap of the two leaves.
    pub fn flip(&self, n: usize) -> Permutation {
        Permutation::transposition(n, self.leaves[0], self.leaves[1]).expect("leaves are vertices")
    }
}

pub fn find_cherries(x: &Graph) -> Vec<Cherry> {
    let mut out = Vec::new();
    for stem in 0..x.n() {
        if x.degree(stem) != 3 {
            continue;
        }
        let leaves: Vec<usize> = x.neighbours(stem).into_iter().filter(|&v| x.degree(v) == 1).collect();
        for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                out.push(Cherry { stem, leaves: [leaves[i], leaves[j]] });
            }
        }
    }
    out
}

/// Index pairs of cherries with disjoint vertex sets.
pub fn disjoint_cherry_pairs(cherries: &[Cherry]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..cherries.len() {
        for j in (i + 1)..cherries.len() {
            let a = cherries[i].vertices();
            if cherries[j].vertices().iter().all(|v| !a.contains(v)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Partition of `V×V` generating the coherent algebra of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherentAlgebra {
    pub n: usize,
    /// Row-major class labels, `0..rank`.
    pub classes: Vec<usize>,
    pub rank: usize,
}

impl CoherentAlgebra {
    pub fn class(&self, x: usize, y: usize) -> usize {
        self.classes[x * self.n + y]
    }

    /// Indicator matrices of the classes.
    pub fn basis(&self) -> Vec<Vec<Vec<u8>>> {
        (0..self.rank)
            .map(|c| {
                (0..self.n).map(|x| (0..self.n).map(|y| u8::from(self.class(x, y) == c)).collect()).collect()
            })
            .collect()
    }
}

/// Coarsest partition of `V×V` refining `{diagonal, edges, non-edges}` that is closed under
/// transpose and matrix products (two-dimensional colour refinement).
pub fn coherent_algebra(x: &Graph) -> Result<CoherentAlgebra> {
    let n = x.n();
    if n > 32 {
        return Err(Error::InvalidInput("coherent algebra supports at most 32 vertices".into()));
    }
    let initial: Vec<usize> = (0..n * n)
        .map(|k| {
            let (a, b) = (k / n, k % n);
            if a == b {
                0
            } else if x.is_adjacent(a, b) {
                1
            } else {
                2
            }
        })
        .collect();
    let mut classes = relabel(&initial.iter().map(|&c| vec![c]).collect::<Vec<_>>());
    loop {
        let signatures: Vec<Vec<usize>> = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                let mut walks: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for z in 0..n {
                    *walks.entry((classes[a * n + z], classes[z * n + b])).or_default() += 1;
                }
                let mut sig = vec![classes[k], classes[b * n + a]];
                for ((c1, c2), count) in walks {
                    sig.extend([c1, c2, count]);
                }
                sig
            })
            .collect();
        let refined = relabel(&signatures);
        let before = classes.iter().max().map_or(0, |m| m + 1);
        let after = refined.iter().max().map_or(0, |m| m + 1);
        classes = refined;
        if after == before {
            break;
        }
    }
    let rank = classes.iter().max().map_or(0, |m| m + 1);
    Ok(CoherentAlgebra { n, classes, rank })
}

/// Canonical class ids: signatures are numbered in sorted order.
fn relabel(signatures: &[Vec<usize>]) -> Vec<usize> {
    let mut distinct: Vec<&Vec<usize>> = signatures.iter().collect();
    distinct.sort();
    distinct.dedup();
    signatures.iter().map(|s| distinct.binary_search(&s).expect("present")).collect()
}

/// Number of graph homomorphisms `P → X`.
pub fn hom_count(p: &Graph, x: &Graph) -> Result<u64> {
    if p.n() > 8 {
        return Err(Error::InvalidInput("pattern graphs are limited to 8 vertices".into()));
    }
    fn extend(p: &Graph, x: &Graph, v: usize, images: &mut Vec<usize>) -> u64 {
        if v == p.n() {
            return 1;
        }
        let mut total = 0;
        for w in 0..x.n() {
            if (0..v).all(|u| !p.is_adjacent(u, v) || x.is_adjacent(images[u], w)) {
                images.push(w);
                total += extend(p, x, v + 1, images);
                images.pop();
            }
        }
        total
    }
    Ok(extend(p, x, 0, &mut Vec::with_capacity(p.n())))
}

fn is_prime(k: u64) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Euler's criterion: `p` is a nonzero square modulo the odd prime `q`.
pub fn is_quadratic_residue(p: u64, q: u64) -> bool {
    !p.is_multiple_of(q) && pow_mod(p, (q - 1) / 2, q) == 1
}

/// Primes `≡ 1 (mod 4)` up to `bound`, joined when one is a square modulo the other.
/// Vertex labels are the primes.
pub fn rado_truncation(bound: u64) -> Result<Graph> {
    if bound < 5 {
        return Err(Error::InvalidInput(format!("bound {bound} admits no prime congruent to 1 mod 4")));
    }
    if bound > 100_000 {
        return Err(Error::InvalidInput("bound above 100000".into()));
    }
    let primes: Vec<u64> = (5..=bound).filter(|&k| k % 4 == 1 && is_prime(k)).collect();
    let mut edges = Vec::new();
    for i in 0..primes.len() {
        for j in (i + 1)..primes.len() {
            if is_quadratic_residue(primes[i], primes[j]) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(primes.len(), &edges)?.with_labels(primes.iter().map(|p| p.to_string()).collect())
}

/// First vertex outside `A ∪ B` adjacent to all of `A` and none of `B`.
pub fn extension_witness(x: &Graph, a: &[usize], b: &[usize]) -> Result<Option<usize>> {
    if let Some(v) = a.iter().find(|v| b.contains(v)) {
        return Err(Error::InvalidInput(format!("vertex {v} lies in both sets")));
    }
    if let Some(v) = a.iter().chain(b).find(|&&v| v >= x.n()) {
        return Err(Error::InvalidInput(format!("vertex {v} out of range")));
    }
    Ok((0..x.n()).find(|w| {
        !a.contains(w)
            && !b.contains(w)
            && a.iter().all(|&v| x.is_adjacent(v, *w))
            && b.iter().all(|&v| !x.is_adjacent(v, *w))
    }))
}

/// Uniform labelled tree on `n` vertices from a seeded Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidInput("a tree needs at least one vertex".into()));
    }
    if n <= 2 {
        return Ok(Graph::path(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    Graph::from_edges(n, &prufer_decode(n, &code))
}

fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in code {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_examples() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.adjacency_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(Graph::empty(3).adjacency_rows(), vec![vec![0; 3]; 3]);
        let k4 = Graph::complete(4).adjacency_rows();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(k4[x][y], u8::from(x != y));
            }
        }
        assert!(Graph::from_edges(2, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::complete(5).complement(), Graph::empty(5));
        let c4 = Graph::cycle(4).unwrap();
        assert_eq!(c4.complement().complement(), c4);
        assert_eq!(c4.complement().edges(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn distance_examples() {
        let p3 = Graph::path(3);
        assert_eq!(p3.distance_matrix()[0][2], Distance::Finite(2));
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(two_k2.distance_matrix()[0][3], Distance::Infinite);
        let c6 = Graph::cycle(6).unwrap();
        let max = c6.distance_matrix().into_iter().flatten().max().unwrap();
        assert_eq!(max, Distance::Finite(3));
    }

    fn commutes_with_adjacency(g: &Graph, sigma: &Permutation) -> bool {
        // (A u)_{x,y} = A_{x,σ(y)}, (u A)_{x,y} = A_{σ⁻¹(x),y}
        let inv = sigma.inverse();
        (0..g.n()).all(|x| (0..g.n()).all(|y| g.is_adjacent(x, sigma.apply(y)) == g.is_adjacent(inv.apply(x), y)))
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(automorphism_search(&Graph::complete(3), 100).unwrap().maps.len(), 6);
        let p3 = automorphism_search(&Graph::path(3), 100).unwrap();
        assert_eq!(p3.maps, vec![Permutation::identity(3), Permutation::new(vec![2, 1, 0]).unwrap()]);
        let petersen = Graph::petersen();
        let autos = automorphism_search(&petersen, 1000).unwrap();
        assert_eq!(autos.maps.len(), 120);
        assert!(!autos.truncated);
        assert!(autos.maps.iter().all(|s| commutes_with_adjacency(&petersen, s)));

        let limited = automorphism_search(&petersen, 10).unwrap();
        assert_eq!(limited.maps.len(), 10);
        assert!(limited.truncated);
        assert!(automorphism_search(&Graph::empty(17), 1).is_err());
    }

    #[test]
    fn disjoint_pair_examples() {
        let sigma = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        let tau = Permutation::new(vec![0, 1, 3, 2]).unwrap();
        assert_eq!(find_disjoint_pairs(&[sigma, tau]), vec![(0, 1)]);

        // reflections of C_4 through opposite edge midpoints
        let r1 = Permutation::new(vec![1, 0, 3, 2]).unwrap();
        let r2 = Permutation::new(vec![3, 2, 1, 0]).unwrap();
        assert!(find_disjoint_pairs(&[r1, r2]).is_empty());

        let tree = Graph::double_cherry_tree();
        let autos = automorphism_search(&tree, 100).unwrap().maps;
        let pairs = find_disjoint_pairs(&autos);
        let leaf_swaps = (Permutation::transposition(7, 3, 4).unwrap(), Permutation::transposition(7, 5, 6).unwrap());
        assert!(pairs.iter().any(|&(i, j)| {
            let pair = (autos[i].clone(), autos[j].clone());
            pair == leaf_swaps || (pair.1.clone(), pair.0.clone()) == leaf_swaps
        }));
    }

    #[test]
    fn cherry_examples() {
        assert_eq!(find_cherries(&Graph::cherry_on_triangle()), vec![Cherry { stem: 0, leaves: [1, 2] }]);
        assert!(find_cherries(&Graph::complete(4)).is_empty());
        let cherries = find_cherries(&Graph::double_cherry_tree());
        assert_eq!(cherries.len(), 2);
        assert_eq!(disjoint_cherry_pairs(&cherries), vec![(0, 1)]);
    }

    /// Closure check: every basis product is constant on every class.
    fn products_closed(alg: &CoherentAlgebra) -> bool {
        let basis = alg.basis();
        let n = alg.n;
        for a in &basis {
            for b in &basis {
                let mut value_on_class: Vec<Option<u32>> = vec![None; alg.rank];
                for x in 0..n {
                    for y in 0..n {
                        let v: u32 = (0..n).map(|z| u32::from(a[x][z] * b[z][y])).sum();
                        match value_on_class[alg.class(x, y)] {
                            None => value_on_class[alg.class(x, y)] = Some(v),
                            Some(w) if w != v => return false,
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn coherent_algebra_examples() {
        for n in 2..6 {
            assert_eq!(coherent_algebra(&Graph::complete(n)).unwrap().rank, 2);
        }
        let c4 = coherent_algebra(&Graph::cycle(4).unwrap()).unwrap();
        assert_eq!(c4.rank, 3);
        let p3 = coherent_algebra(&Graph::path(3)).unwrap();
        assert!(p3.rank >= 5);
        for g in [Graph::path(3), Graph::cycle(4).unwrap(), Graph::petersen(), Graph::double_cherry_tree()] {
            let alg = coherent_algebra(&g).unwrap();
            assert!(products_closed(&alg));
            let mut transpose_of = vec![None; alg.rank];
            let mut kind_of = vec![None; alg.rank];
            for x in 0..g.n() {
                for y in 0..g.n() {
                    let c = alg.class(x, y);
                    // transposition maps classes to classes
                    assert!(*transpose_of[c].get_or_insert(alg.class(y, x)) == alg.class(y, x));
                    // classes refine {I, A, J − I − A}
                    let kind = (x == y, g.is_adjacent(x, y));
                    assert!(*kind_of[c].get_or_insert(kind) == kind);
                }
            }
        }
    }

    #[test]
    fn hom_count_examples() {
        let k2 = Graph::complete(2);
        for g in [Graph::petersen(), Graph::cycle(5).unwrap(), Graph::path(4)] {
            assert_eq!(hom_count(&k2, &g).unwrap(), 2 * g.edge_count() as u64);
        }
        assert_eq!(hom_count(&Graph::complete(3), &Graph::complete(3)).unwrap(), 6);
        let c4 = Graph::cycle(4).unwrap();
        let sum_deg_sq: u64 = (0..4).map(|v| (c4.degree(v) * c4.degree(v)) as u64).sum();
        assert_eq!(hom_count(&Graph::path(3), &c4).unwrap(), sum_deg_sq);
        assert_eq!(sum_deg_sq, 16);
    }

    #[test]
    fn rado_examples() {
        let g = rado_truncation(60).unwrap();
        let labels: Vec<&str> = g.labels().unwrap().iter().map(String::as_str).collect();
        assert_eq!(labels, ["5", "13", "17", "29", "37", "41", "53"]);
        assert!(is_quadratic_residue(13, 17));
        assert_eq!(64 % 17, 13);
        assert!(g.is_adjacent(1, 2));
        assert!(rado_truncation(4).is_err());
    }

    #[test]
    fn extension_examples() {
        let k4 = Graph::complete(4);
        assert!(extension_witness(&k4, &[], &[]).unwrap().is_some());
        assert_eq!(extension_witness(&k4, &[0], &[]).unwrap(), Some(1));
        assert!(extension_witness(&k4, &[0], &[0]).is_err());
        assert_eq!(extension_witness(&k4, &[0], &[1]).unwrap(), None);
    }

    #[test]
    fn random_tree_examples() {
        assert_eq!(random_tree(1, 0).unwrap().n(), 1);
        let t3 = random_tree(3, 5).unwrap();
        assert_eq!(t3.edge_count(), 2);
        assert!(t3.is_connected());
        for seed in 0..50 {
            let t = random_tree(12, seed).unwrap();
            assert_eq!(t.edge_count(), 11);
            assert!(t.is_connected());
        }
        assert_eq!(random_tree(9, 3).unwrap(), random_tree(9, 3).unwrap());
    }

    #[test]
    fn parsing() {
        let g = Graph::parse("# a path\n4\n0 1\n1 2 # middle\n2 3\n").unwrap();
        assert_eq!(g, Graph::path(4));
        let h = Graph::parse("0 1\n1 2\n").unwrap();
        assert_eq!(h.n(), 3);
        let json = serde_json::to_string(&Graph::petersen()).unwrap();
        assert_eq!(Graph::parse(&json).unwrap(), Graph::petersen());
        assert!(Graph::parse("0 1 2\n").is_err());
        assert!(Graph::parse(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }
}
