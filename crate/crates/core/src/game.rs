//! The graph isomorphism game.
//!
//! Questions and answers range over the combined vertex list `V = V_X ⊔ V_Y`: index `v < n_X`
//! is vertex `v` of `X`, index `n_X + w` is vertex `w` of `Y`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{hom_count, Graph};
use crate::linalg::TolerancePolicy;
use crate::perm::Permutation;
use crate::qaut::is_quantum_isomorphism_witness;
use crate::qperm::QuantumPermutation;

/// Probabilities above this count as nonzero when judging perfectness.
pub const NONZERO_PROBABILITY: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-9;
const NEGATIVE_CLAMP: f64 = 1e-12;

/// Table `p(a,b|x,y)` stored flat at `((a·n_O + b)·n_I + x)·n_I + y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlation {
    n_inputs: usize,
    n_outputs: usize,
    table: Vec<f64>,
}

impl Correlation {
    /// Entries in `[−1e-12, 0)` are clamped to zero; anything more negative, or non-finite,
    /// is rejected.
    pub fn new(n_inputs: usize, n_outputs: usize, mut table: Vec<f64>) -> Result<Self> {
        let expected = n_outputs * n_outputs * n_inputs * n_inputs;
        if table.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "correlation table has {} entries, expected {expected}",
                table.len()
            )));
        }
        for v in table.iter_mut() {
            if !v.is_finite() || *v < -NEGATIVE_CLAMP {
                return Err(Error::InvalidInput(format!("probability {v} is not a non-negative number")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Correlation { n_inputs, n_outputs, table })
    }

    pub fn zeros(n_inputs: usize, n_outputs: usize) -> Self {
        Correlation { n_inputs, n_outputs, table: vec![0.0; n_outputs * n_outputs * n_inputs * n_inputs] }
    }

    pub fn uniform(n_inputs: usize, n_outputs: usize) -> Self {
        let v = 1.0 / (n_outputs * n_outputs) as f64;
        Correlation { n_inputs, n_outputs, table: vec![v; n_outputs * n_outputs * n_inputs * n_inputs] }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.n_outputs + b) * self.n_inputs + x) * self.n_inputs + y
    }

    /// `p(a,b|x,y)`.
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[self.index(a, b, x, y)]
    }

    pub fn set(&mut self, a: usize, b: usize, x: usize, y: usize, value: f64) {
        let k = self.index(a, b, x, y);
        self.table[k] = value;
    }

    /// `max |Σ_{a,b} p(a,b|x,y) − 1|` over input pairs.
    pub fn normalization_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.n_inputs {
            for y in 0..self.n_inputs {
                let mut total = 0.0;
                for a in 0..self.n_outputs {
                    for b in 0..self.n_outputs {
                        total += self.get(a, b, x, y);
                    }
                }
                worst = worst.max((total - 1.0).abs());
            }
        }
        worst
    }

    /// Largest entrywise difference; `∞` for different shapes.
    pub fn max_difference(&self, other: &Correlation) -> f64 {
        if self.n_inputs != other.n_inputs || self.n_outputs != other.n_outputs {
            return f64::INFINITY;
        }
        self.table.iter().zip(&other.table).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for Correlation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_inputs: usize,
            n_outputs: usize,
            table: Vec<f64>,
        }
        let repr = Repr::deserialize(deserializer)?;
        Correlation::new(repr.n_inputs, repr.n_outputs, repr.table).map_err(D::Error::custom)
    }
}

/// Normalisation within 1e-9 for every input pair; entries are non-negative by construction.
pub fn is_valid_correlation(p: &Correlation) -> bool {
    p.table.iter().all(|&v| v >= 0.0) && p.normalization_defect() <= NORMALIZATION_TOL
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameInstance {
    pub x: Graph,
    pub y: Graph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    Adjacent,
    NonAdjacent,
}

impl GameInstance {
    pub fn new(x: Graph, y: Graph) -> Self {
        GameInstance { x, y }
    }

    /// `|V_X| + |V_Y|`, the number of questions and of answers.
    pub fn size(&self) -> usize {
        self.x.n() + self.y.n()
    }

    pub fn side(&self, v: usize) -> Side {
        if v < self.x.n() {
            Side::X
        } else {
            Side::Y
        }
    }

    /// Vertex of the combined list within its own graph.
    pub fn local(&self, v: usize) -> usize {
        if v < self.x.n() {
            v
        } else {
            v - self.x.n()
        }
    }

    fn relation(&self, side: Side, v: usize, w: usize) -> Relation {
        let (v, w) = (self.local(v), self.local(w));
        let graph = if side == Side::X { &self.x } else { &self.y };
        if v == w {
            Relation::Equal
        } else if graph.is_adjacent(v, w) {
            Relation::Adjacent
        } else {
            Relation::NonAdjacent
        }
    }
}

/// Deterministic strategy answering `σ(x)` to questions in `X` and `σ⁻¹(y)` to questions in `Y`.
pub fn deterministic_from_isomorphism(game: &GameInstance, sigma: &Permutation) -> Result<Correlation> {
    let n = game.x.n();
    if game.y.n() != n || sigma.len() != n {
        return Err(Error::DimensionMismatch("an isomorphism needs equal vertex counts".into()));
    }
    let is_iso = (0..n).all(|a| (0..n).all(|b| game.x.is_adjacent(a, b) == game.y.is_adjacent(sigma.apply(a), sigma.apply(b))));
    if !is_iso {
        return Err(Error::InvalidInput("the map is not a graph isomorphism".into()));
    }
    let inverse = sigma.inverse();
    let answer = |v: usize| if v < n { n + sigma.apply(v) } else { inverse.apply(v - n) };
    let size = game.size();
    let mut p = Correlation::zeros(size, size);
    for x in 0..size {
        for y in 0..size {
            p.set(answer(x), answer(y), x, y, 1.0);
        }
    }
    Ok(p)
}

/// Quantum commuting correlation `p(a,b|x,y) = (1/d) tr(P^x_a P^y_b)` from a witness
/// `A_Y u = u A_X` (rows of `u` indexed by `V_Y`, columns by `V_X`), where `P^x_a = u_{a,x}`
/// for `x ∈ V_X, a ∈ V_Y`, `P^y_b = u_{y,b}` for `y ∈ V_Y, b ∈ V_X`, and zero otherwise. This
/// is `⟨ψ, (P^x_a ⊗ conj(P^y_b)) ψ⟩` for the maximally entangled vector `ψ`.
pub fn correlation_from_witness(game: &GameInstance, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<Correlation> {
    let report = is_quantum_isomorphism_witness(&game.x, &game.y, q, tol)?;
    if !report.is_witness {
        return Err(Error::InvalidInput(format!(
            "not a quantum isomorphism witness (defect {:e})",
            report.defect
        )));
    }
    let n = game.x.n();
    let size = game.size();
    let d = q.d() as f64;
    let op = |v: usize, w: usize| match (game.side(v), game.side(w)) {
        (Side::X, Side::Y) => Some(q.entry(w - n, v)),
        (Side::Y, Side::X) => Some(q.entry(v - n, w)),
        _ => None,
    };
    let mut p = Correlation::zeros(size, size);
    for x in 0..size {
        for a in 0..size {
            let Some(pa) = op(x, a) else { continue };
            for y in 0..size {
                for b in 0..size {
                    let Some(pb) = op(y, b) else { continue };
                    let value = (pa * pb).trace().re / d;
                    p.set(a, b, x, y, if value.abs() < NEGATIVE_CLAMP { 0.0 } else { value });
                }
            }
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Side,
    Relation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    pub probability: f64,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub perfect: bool,
    /// First violation in `(x, y, a, b)` lexicographic order.
    pub counterexample: Option<Violation>,
}

/// Answer pairs are allowed when each answer comes from the other graph than its question
/// and the `X`-pair and `Y`-pair are alike (equal, adjacent or distinct non-adjacent).
pub fn is_allowed(game: &GameInstance, x: usize, y: usize, a: usize, b: usize) -> Option<Rule> {
    if game.side(x) == game.side(a) || game.side(y) == game.side(b) {
        return Some(Rule::Side);
    }
    let (x_alice, y_alice) = if game.side(x) == Side::X { (x, a) } else { (a, x) };
    let (x_bob, y_bob) = if game.side(y) == Side::X { (y, b) } else { (b, y) };
    if game.relation(Side::X, x_alice, x_bob) != game.relation(Side::Y, y_alice, y_bob) {
        return Some(Rule::Relation);
    }
    None
}

pub fn is_perfect_strategy(game: &GameInstance, p: &Correlation) -> Result<PerfectnessReport> {
    let size = game.size();
    if p.n_inputs() != size || p.n_outputs() != size {
        return Err(Error::DimensionMismatch(format!(
            "correlation over {} questions for a game with {size}",
            p.n_inputs()
        )));
    }
    for x in 0..size {
        for y in 0..size {
            for a in 0..size {
                for b in 0..size {
                    let probability = p.get(a, b, x, y);
                    if probability <= NONZERO_PROBABILITY {
                        continue;
                    }
                    if let Some(rule) = is_allowed(game, x, y, a, b) {
                        return Ok(PerfectnessReport {
                            perfect: false,
                            counterexample: Some(Violation { x, y, a, b, probability, rule }),
                        });
                    }
                }
            }
        }
    }
    Ok(PerfectnessReport { perfect: true, counterexample: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub graph: Graph,
}

/// Fixed list of small planar pattern graphs.
pub fn planar_catalog() -> Vec<CatalogEntry> {
    let cycle = |n| Graph::cycle(n).expect("n ≥ 3");
    vec![
        CatalogEntry { name: "K1", graph: Graph::empty(1) },
        CatalogEntry { name: "K2", graph: Graph::complete(2) },
        CatalogEntry { name: "P3", graph: Graph::path(3) },
        CatalogEntry { name: "P4", graph: Graph::path(4) },
        CatalogEntry { name: "C3", graph: cycle(3) },
        CatalogEntry { name: "C4", graph: cycle(4) },
        CatalogEntry { name: "C5", graph: cycle(5) },
        CatalogEntry { name: "C6", graph: cycle(6) },
        CatalogEntry { name: "K1,3", graph: Graph::star(3) },
        CatalogEntry { name: "K4", graph: Graph::complete(4) },
        CatalogEntry { name: "diamond", graph: Graph::diamond() },
        CatalogEntry { name: "C4+pendant", graph: Graph::cycle_with_pendant() },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub pattern: String,
    pub x_count: u64,
    pub y_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileComparison {
    /// All catalog counts agree. This is a necessary condition for quantum isomorphism only.
    pub equal: bool,
    /// First catalog pattern with differing counts; certifies that no quantum isomorphism exists.
    pub mismatch: Option<String>,
    pub entries: Vec<ProfileEntry>,
}

pub fn hom_profile_compare(x: &Graph, y: &Graph) -> Result<ProfileComparison> {
    if x.n() > 12 || y.n() > 12 {
        return Err(Error::InvalidInput("profile comparison supports graphs with at most 12 vertices".into()));
    }
    let mut entries = Vec::new();
    for entry in planar_catalog() {
        entries.push(ProfileEntry {
            pattern: entry.name.to_string(),
            x_count: hom_count(&entry.graph, x)?,
            y_count: hom_count(&entry.graph, y)?,
        });
    }
    let mismatch = entries.iter().find(|e| e.x_count != e.y_count).map(|e| e.pattern.clone());
    Ok(ProfileComparison { equal: mismatch.is_none(), mismatch, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::find_isomorphism;
    use crate::linalg::ComplexMatrix;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn two_k2() -> Graph {
        Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_correlation(&Correlation::uniform(3, 4)));
        let mut p = Correlation::uniform(2, 2);
        p.set(0, 0, 1, 1, 0.25 - 0.1);
        assert!(!is_valid_correlation(&p));
        let game = GameInstance::new(Graph::path(3), Graph::path(3));
        let det = deterministic_from_isomorphism(&game, &Permutation::identity(3)).unwrap();
        assert!(is_valid_correlation(&det));
        assert!(Correlation::new(1, 1, vec![-0.5]).is_err());
        assert_eq!(Correlation::new(1, 1, vec![-1e-13]).unwrap().get(0, 0, 0, 0), 0.0);
    }

    #[test]
    fn identity_isomorphism_swaps_sides() {
        let game = GameInstance::new(Graph::path(3), Graph::path(3));
        let p = deterministic_from_isomorphism(&game, &Permutation::identity(3)).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let swap = |v: usize| (v + 3) % 6;
                assert_eq!(p.get(swap(x), swap(y), x, y), 1.0);
            }
        }
    }

    #[test]
    fn rotation_strategy_is_perfect() {
        let c4 = Graph::cycle(4).unwrap();
        let game = GameInstance::new(c4.clone(), c4);
        let p = deterministic_from_isomorphism(&game, &Permutation::shift(4, 1)).unwrap();
        assert!(is_perfect_strategy(&game, &p).unwrap().perfect);
        let bad = Permutation::new(vec![0, 2, 1, 3]).unwrap();
        assert!(deterministic_from_isomorphism(&game, &bad).is_err());
    }

    #[test]
    fn uniform_strategy_fails() {
        let c4 = Graph::cycle(4).unwrap();
        let game = GameInstance::new(c4.clone(), c4);
        let report = is_perfect_strategy(&game, &Correlation::uniform(8, 8)).unwrap();
        assert!(!report.perfect);
        let v = report.counterexample.unwrap();
        assert_eq!(v.rule, Rule::Side);
        assert_eq!((v.x, v.y, v.a, v.b), (0, 0, 0, 0));
    }

    #[test]
    fn witness_correlation_on_two_edges() {
        let p = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let q = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let u = QuantumPermutation::four_point_blocks(&p, &q).unwrap();
        let game = GameInstance::new(two_k2(), two_k2());
        let corr = correlation_from_witness(&game, &u, &tol()).unwrap();
        assert!(is_valid_correlation(&corr));
        assert!(is_perfect_strategy(&game, &corr).unwrap().perfect);
        // some answers are genuinely random
        assert!(corr.table().iter().any(|&v| v > 0.1 && v < 0.9));
    }

    #[test]
    fn classical_witness_matches_deterministic_table() {
        let c4 = Graph::cycle(4).unwrap();
        let sigma = Permutation::new(vec![3, 2, 1, 0]).unwrap();
        let game = GameInstance::new(c4.clone(), c4);
        let det = deterministic_from_isomorphism(&game, &sigma).unwrap();
        let witness = correlation_from_witness(&game, &QuantumPermutation::from_permutation(&sigma).unwrap(), &tol()).unwrap();
        assert!(det.max_difference(&witness) <= 1e-12);
    }

    #[test]
    fn witness_must_intertwine() {
        let game = GameInstance::new(Graph::cycle(4).unwrap(), two_k2());
        let u = QuantumPermutation::from_permutation(&Permutation::identity(4)).unwrap();
        assert!(correlation_from_witness(&game, &u, &tol()).is_err());
    }

    #[test]
    fn catalog_is_planar_and_distinct() {
        let catalog = planar_catalog();
        assert_eq!(catalog.len(), 12);
        for entry in &catalog {
            let (v, e) = (entry.graph.n(), entry.graph.edge_count());
            assert!(v <= 6);
            if v >= 3 {
                assert!(e <= 3 * v - 6, "{}", entry.name);
            }
        }
        for i in 0..catalog.len() {
            for j in (i + 1)..catalog.len() {
                assert!(find_isomorphism(&catalog[i].graph, &catalog[j].graph).unwrap().is_none());
            }
        }
    }

    #[test]
    fn profile_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let cmp = hom_profile_compare(&c4, &two_k2()).unwrap();
        assert_eq!(cmp.mismatch.as_deref(), Some("K2"));
        assert_eq!((cmp.entries[1].x_count, cmp.entries[1].y_count), (8, 4));

        let k3 = Graph::complete(3);
        let cmp = hom_profile_compare(&Graph::cycle(6).unwrap(), &k3.disjoint_union(&k3)).unwrap();
        assert!(!cmp.equal);
        let c3 = cmp.entries.iter().find(|e| e.pattern == "C3").unwrap();
        assert_eq!((c3.x_count, c3.y_count), (0, 12));

        let sigma = Permutation::new(vec![4, 0, 3, 1, 2]).unwrap();
        let g = Graph::cycle_with_pendant();
        let relabelled = Graph::from_edges(5, &g.edges().iter().map(|&(a, b)| (sigma.apply(a), sigma.apply(b))).collect::<Vec<_>>()).unwrap();
        assert!(hom_profile_compare(&g, &relabelled).unwrap().equal);
    }

    #[test]
    fn correlation_json_round_trip() {
        let p = Correlation::uniform(2, 3);
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"n_inputs":2,"n_outputs":3,"table":["#));
        assert_eq!(serde_json::from_str::<Correlation>(&text).unwrap(), p);
        assert!(serde_json::from_str::<Correlation>(r#"{"n_inputs":1,"n_outputs":1,"table":[]}"#).is_err());
    }
}
