//! Quantum automorphisms of graphs and quantum isomorphism witnesses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{coherent_algebra, Graph};
use crate::linalg::{ComplexMatrix, TolerancePolicy, WorstNorm, C64, ONE};
use crate::perm::Permutation;
use crate::qperm::QuantumPermutation;

/// Cap on the offending index lists carried by reports.
const MAX_REPORTED: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QAutReport {
    pub is_qaut: bool,
    /// `max ‖(A u − u A)_{x,y}‖`.
    pub adjacency_defect: f64,
    /// Largest product that the orthogonality form requires to vanish.
    pub orthogonality_defect: f64,
    /// Entries `[x, y]` whose adjacency defect exceeds `atol`.
    pub details: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub holds: bool,
    pub worst_defect: f64,
    /// Quadruples `[i, j, k, l]` with `‖u_{i,j} u_{k,l}‖ > atol`.
    pub offending: Vec<[usize; 4]>,
}

fn require_verified(q: &QuantumPermutation, n: usize, tol: &TolerancePolicy) -> Result<()> {
    if q.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "quantum permutation of {} points for a graph on {n} vertices",
            q.n()
        )));
    }
    let report = q.verify(tol);
    if !report.valid {
        return Err(Error::Unverified(format!(
            "not a magic unitary (projection {:e}, row {:e}, column {:e})",
            report.worst_projection_defect, report.worst_row_defect, report.worst_column_defect
        )));
    }
    Ok(())
}

/// Entries of `L u − u R` for 0/1 matrices `L`, `R`, each reduced to its operator norm.
fn intertwining_defects(left: &[Vec<u8>], q: &QuantumPermutation, right: &[Vec<u8>]) -> Vec<f64> {
    let n = q.n();
    let d = q.d();
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            let mut diff = ComplexMatrix::zeros(d, d);
            for t in 0..n {
                if left[r][t] == 1 {
                    diff = &diff + q.entry(t, s);
                }
                if right[t][s] == 1 {
                    diff = &diff - q.entry(r, t);
                }
            }
            out.push(if diff.frobenius_norm() == 0.0 { 0.0 } else { diff.op_norm() });
        }
    }
    out
}

fn products_vanishing(
    q: &QuantumPermutation,
    tol: &TolerancePolicy,
    must_vanish: impl Fn(usize, usize, usize, usize) -> bool,
) -> ProductCheck {
    let n = q.n();
    let zero: Vec<bool> = (0..n * n).map(|k| q.entry(k / n, k % n).frobenius_norm() == 0.0).collect();
    let mut worst = WorstNorm::default();
    let mut offending = Vec::new();
    let mut holds = true;
    for i in 0..n {
        for j in 0..n {
            if zero[i * n + j] {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    if zero[k * n + l] || !must_vanish(i, j, k, l) {
                        continue;
                    }
                    let prod = q.entry(i, j) * q.entry(k, l);
                    let computed = worst.offer(&prod);
                    let exceeds = match computed {
                        Some(norm) => norm > tol.atol,
                        None => prod.frobenius_norm() > tol.atol && prod.op_norm() > tol.atol,
                    };
                    if exceeds {
                        holds = false;
                        if offending.len() < MAX_REPORTED {
                            offending.push([i, j, k, l]);
                        }
                    }
                }
            }
        }
    }
    ProductCheck { holds, worst_defect: worst.value, offending }
}

/// Checks `A_X u = u A_X` entrywise.
pub fn is_quantum_automorphism(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<QAutReport> {
    require_verified(q, x.n(), tol)?;
    let a = x.adjacency_rows();
    let defects = intertwining_defects(&a, q, &a);
    let adjacency_defect = defects.iter().copied().fold(0.0, f64::max);
    let details = defects
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol.atol)
        .take(MAX_REPORTED)
        .map(|(k, _)| [k / x.n(), k % x.n()])
        .collect();
    let orthogonality = orthogonality_products(x, q, tol);
    Ok(QAutReport {
        is_qaut: adjacency_defect <= tol.atol,
        adjacency_defect,
        orthogonality_defect: orthogonality.worst_defect,
        details,
    })
}

fn orthogonality_products(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> ProductCheck {
    products_vanishing(q, tol, |i, j, k, l| x.is_adjacent(i, k) != x.is_adjacent(j, l))
}

/// `u_{i,j} u_{k,l} = 0` whenever `(A_X)_{i,k} ≠ (A_X)_{j,l}`.
pub fn orthogonality_form_check(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<ProductCheck> {
    require_verified(q, x.n(), tol)?;
    Ok(orthogonality_products(x, q, tol))
}

/// `u_{x1,y1} u_{x2,y2} = 0` whenever `d(x1,x2) ≠ d(y1,y2)`.
pub fn distance_orthogonality_check(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<ProductCheck> {
    require_verified(q, x.n(), tol)?;
    let dist = x.distance_matrix();
    Ok(products_vanishing(q, tol, |x1, y1, x2, y2| dist[x1][x2] != dist[y1][y2]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub holds: bool,
    pub worst_defect: f64,
    /// Index of a coherent basis matrix failing to commute, if any.
    pub failing_basis_element: Option<usize>,
    pub basis_size: usize,
}

/// Every basis matrix of the coherent algebra of `X` commutes with `u`.
pub fn coherent_commutation_check(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<CommutationReport> {
    require_verified(q, x.n(), tol)?;
    let basis = coherent_algebra(x)?.basis();
    let mut worst = 0.0f64;
    let mut failing = None;
    for (idx, t) in basis.iter().enumerate() {
        let defect = intertwining_defects(t, q, t).into_iter().fold(0.0, f64::max);
        if defect > tol.atol && failing.is_none() {
            failing = Some(idx);
        }
        worst = worst.max(defect);
    }
    Ok(CommutationReport { holds: failing.is_none(), worst_defect: worst, failing_basis_element: failing, basis_size: basis.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub is_witness: bool,
    /// `max ‖(A_Y u − u A_X)_{x,y}‖`.
    pub defect: f64,
}

/// Checks `A_Y u = u A_X`.
pub fn is_quantum_isomorphism_witness(
    x: &Graph,
    y: &Graph,
    q: &QuantumPermutation,
    tol: &TolerancePolicy,
) -> Result<WitnessReport> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch(format!("graphs on {} and {} vertices", x.n(), y.n())));
    }
    require_verified(q, x.n(), tol)?;
    let defect = intertwining_defects(&y.adjacency_rows(), q, &x.adjacency_rows())
        .into_iter()
        .fold(0.0, f64::max);
    Ok(WitnessReport { is_witness: defect <= tol.atol, defect })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementReport {
    pub consistent: bool,
    pub graph_verdict: bool,
    pub complement_verdict: bool,
}

/// Compares the quantum automorphism verdicts for `X` and its complement.
pub fn complement_invariance_check(x: &Graph, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<ComplementReport> {
    let graph_verdict = is_quantum_automorphism(x, q, tol)?.is_qaut;
    let complement_verdict = is_quantum_automorphism(&x.complement(), q, tol)?.is_qaut;
    Ok(ComplementReport { consistent: graph_verdict == complement_verdict, graph_verdict, complement_verdict })
}

fn is_automorphism(x: &Graph, sigma: &Permutation) -> bool {
    x.edges().into_iter().all(|(a, b)| x.is_adjacent(sigma.apply(a), sigma.apply(b)))
}

/// Diagonal minimal projection `p_r = E_{r−1,r−1}` of `C(Z/k)`, `r = 1..=k`.
pub fn diagonal_projection(k: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, k, |a, b| if a == b && a == (r - 1) % k { ONE } else { C64::new(0.0, 0.0) })
}

/// Minimal projection `q_s` of the regular representation of `Z/k`: `(q_s)_{a,b} = ω^{s(a−b)}/k`.
pub fn fourier_projection(k: usize, s: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, k, |a, b| {
        let turns = (s * ((a + k - b) % k)) % k;
        C64::from_polar(1.0 / k as f64, 2.0 * std::f64::consts::PI * turns as f64 / k as f64)
    })
}

/// `u_{x,y} = Σ_{r=1}^k δ_{x,σ^r(y)} p_r + Σ_{s=1}^k δ_{x,τ^s(y)} q_s − δ_{x,y} 1` for disjoint
/// automorphisms `σ`, `τ`.
pub fn disjoint_pair_qaut(x: &Graph, sigma: &Permutation, tau: &Permutation, k: usize) -> Result<QuantumPermutation> {
    let n = x.n();
    if sigma.len() != n || tau.len() != n {
        return Err(Error::DimensionMismatch("automorphisms must act on the graph's vertices".into()));
    }
    for (name, p) in [("sigma", sigma), ("tau", tau)] {
        if !is_automorphism(x, p) {
            return Err(Error::InvalidInput(format!("{name} is not an automorphism")));
        }
        if p.is_identity() {
            return Err(Error::InvalidInput(format!("{name} is trivial")));
        }
    }
    let moved = sigma.support();
    if tau.support().iter().any(|v| moved.contains(v)) {
        return Err(Error::InvalidInput("sigma and tau move a common vertex".into()));
    }
    if k == 0 || k > sigma.order().min(tau.order()) {
        return Err(Error::InvalidInput(format!(
            "k = {k} must lie in 1..={}",
            sigma.order().min(tau.order())
        )));
    }
    let ps: Vec<ComplexMatrix> = (1..=k).map(|r| diagonal_projection(k, r)).collect();
    let qs: Vec<ComplexMatrix> = (1..=k).map(|s| fourier_projection(k, s)).collect();
    let sigma_powers: Vec<Permutation> = (1..=k).map(|r| sigma.power(r)).collect();
    let tau_powers: Vec<Permutation> = (1..=k).map(|s| tau.power(s)).collect();
    let id = ComplexMatrix::identity(k);
    QuantumPermutation::from_fn(n, k, |a, b| {
        let mut entry = ComplexMatrix::zeros(k, k);
        for (power, p) in sigma_powers.iter().zip(&ps) {
            if power.apply(b) == a {
                entry = &entry + p;
            }
        }
        for (power, q) in tau_powers.iter().zip(&qs) {
            if power.apply(b) == a {
                entry = &entry + q;
            }
        }
        if a == b {
            entry = &entry - &id;
        }
        entry
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use crate::qperm::commutant_dimension;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn two_k2() -> Graph {
        Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()
    }

    fn block_example() -> QuantumPermutation {
        let p = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let q = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        QuantumPermutation::four_point_blocks(&p, &q).unwrap()
    }

    #[test]
    fn complete_graph_accepts_everything() {
        let q = block_example().compress(&random_unitary(2, 8).unwrap()).unwrap();
        let report = is_quantum_automorphism(&Graph::complete(4), &q, &tol()).unwrap();
        assert!(report.is_qaut, "{report:?}");
    }

    #[test]
    fn block_example_on_two_edges_and_path() {
        let q = block_example();
        assert!(is_quantum_automorphism(&two_k2(), &q, &tol()).unwrap().is_qaut);
        assert!(orthogonality_form_check(&two_k2(), &q, &tol()).unwrap().holds);
        let path = is_quantum_automorphism(&Graph::path(4), &q, &tol()).unwrap();
        assert!(!path.is_qaut);
        assert!(!path.details.is_empty());
        assert!(!orthogonality_form_check(&Graph::path(4), &q, &tol()).unwrap().holds);
    }

    #[test]
    fn unverified_input_is_rejected() {
        let q = QuantumPermutation::from_fn(2, 1, |_, _| ComplexMatrix::identity(1)).unwrap();
        assert!(matches!(is_quantum_automorphism(&Graph::complete(2), &q, &tol()), Err(Error::Unverified(_))));
        assert!(is_quantum_automorphism(&Graph::complete(3), &block_example(), &tol()).is_err());
    }

    #[test]
    fn corrupted_entry_is_located() {
        let p = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let q = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        // swapping the roles inside one block keeps the magic unitary but breaks 2K_2 symmetry
        let id = ComplexMatrix::identity(2);
        let zero = ComplexMatrix::zeros(2, 2);
        let pc = &id - &p;
        let qc = &id - &q;
        let mixed = QuantumPermutation::new(vec![
            vec![p.clone(), zero.clone(), pc.clone(), zero.clone()],
            vec![zero.clone(), q.clone(), zero.clone(), qc.clone()],
            vec![pc, zero.clone(), p, zero.clone()],
            vec![zero.clone(), qc, zero, q],
        ])
        .unwrap();
        assert!(mixed.verify(&tol()).valid);
        let check = orthogonality_form_check(&two_k2(), &mixed, &tol()).unwrap();
        assert!(!check.holds);
        let [i, j, k, l] = check.offending[0];
        assert_ne!(two_k2().is_adjacent(i, k), two_k2().is_adjacent(j, l));
    }

    #[test]
    fn distance_constraint_examples() {
        let q = block_example();
        assert!(distance_orthogonality_check(&two_k2(), &q, &tol()).unwrap().holds);
        assert_eq!((q.entry(0, 0) * q.entry(2, 1)).max_abs_entry(), 0.0);
        let c6 = Graph::cycle(6).unwrap();
        let rot = QuantumPermutation::from_permutation(&Permutation::shift(6, 1)).unwrap();
        assert!(distance_orthogonality_check(&c6, &rot, &tol()).unwrap().holds);
    }

    #[test]
    fn coherent_commutation_examples() {
        let q = block_example().compress(&random_unitary(2, 2).unwrap()).unwrap();
        assert!(coherent_commutation_check(&Graph::complete(4), &q, &tol()).unwrap().holds);
        let c4 = Graph::cycle(4).unwrap();
        // 2K_2 is the complement of C_4 after relabelling 0-1-2-3 as 0-2-1-3
        let c4_relabelled = Graph::from_edges(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap();
        assert!(coherent_commutation_check(&c4_relabelled, &block_example(), &tol()).unwrap().holds);
        let report = coherent_commutation_check(&c4, &block_example(), &tol()).unwrap();
        assert!(!report.holds);
    }

    #[test]
    fn witness_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let rot = QuantumPermutation::from_permutation(&Permutation::shift(4, 1)).unwrap();
        assert!(is_quantum_isomorphism_witness(&c4, &c4, &rot, &tol()).unwrap().is_witness);
        let sigma = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let relabelled = Graph::from_edges(4, &c4.edges().iter().map(|&(a, b)| (sigma.apply(a), sigma.apply(b))).collect::<Vec<_>>()).unwrap();
        let u = QuantumPermutation::from_permutation(&sigma).unwrap();
        assert!(is_quantum_isomorphism_witness(&c4, &relabelled, &u, &tol()).unwrap().is_witness);
        for p in Permutation::all(4) {
            let u = QuantumPermutation::from_permutation(&p).unwrap();
            assert!(!is_quantum_isomorphism_witness(&c4, &two_k2(), &u, &tol()).unwrap().is_witness);
        }
        assert!(!is_quantum_isomorphism_witness(&c4, &two_k2(), &block_example(), &tol()).unwrap().is_witness);
    }

    #[test]
    fn complement_examples() {
        let q = block_example();
        let r = complement_invariance_check(&two_k2(), &q, &tol()).unwrap();
        assert!(r.consistent && r.graph_verdict && r.complement_verdict);
        let r = complement_invariance_check(&Graph::complete(4), &q, &tol()).unwrap();
        assert!(r.consistent && r.graph_verdict);
        let r = complement_invariance_check(&Graph::path(4), &q, &tol()).unwrap();
        assert!(r.consistent && !r.graph_verdict);
    }

    #[test]
    fn projections_are_minimal_and_complete() {
        for k in 1..5 {
            let mut p_sum = ComplexMatrix::zeros(k, k);
            let mut q_sum = ComplexMatrix::zeros(k, k);
            for r in 1..=k {
                let q = fourier_projection(k, r);
                assert!(crate::linalg::projection_defect(&q).unwrap() < 1e-12);
                assert!((q.trace() - ONE).norm() < 1e-12);
                p_sum = &p_sum + &diagonal_projection(k, r);
                q_sum = &q_sum + &q;
            }
            assert!((&p_sum - &ComplexMatrix::identity(k)).op_norm() < 1e-12);
            assert!((&q_sum - &ComplexMatrix::identity(k)).op_norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_projection_is_shift_average() {
        // q_s = (1/k) Σ_t ω^{−st} S^t with S e_b = e_{b−1}
        let k = 4;
        let shift = ComplexMatrix::from_fn(k, k, |a, b| if a == (b + k - 1) % k { ONE } else { C64::new(0.0, 0.0) });
        for s in 1..=k {
            let mut acc = ComplexMatrix::zeros(k, k);
            let mut power = ComplexMatrix::identity(k);
            for t in 0..k {
                let w = C64::from_polar(1.0 / k as f64, -2.0 * std::f64::consts::PI * (s * t) as f64 / k as f64);
                acc = &acc + &power.scale(w);
                power = &power * &shift;
            }
            assert!((&acc - &fourier_projection(k, s)).op_norm() < 1e-12);
        }
    }

    #[test]
    fn disjoint_pair_on_two_edges() {
        let sigma = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        let tau = Permutation::new(vec![0, 1, 3, 2]).unwrap();
        let q = disjoint_pair_qaut(&two_k2(), &sigma, &tau, 2).unwrap();
        let (p1, p2) = (diagonal_projection(2, 1), diagonal_projection(2, 2));
        let (q1, q2) = (fourier_projection(2, 1), fourier_projection(2, 2));
        let zero = ComplexMatrix::zeros(2, 2);
        let expected = QuantumPermutation::new(vec![
            vec![p2.clone(), p1.clone(), zero.clone(), zero.clone()],
            vec![p1, p2, zero.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), q2.clone(), q1.clone()],
            vec![zero.clone(), zero, q1, q2],
        ])
        .unwrap();
        for ((a, b), e) in q.entries() {
            assert!((e - expected.entry(a, b)).op_norm() < 1e-12);
        }
        assert!(q.verify(&tol()).valid);
        assert!(is_quantum_automorphism(&two_k2(), &q, &tol()).unwrap().is_qaut);
        assert_eq!(commutant_dimension(&q, &tol()).unwrap(), 1);
    }

    #[test]
    fn disjoint_pair_trivial_k() {
        let sigma = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        let tau = Permutation::new(vec![0, 1, 3, 2]).unwrap();
        let q = disjoint_pair_qaut(&two_k2(), &sigma, &tau, 1).unwrap();
        assert_eq!(q.d(), 1);
        assert_eq!(q, QuantumPermutation::from_permutation(&sigma.compose(&tau)).unwrap());
    }

    #[test]
    fn disjoint_pair_errors() {
        let sigma = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        let tau = Permutation::new(vec![0, 1, 3, 2]).unwrap();
        assert!(disjoint_pair_qaut(&two_k2(), &sigma, &tau, 3).is_err());
        assert!(disjoint_pair_qaut(&two_k2(), &sigma, &sigma, 2).is_err());
        let not_auto = Permutation::new(vec![2, 1, 0, 3]).unwrap();
        assert!(disjoint_pair_qaut(&two_k2(), &not_auto, &tau, 2).is_err());
    }
}
