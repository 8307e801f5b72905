//! Finite abelian groups, Weyl matrices and the Weyl quantum permutations `π^g`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, TolerancePolicy, WorstNorm, C64, ONE, ZERO};
use crate::qperm::QuantumPermutation;

/// `Z/N_1 × … × Z/N_k`; elements are indexed lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    cyclic_orders: Vec<usize>,
}

pub type Element = Vec<usize>;

impl FiniteAbelianGroup {
    pub fn new(cyclic_orders: Vec<usize>) -> Result<Self> {
        if cyclic_orders.is_empty() {
            return Err(Error::InvalidInput("a group needs at least one cyclic factor".into()));
        }
        if cyclic_orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic orders must be at least 1".into()));
        }
        let order = cyclic_orders.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
        if order.is_none_or(|n| n > 4096) {
            return Err(Error::InvalidInput("group order too large".into()));
        }
        Ok(FiniteAbelianGroup { cyclic_orders })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// Parses comma-separated cyclic orders such as `"2,2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let orders = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad cyclic order {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(orders)
    }

    pub fn cyclic_orders(&self) -> &[usize] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> usize {
        self.cyclic_orders.iter().product()
    }

    pub fn reduce(&self, a: &[usize]) -> Element {
        a.iter().zip(&self.cyclic_orders).map(|(&x, &n)| x % n).collect()
    }

    pub fn index(&self, a: &[usize]) -> usize {
        self.reduce(a).iter().zip(&self.cyclic_orders).fold(0, |acc, (&x, &n)| acc * n + x)
    }

    pub fn element(&self, mut index: usize) -> Element {
        let mut out = vec![0; self.cyclic_orders.len()];
        for (slot, &n) in out.iter_mut().zip(&self.cyclic_orders).rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    pub fn elements(&self) -> Vec<Element> {
        (0..self.order()).map(|k| self.element(k)).collect()
    }

    pub fn add(&self, a: &[usize], b: &[usize]) -> Element {
        a.iter().zip(b).zip(&self.cyclic_orders).map(|((&x, &y), &n)| (x + y) % n).collect()
    }

    pub fn neg(&self, a: &[usize]) -> Element {
        a.iter().zip(&self.cyclic_orders).map(|(&x, &n)| (n - x % n) % n).collect()
    }

    pub fn sub(&self, a: &[usize], b: &[usize]) -> Element {
        self.add(a, &self.neg(b))
    }

    fn check(&self, a: &[usize]) -> Result<()> {
        if a.len() != self.cyclic_orders.len() {
            return Err(Error::DimensionMismatch(format!(
                "element has {} components, group has {} factors",
                a.len(),
                self.cyclic_orders.len()
            )));
        }
        Ok(())
    }
}

/// `[a, b] = Π exp(2πi a_i b_i / N_i)`.
pub fn pairing(group: &FiniteAbelianGroup, a: &[usize], b: &[usize]) -> Result<C64> {
    group.check(a)?;
    group.check(b)?;
    Ok(pairing_unchecked(group, a, b))
}

fn pairing_unchecked(group: &FiniteAbelianGroup, a: &[usize], b: &[usize]) -> C64 {
    // Sum the reduced fractions before exponentiating so that exact cases stay exact.
    let mut turns = 0.0;
    for ((&x, &y), &n) in a.iter().zip(b).zip(group.cyclic_orders()) {
        turns += (((x % n) * (y % n)) % n) as f64 / n as f64;
    }
    unit_phase(turns)
}

/// `exp(2πi t)` with exact values at multiples of a quarter turn.
pub(crate) fn unit_phase(turns: f64) -> C64 {
    let t = turns.rem_euclid(1.0);
    let quarters = t * 4.0;
    if quarters.fract() == 0.0 {
        return match quarters as u8 {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * PI * t)
}

/// `W_{a,b} e_c = [a,c] e_{b+c}`.
pub fn weyl_matrix(group: &FiniteAbelianGroup, a: &[usize], b: &[usize]) -> Result<ComplexMatrix> {
    group.check(a)?;
    group.check(b)?;
    let n = group.order();
    let mut w = ComplexMatrix::zeros(n, n);
    for c in group.elements() {
        let row = group.index(&group.add(b, &c));
        w.set(row, group.index(&c), pairing_unchecked(group, a, &c));
    }
    Ok(w)
}

/// All `N²` Weyl matrices, indexed by `index(a)·N + index(b)`.
#[derive(Clone, Debug)]
pub struct WeylSystem {
    group: FiniteAbelianGroup,
    matrices: Vec<ComplexMatrix>,
}

impl WeylSystem {
    pub fn new(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        let elements = group.elements();
        let mut matrices = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                matrices.push(weyl_matrix(group, a, b).expect("elements come from the group"));
            }
        }
        WeylSystem { group: group.clone(), matrices }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// `W_{a,b}` by element indices.
    pub fn get(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.matrices[a * self.group.order() + b]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylRelationsReport {
    pub valid: bool,
    pub worst_unitarity_defect: f64,
    /// `W_{a,b}* = [a,b] W_{−a,−b}`
    pub worst_adjoint_defect: f64,
    /// `W_{a,b} W_{c,d} = [a,d] W_{a+c,b+d}`
    pub worst_product_defect: f64,
    /// `W_{a,b}* W_{c,d} = [a,b−d] W_{c−a,d−b}`
    pub worst_mixed_defect: f64,
    /// `tr(W_{a,b}* W_{c,d}) = δ_{a,c} δ_{b,d}`
    pub worst_trace_defect: f64,
}

pub fn verify_weyl_relations(group: &FiniteAbelianGroup, tol: &TolerancePolicy) -> Result<WeylRelationsReport> {
    let n = group.order();
    if n > 16 {
        return Err(Error::InvalidInput(format!("group order {n} exceeds 16")));
    }
    let sys = WeylSystem::new(group);
    let els = group.elements();
    let w = |a: &[usize], b: &[usize]| sys.get(group.index(a), group.index(b));
    let pair = |a: &[usize], b: &[usize]| pairing_unchecked(group, a, b);

    let mut unitarity = 0.0f64;
    let mut adjoint = WorstNorm::default();
    for a in &els {
        for b in &els {
            let m = w(a, b);
            unitarity = unitarity.max(m.unitarity_defect());
            let rhs = w(&group.neg(a), &group.neg(b)).scale(pair(a, b));
            adjoint.offer(&(&m.adjoint() - &rhs));
        }
    }

    let mut product = WorstNorm::default();
    let mut mixed = WorstNorm::default();
    let mut trace = 0.0f64;
    for a in &els {
        for b in &els {
            let wab = w(a, b);
            let wab_adj = wab.adjoint();
            for c in &els {
                for d in &els {
                    let wcd = w(c, d);
                    let prod_rhs = w(&group.add(a, c), &group.add(b, d)).scale(pair(a, d));
                    product.offer(&(&(wab * wcd) - &prod_rhs));
                    let lhs = &wab_adj * wcd;
                    let mixed_rhs = w(&group.sub(c, a), &group.sub(d, b)).scale(pair(a, &group.sub(b, d)));
                    mixed.offer(&(&lhs - &mixed_rhs));
                    let expected = if a == c && b == d { ONE } else { ZERO };
                    trace = trace.max((lhs.normalized_trace() - expected).norm());
                }
            }
        }
    }

    let valid = [unitarity, adjoint.value, product.value, mixed.value, trace].iter().all(|&v| v <= tol.atol);
    Ok(WeylRelationsReport {
        valid,
        worst_unitarity_defect: unitarity,
        worst_adjoint_defect: adjoint.value,
        worst_product_defect: product.value,
        worst_mixed_defect: mixed.value,
        worst_trace_defect: trace,
    })
}

/// Point index of `(a, b) ∈ A × A`.
pub fn point_index(group: &FiniteAbelianGroup, a: &[usize], b: &[usize]) -> usize {
    group.index(a) * group.order() + group.index(b)
}

/// `π^g` with entries `|W_{a,b} g W_{c,d}*⟩⟨W_{a,b} g W_{c,d}*|` on `M_N` (row-major vec).
pub fn weyl_qperm(group: &FiniteAbelianGroup, g: &ComplexMatrix, tol: &TolerancePolicy) -> Result<QuantumPermutation> {
    let n = group.order();
    if g.rows() != n || g.cols() != n {
        return Err(Error::DimensionMismatch(format!("g must be {n}x{n}")));
    }
    let defect = g.unitarity_defect();
    if defect > tol.atol {
        return Err(Error::NotUnitary(defect));
    }
    let sys = WeylSystem::new(group);
    let points = n * n;
    let mut lines = Vec::with_capacity(points * points);
    let adjoints: Vec<ComplexMatrix> = (0..points).map(|k| sys.matrices[k].adjoint()).collect();
    for x in 0..points {
        let left = &sys.matrices[x] * g;
        for adj in &adjoints {
            let line = (&left * adj).row_major();
            lines.push(ComplexMatrix::projection_onto(&line)?);
        }
    }
    let mut it = lines.into_iter();
    QuantumPermutation::from_fn(points, points, |_, _| it.next().expect("n² lines"))
}

/// `θ_{(r,s)}` acting on row-major vectors of `M_N`: `T ↦ W_{r,s}* T W_{r,s}`.
pub fn theta(sys: &WeylSystem, r: usize, s: usize) -> ComplexMatrix {
    let w = sys.get(r, s);
    w.adjoint().kron(&w.transpose())
}

/// Largest `‖u_{(a+r,b+s),(c+r,d+s)} − θ* u_{(a,b),(c,d)} θ‖`.
pub fn weyl_equivariance_defect(group: &FiniteAbelianGroup, q: &QuantumPermutation) -> Result<f64> {
    let n = group.order();
    if q.n() != n * n || q.d() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected a quantum permutation of {0} points in dimension {0}",
            n * n
        )));
    }
    let sys = WeylSystem::new(group);
    let els = group.elements();
    let mut worst = WorstNorm::default();
    for r in &els {
        for s in &els {
            let th = theta(&sys, group.index(r), group.index(s));
            let th_adj = th.adjoint();
            for a in &els {
                for b in &els {
                    let x = point_index(group, a, b);
                    let x_shift = point_index(group, &group.add(a, r), &group.add(b, s));
                    for c in &els {
                        for d in &els {
                            let y = point_index(group, c, d);
                            let y_shift = point_index(group, &group.add(c, r), &group.add(d, s));
                            let moved = &(&th_adj * q.entry(x, y)) * &th;
                            worst.offer(&(q.entry(x_shift, y_shift) - &moved));
                        }
                    }
                }
            }
        }
    }
    Ok(worst.value)
}

pub fn weyl_equivariance_check(group: &FiniteAbelianGroup, q: &QuantumPermutation, tol: &TolerancePolicy) -> Result<bool> {
    Ok(weyl_equivariance_defect(group, q)? <= tol.atol)
}

/// The 24 single-qubit Clifford unitaries modulo phase, each normalised so that its first
/// nonzero entry (row-major) is real and positive.
pub fn qubit_clifford_group() -> Vec<ComplexMatrix> {
    let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(std::f64::consts::FRAC_1_SQRT_2);
    let s = ComplexMatrix::diag(&[ONE, C64::new(0.0, 1.0)]);
    let mut group = vec![ComplexMatrix::identity(2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for gen in [&h, &s] {
                let candidate = fix_phase(&(m * gen));
                if !group.iter().any(|g| (g - &candidate).max_abs_entry() < 1e-9) {
                    group.push(candidate.clone());
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    group
}

/// Multiplies by the phase that makes the first entry of modulus above 1e-9 real positive.
pub fn fix_phase(m: &ComplexMatrix) -> ComplexMatrix {
    let pivot = m.row_major().into_iter().find(|z| z.norm() > 1e-9).unwrap_or(ONE);
    m.scale(pivot.conj() / pivot.norm())
}

/// The Pauli matrices `W_{a,b}` of `Z/2`, in index order `I, X, Z, ZX`.
pub fn qubit_paulis() -> Vec<ComplexMatrix> {
    let group = FiniteAbelianGroup::cyclic(2).expect("valid");
    WeylSystem::new(&group).matrices
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;

    fn z(n: usize) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn group_indexing() {
        let g = FiniteAbelianGroup::parse("2,3").unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.elements()[4], vec![1, 1]);
        for k in 0..6 {
            assert_eq!(g.index(&g.element(k)), k);
        }
        assert_eq!(g.neg(&[1, 1]), vec![1, 2]);
        assert!(FiniteAbelianGroup::parse("2,0").is_err());
        assert!(FiniteAbelianGroup::parse("two").is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&z(2), &[1], &[1]).unwrap(), C64::new(-1.0, 0.0));
        for b in 0..5 {
            assert_eq!(pairing(&z(5), &[0], &[b]).unwrap(), ONE);
        }
        assert_eq!(pairing(&z(4), &[1], &[1]).unwrap(), C64::new(0.0, 1.0));
        assert!(pairing(&z(4), &[1, 0], &[1]).is_err());
    }

    #[test]
    fn pairing_is_bimultiplicative() {
        let g = FiniteAbelianGroup::parse("3,4").unwrap();
        let els = g.elements();
        for a in &els {
            for b in &els {
                for c in &els {
                    let lhs = pairing(&g, &g.add(a, b), c).unwrap();
                    let rhs = pairing(&g, a, c).unwrap() * pairing(&g, b, c).unwrap();
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weyl_matrix_examples() {
        let g = z(2);
        assert_eq!(weyl_matrix(&g, &[0], &[0]).unwrap(), ComplexMatrix::identity(2));
        assert_eq!(weyl_matrix(&g, &[1], &[0]).unwrap(), ComplexMatrix::diag_real(&[1.0, -1.0]));
        assert_eq!(
            weyl_matrix(&g, &[0], &[1]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
    }

    #[test]
    fn relations_hold() {
        let tol = TolerancePolicy::default();
        for spec in ["2", "3", "2,2", "4", "5"] {
            let report = verify_weyl_relations(&FiniteAbelianGroup::parse(spec).unwrap(), &tol).unwrap();
            assert!(report.valid, "{spec}: {report:?}");
        }
        assert!(verify_weyl_relations(&FiniteAbelianGroup::parse("17").unwrap(), &tol).is_err());
    }

    #[test]
    fn weyl_qperm_identity_is_classical() {
        let tol = TolerancePolicy::default();
        let q = weyl_qperm(&z(2), &ComplexMatrix::identity(2), &tol).unwrap();
        assert_eq!((q.n(), q.d()), (4, 4));
        assert!(q.verify(&tol).valid);
        assert!(q.is_classical(&tol));
    }

    #[test]
    fn weyl_qperm_rotation_is_quantum() {
        let tol = TolerancePolicy::default();
        let (c, s) = ((PI / 8.0).cos(), (PI / 8.0).sin());
        let g = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]);
        let q = weyl_qperm(&z(2), &g, &tol).unwrap();
        assert!(q.verify(&tol).valid);
        assert!(q.max_commutator() > 0.1);
    }

    #[test]
    fn weyl_qperm_ignores_global_phase() {
        let tol = TolerancePolicy::default();
        let g = random_unitary(2, 9).unwrap();
        let q = weyl_qperm(&z(2), &g, &tol).unwrap();
        let rotated = weyl_qperm(&z(2), &g.scale(C64::from_polar(1.0, 0.7)), &tol).unwrap();
        for ((x, y), e) in q.entries() {
            assert!((e - rotated.entry(x, y)).op_norm() < 1e-12);
        }
    }

    #[test]
    fn weyl_qperm_rejects_non_unitary() {
        let g = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(weyl_qperm(&z(2), &g, &TolerancePolicy::default()), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn equivariance() {
        let tol = TolerancePolicy::default();
        let g = random_unitary(2, 5).unwrap();
        let q = weyl_qperm(&z(2), &g, &tol).unwrap();
        assert!(weyl_equivariance_check(&z(2), &q, &tol).unwrap());
        let q3 = weyl_qperm(&z(3), &ComplexMatrix::identity(3), &tol).unwrap();
        assert!(weyl_equivariance_check(&z(3), &q3, &tol).unwrap());

        let mut rows: Vec<Vec<ComplexMatrix>> =
            (0..4).map(|x| (0..4).map(|y| q.entry(x, y).clone()).collect()).collect();
        rows[1][2] = rows[1][3].clone();
        let corrupted = QuantumPermutation::new(rows).unwrap();
        assert!(!weyl_equivariance_check(&z(2), &corrupted, &tol).unwrap());
    }

    #[test]
    fn clifford_group_has_24_elements() {
        let cliffords = qubit_clifford_group();
        assert_eq!(cliffords.len(), 24);
        let paulis = qubit_paulis();
        for c in &cliffords {
            assert!(c.unitarity_defect() < 1e-12);
            // conjugation permutes the Paulis up to phase
            for p in &paulis {
                let moved = fix_phase(&(&(c * p) * &c.adjoint()));
                assert!(paulis.iter().any(|q| (&fix_phase(q) - &moved).max_abs_entry() < 1e-9));
            }
        }
    }
}
