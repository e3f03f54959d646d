//! Linear algebra over GF(2) on symplectic Pauli vectors (phases ignored).

use crate::bits::BitSet;
use crate::pauli::PauliOperator;

fn symplectic(op: &PauliOperator) -> BitSet {
    let n = op.num_qubits();
    let mut v = op.x_bits().clone();
    for q in op.z_bits().iter() {
        v.insert(n + q);
    }
    v
}

/// Row-reduced basis of a set of operators, each row remembering which input
/// operators were combined to produce it.
pub struct Basis {
    rows: Vec<(usize, BitSet, BitSet)>,
}

impl Basis {
    pub fn new(ops: &[PauliOperator]) -> Self {
        let mut basis = Basis { rows: Vec::new() };
        for (i, op) in ops.iter().enumerate() {
            basis.insert(symplectic(op), BitSet::singleton(i));
        }
        basis
    }

    fn reduce(&self, mut v: BitSet, mut tag: BitSet) -> (BitSet, BitSet) {
        for (pivot, row, row_tag) in &self.rows {
            if v.contains(*pivot) {
                v.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
        (v, tag)
    }

    fn insert(&mut self, v: BitSet, tag: BitSet) -> bool {
        let (v, tag) = self.reduce(v, tag);
        let Some(pivot) = v.first() else {
            return false;
        };
        for (_, row, row_tag) in &mut self.rows {
            if row.contains(pivot) {
                row.xor_assign(&v);
                row_tag.xor_assign(&tag);
            }
        }
        self.rows.push((pivot, v, tag));
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Input indices whose product matches `op` letter-for-letter, if any.
    pub fn decompose(&self, op: &PauliOperator) -> Option<BitSet> {
        let (rest, tag) = self.reduce(symplectic(op), BitSet::new());
        rest.is_empty().then_some(tag)
    }

    pub fn contains(&self, op: &PauliOperator) -> bool {
        self.decompose(op).is_some()
    }
}

/// Generator indices whose product has the same letters as `target`.
pub fn decompose(generators: &[PauliOperator], target: &PauliOperator) -> Option<BitSet> {
    Basis::new(generators).decompose(target)
}

pub fn rank(ops: &[PauliOperator]) -> usize {
    Basis::new(ops).rank()
}

/// Whether two operator lists generate the same group up to phases.
pub fn same_span(a: &[PauliOperator], b: &[PauliOperator]) -> bool {
    let ba = Basis::new(a);
    let bb = Basis::new(b);
    ba.rank() == bb.rank() && b.iter().all(|op| ba.contains(op)) && a.iter().all(|op| bb.contains(op))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ops(list: &[&str]) -> Vec<PauliOperator> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn decomposition_finds_combination() {
        let g = ops(&["ZXZ", "IZX", "XIX"]);
        let target: PauliOperator = "ZYY".parse().unwrap();
        let c = decompose(&g, &target).unwrap();
        assert_eq!(c.to_vec(), vec![0, 1]);
        assert!(decompose(&g, &"XII".parse().unwrap()).is_none());
    }

    #[test]
    fn spans() {
        let a = ops(&["XX", "ZZ"]);
        let b = ops(&["YY", "-ZZ"]);
        assert!(same_span(&a, &b));
        assert!(!same_span(&a, &ops(&["XX", "XI"])));
        assert_eq!(rank(&ops(&["XX", "XX", "ZZ"])), 2);
    }
}
