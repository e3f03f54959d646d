//! Triviality tests for generator combinations and generator detrivialisation.
//!
//! A combination `c` is trivial when it splits as `c = α ∪ β` with the two
//! partial products acting on disjoint qubits. Singletons are never trivial.

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::bits::{k_subsets, BitSet};
use crate::error::{Result, SpfError};
use crate::pauli::PauliOperator;
use crate::state::{Combination, StabMap};

/// Candidate batches at least this large are tested in parallel.
const PAR_THRESHOLD: usize = 256;

/// A support-disjoint split of a combination, smaller half first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    pub alpha: Combination,
    pub beta: Combination,
}

impl Bipartition {
    /// Canonicalises the split of `whole` into `part` and its complement.
    pub fn from_part(whole: &Combination, part: &Combination) -> Self {
        let rest = Combination::from(whole.bits().difference(part.bits()));
        let part = part.clone();
        let part_first = match part.len().cmp(&rest.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => part <= rest,
        };
        if part_first {
            Bipartition { alpha: part, beta: rest }
        } else {
            Bipartition { alpha: rest, beta: part }
        }
    }
}

/// Product of the generators named by `c`.
pub fn product_of(c: &BitSet, generators: &[PauliOperator]) -> Result<PauliOperator> {
    let n = generators.first().map_or(0, PauliOperator::num_qubits);
    let mut acc = PauliOperator::identity(n);
    for i in c.iter() {
        let g = generators.get(i).ok_or(SpfError::DeadGenerator(i))?;
        acc.mul_assign_right(g);
    }
    Ok(acc)
}

/// True when `part` and `part · whole` act on disjoint qubits, i.e. `whole`
/// factors as `part` times something supported elsewhere.
#[inline]
pub fn splits_off(part: &PauliOperator, whole: &PauliOperator) -> bool {
    let supp = part.support();
    if !supp.is_subset(&whole.support()) {
        return false;
    }
    let dx = part.x_bits().symmetric_difference(whole.x_bits());
    let dz = part.z_bits().symmetric_difference(whole.z_bits());
    !supp.intersects(&dx) && !supp.intersects(&dz)
}

/// Exhaustive test over all halves of size at most `⌊|c|/2⌋`, ascending.
pub fn is_trivial_single_shot(
    c: &Combination,
    generators: &[PauliOperator],
) -> Result<Option<Bipartition>> {
    if c.is_empty() {
        return Err(SpfError::EmptyCombination);
    }
    let whole = product_of(c.bits(), generators)?;
    let members = c.to_vec();
    for k in 1..=members.len() / 2 {
        for part in k_subsets(&members, k) {
            let s_part = product_of(&part, generators)?;
            if splits_off(&s_part, &whole) {
                return Ok(Some(Bipartition::from_part(c, &Combination::from(part))));
            }
        }
    }
    Ok(None)
}

/// Batch test of one candidate against a pool of known stabilizers.
///
/// Only halves present in `pool` are considered. The result is exact whenever
/// the pool holds every non-trivial combination below `c`: the smallest piece
/// of a finest decomposition is non-trivial and has at most half the members.
pub fn batch_witness(c: &Combination, s_c: &PauliOperator, pool: &StabMap) -> Option<Bipartition> {
    let members = c.to_vec();
    let half = members.len() / 2;
    if half == 0 {
        return None;
    }
    let supp_c = s_c.support();
    if subset_count(members.len(), half) <= pool.len() {
        for k in 1..=half {
            for part in k_subsets(&members, k) {
                let key = Combination::from(part);
                if let Some(s_part) = pool.get(&key) {
                    if s_part.support().is_subset(&supp_c) && splits_off(s_part, s_c) {
                        return Some(Bipartition::from_part(c, &key));
                    }
                }
            }
        }
        None
    } else {
        let mut best: Option<&Combination> = None;
        for (key, s_part) in pool {
            if key.len() > half || key.is_empty() || !key.bits().is_subset(c.bits()) {
                continue;
            }
            if best.is_some_and(|b| (b.len(), b) <= (key.len(), key)) {
                continue;
            }
            if splits_off(s_part, s_c) {
                best = Some(key);
            }
        }
        best.map(|key| Bipartition::from_part(c, key))
    }
}

/// Exact test by linear algebra: `c` is trivial iff some restriction of
/// `S_c` to a proper subset of its support is a product of generators in `c`.
///
/// Solves `Σ t_q · (S_c)_q = Σ s_i · K_i` over GF(2) in symplectic form; the
/// solutions always include `(∅, ∅)` and `(supp S_c, c)`, and any further
/// solution `s` is one half of a support-disjoint split. The smallest such
/// half is returned when the solution space is small enough to enumerate.
pub fn linear_witness(c: &Combination, s_c: &PauliOperator, generators: &[PauliOperator]) -> Option<Bipartition> {
    if c.len() < 2 {
        return None;
    }
    let n = s_c.num_qubits();
    let slots = c.to_vec();
    let mut rows: Vec<(usize, BitSet, BitSet)> = Vec::with_capacity(2 * n);
    let mut null: Vec<BitSet> = Vec::new();
    let mut push = |v: BitSet, tag: BitSet, rows: &mut Vec<(usize, BitSet, BitSet)>| {
        let (mut v, mut tag) = (v, tag);
        for (pivot, row, row_tag) in rows.iter() {
            if v.contains(*pivot) {
                v.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
        match v.first() {
            Some(pivot) => {
                for (_, row, row_tag) in rows.iter_mut() {
                    if row.contains(pivot) {
                        row.xor_assign(&v);
                        row_tag.xor_assign(&tag);
                    }
                }
                rows.push((pivot, v, tag));
            }
            None => null.push(tag),
        }
    };
    // tag bits 0..|c| name generators, |c|.. name single-qubit letters
    for (k, &i) in slots.iter().enumerate() {
        let g = &generators[i];
        let mut v = g.x_bits().clone();
        for q in g.z_bits().iter() {
            v.insert(n + q);
        }
        push(v, BitSet::singleton(k), &mut rows);
    }
    for (k, q) in s_c.support().iter().enumerate() {
        let mut v = BitSet::new();
        if s_c.x_bits().contains(q) {
            v.insert(q);
        }
        if s_c.z_bits().contains(q) {
            v.insert(n + q);
        }
        push(v, BitSet::singleton(slots.len() + k), &mut rows);
    }
    if null.len() < 2 {
        return None;
    }
    let to_combo = |tag: &BitSet| -> Combination {
        tag.iter().take_while(|&k| k < slots.len()).map(|k| slots[k]).collect()
    };
    let better = |cand: &Combination, best: &Option<Combination>| {
        !cand.is_empty()
            && cand.len() < c.len()
            && best.as_ref().is_none_or(|b| (cand.len(), cand) < (b.len(), b))
    };
    let mut best: Option<Combination> = None;
    const ENUMERATE_LIMIT: usize = 14;
    if null.len() <= ENUMERATE_LIMIT {
        let mut acc = BitSet::new();
        // Gray-code walk over the whole solution space
        for step in 1u64..(1u64 << null.len()) {
            acc.xor_assign(&null[step.trailing_zeros() as usize]);
            let cand = to_combo(&acc);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
    } else {
        for (i, a) in null.iter().enumerate() {
            for b in &null[i..] {
                let tag = if std::ptr::eq(a, b) { a.clone() } else { a.symmetric_difference(b) };
                let cand = to_combo(&tag);
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
        }
    }
    let alpha = best.expect("solution space of dimension two or more has a proper half");
    Some(Bipartition::from_part(c, &alpha))
}

/// Largest half-space that is still probed by pool lookups; bigger
/// candidates use [`linear_witness`].
const LOOKUP_LIMIT: usize = 64;

/// Witnesses for the tracker: pool lookups for small candidates, the linear
/// test for large ones. Exact under the same precondition as the batch test.
pub fn tracker_witnesses(
    candidates: &[(&Combination, &PauliOperator)],
    pool: &StabMap,
    generators: &[PauliOperator],
) -> Vec<(Combination, Bipartition)> {
    let test = |&(c, s): &(&Combination, &PauliOperator)| {
        let w = if subset_count(c.len(), c.len() / 2) <= LOOKUP_LIMIT {
            batch_witness(c, s, pool)
        } else {
            linear_witness(c, s, generators)
        };
        w.map(|w| (c.clone(), w))
    };
    if candidates.len() >= PAR_THRESHOLD {
        candidates.par_iter().filter_map(test).collect()
    } else {
        candidates.iter().filter_map(test).collect()
    }
}

fn subset_count(n: usize, up_to: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for k in 1..=up_to {
        binom = binom.saturating_mul(n + 1 - k) / k;
        total = total.saturating_add(binom);
    }
    total
}

/// Witnesses for every trivial candidate, in candidate order.
pub fn batch_witnesses(
    candidates: &[(&Combination, &PauliOperator)],
    pool: &StabMap,
) -> Vec<(Combination, Bipartition)> {
    let test = |&(c, s): &(&Combination, &PauliOperator)| {
        batch_witness(c, s, pool).map(|w| (c.clone(), w))
    };
    if candidates.len() >= PAR_THRESHOLD {
        candidates.par_iter().filter_map(test).collect()
    } else {
        candidates.iter().filter_map(test).collect()
    }
}

/// The combinations among `candidates` that the pool proves trivial.
pub fn find_trivial_stabs_batch(candidates: &StabMap, pool: &StabMap) -> FxHashSet<Combination> {
    let list: Vec<(&Combination, &PauliOperator)> = candidates.iter().collect();
    batch_witnesses(&list, pool).into_iter().map(|(c, _)| c).collect()
}

/// All non-trivial combinations of a generator list, built by ascending size
/// so each batch test sees every smaller non-trivial piece.
pub fn enumerate_nontrivial(generators: &[PauliOperator], cap: Option<usize>) -> Result<StabMap> {
    const LIMIT: usize = 24;
    let g = generators.len();
    if g > LIMIT {
        return Err(SpfError::SizeGuard { what: "generator count", limit: LIMIT, got: g });
    }
    let members: Vec<usize> = (0..g).collect();
    let max_size = cap.map_or(g, |m| m.min(g));
    let mut nt = StabMap::default();
    for k in 1..=max_size {
        let layer: Vec<(Combination, PauliOperator)> = k_subsets(&members, k)
            .map(|bits| {
                let s = product_of(&bits, generators).expect("indices in range");
                (Combination::from(bits), s)
            })
            .collect();
        let kept: Vec<(Combination, PauliOperator)> = layer
            .into_par_iter()
            .filter(|(c, s)| batch_witness(c, s, &nt).is_none())
            .collect();
        nt.extend(kept);
    }
    Ok(nt)
}

/// One generator replacement performed by [`detrivialise_generators`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    pub slot: usize,
    /// Non-trivial combination whose stabilizer became the new generator.
    pub witness: Combination,
    pub old: PauliOperator,
    pub new: PauliOperator,
}

/// Finds a generator `K_j` that factors as `S_c · S_b` with disjoint
/// supports for some tracked `c ∋ j`, preferring the smallest witness.
fn find_trivial_generator(
    generators: &[PauliOperator],
    nt: &StabMap,
) -> Option<(usize, Combination, PauliOperator)> {
    let mut best: Option<(usize, Combination, PauliOperator)> = None;
    for (c, s_c) in nt {
        if c.len() < 2 {
            continue;
        }
        if let Some((_, b, _)) = &best {
            if (b.len(), b) < (c.len(), c) {
                continue;
            }
        }
        for j in c.iter() {
            let s_b = s_c * &generators[j];
            if !s_c.support().intersects(&s_b.support()) {
                let better = match &best {
                    None => true,
                    Some((bj, bc, _)) => (c.len(), c, j) < (bc.len(), bc, *bj),
                };
                if better {
                    best = Some((j, c.clone(), s_b));
                }
                break;
            }
        }
    }
    best
}

/// Replaces trivial generators by non-trivial products and repairs the
/// tracked map; returns the replacements made (empty when none were needed).
pub fn detrivialise_generators(
    generators: &mut [PauliOperator],
    nt: &mut StabMap,
    cap: Option<usize>,
) -> Result<Vec<Replacement>> {
    let mut done = Vec::new();
    let guard = generators.len() * 4 + 4;
    while let Some((j, witness, s_b)) = find_trivial_generator(generators, nt) {
        if done.len() > guard {
            return Err(SpfError::Internal("generator detrivialisation did not terminate".into()));
        }
        let old = generators[j].clone();
        let new = nt[&witness].clone();
        generators[j] = new.clone();
        replace_generator(j, &s_b, generators, nt, cap);
        done.push(Replacement { slot: j, witness, old, new });
    }
    Ok(done)
}

/// Repairs `nt` after `K_j ← K_j · S_b`.
fn replace_generator(
    j: usize,
    s_b: &PauliOperator,
    generators: &[PauliOperator],
    nt: &mut StabMap,
    cap: Option<usize>,
) {
    let with_j: Vec<Combination> = nt.keys().filter(|c| c.contains(j)).cloned().collect();
    for c in &with_j {
        let v = nt.get_mut(c).expect("key present");
        *v = &*v * s_b;
    }
    let without_j: Vec<(Combination, PauliOperator)> = nt
        .iter()
        .filter(|(c, _)| !c.contains(j))
        .map(|(c, s)| (c.clone(), s.clone()))
        .collect();

    // Previously trivial combinations containing j become non-trivial only by
    // gaining overlap between pieces; grow them pairwise until closure.
    let mut frontier = with_j.clone();
    let mut touched: FxHashSet<Combination> = with_j.into_iter().collect();
    while !frontier.is_empty() {
        let mut fresh: FxHashMap<Combination, PauliOperator> = FxHashMap::default();
        for alpha in &frontier {
            let new_alpha = nt[alpha].clone();
            let old_alpha = &new_alpha * s_b;
            let (old_supp, new_supp) = (old_alpha.support(), new_alpha.support());
            for (beta, s_beta) in &without_j {
                if beta.intersects(alpha) {
                    continue;
                }
                let supp_beta = s_beta.support();
                if old_supp.intersects(&supp_beta) || !new_supp.intersects(&supp_beta) {
                    continue;
                }
                let union = Combination::from(alpha.bits().union(beta.bits()));
                if cap.is_some_and(|m| union.len() > m) || nt.contains_key(&union) {
                    continue;
                }
                fresh.entry(union).or_insert_with(|| &new_alpha * s_beta);
            }
        }
        frontier = fresh.keys().cloned().collect();
        touched.extend(frontier.iter().cloned());
        nt.extend(fresh);
    }

    let cands: Vec<(&Combination, &PauliOperator)> =
        touched.iter().filter_map(|c| nt.get_key_value(c)).collect();
    let trivial: Vec<Combination> =
        tracker_witnesses(&cands, nt, generators).into_iter().map(|(c, _)| c).collect();
    for c in trivial {
        nt.remove(&c);
    }
}
