//! Incrementally tracked stabilizer state with one encoded logical qubit.
//!
//! Generators live in numbered slots that are never renumbered. A slot is
//! created by [`StabilizerState::add_qubit`] and remembers the qubit that
//! created it, so combinations can be named by qubit labels as in the usual
//! graph-state notation (`K_6` is the generator created with qubit `6`).
//! Measurement overwrites the measured qubit's own slot when it anticommutes,
//! otherwise the first anticommuting slot, unless the caller names a pivot.

use std::fmt;
use std::ops::Deref;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Result, SpfError};
use crate::gf2;
use crate::pauli::{Basis, Gate, Letter, PauliOperator};
use crate::triviality::{self, Replacement};

/// Set of generator slots naming the stabilizer `∏_{i∈c} K_i`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Combination(BitSet);

impl Combination {
    pub fn singleton(slot: usize) -> Self {
        Combination(BitSet::singleton(slot))
    }

    pub fn bits(&self) -> &BitSet {
        &self.0
    }

    pub fn into_bits(self) -> BitSet {
        self.0
    }

    pub fn with(&self, slot: usize) -> Self {
        let mut out = self.clone();
        out.0.insert(slot);
        out
    }

    pub fn without(&self, slot: usize) -> Self {
        let mut out = self.clone();
        out.0.remove(slot);
        out
    }

    pub fn intersects(&self, other: &Combination) -> bool {
        self.0.intersects(&other.0)
    }
}

impl Deref for Combination {
    type Target = BitSet;

    fn deref(&self) -> &BitSet {
        &self.0
    }
}

impl From<BitSet> for Combination {
    fn from(bits: BitSet) -> Self {
        Combination(bits)
    }
}

impl FromIterator<usize> for Combination {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Combination(iter.into_iter().collect())
    }
}

impl fmt::Debug for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub type StabMap = FxHashMap<Combination, PauliOperator>;

/// Anything that names a qubit: a dense index or a label.
pub trait QubitRef {
    fn resolve(&self, state: &StabilizerState) -> Result<usize>;
}

impl QubitRef for usize {
    fn resolve(&self, state: &StabilizerState) -> Result<usize> {
        if *self < state.num_qubits() {
            Ok(*self)
        } else {
            Err(SpfError::QubitIndex { index: *self, n: state.num_qubits() })
        }
    }
}

impl QubitRef for &str {
    fn resolve(&self, state: &StabilizerState) -> Result<usize> {
        state.index.get(*self).copied().ok_or_else(|| SpfError::UnknownQubit(self.to_string()))
    }
}

impl QubitRef for String {
    fn resolve(&self, state: &StabilizerState) -> Result<usize> {
        self.as_str().resolve(state)
    }
}

impl QubitRef for &String {
    fn resolve(&self, state: &StabilizerState) -> Result<usize> {
        self.as_str().resolve(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn from_sign(sign: i8) -> Self {
        if sign < 0 {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub basis: Basis,
    pub outcome: Outcome,
    pub deterministic: bool,
    /// Slot overwritten by the measurement operator (random case only).
    pub slot: Option<usize>,
    pub replacements: Vec<Replacement>,
}

/// Circuit step, kept so the state can be replayed by an independent simulator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CircuitOp {
    AddQubit { label: String },
    Gate { gate: Gate, qubits: Vec<usize> },
    Measure { qubit: usize, basis: Basis, outcome: Outcome },
}

#[derive(Clone, Debug)]
pub struct StabilizerState {
    labels: Vec<String>,
    index: FxHashMap<String, usize>,
    generators: Vec<PauliOperator>,
    slot_qubit: Vec<usize>,
    logical_x: PauliOperator,
    logical_z: PauliOperator,
    nt: StabMap,
    max_combo_size: Option<usize>,
    circuit: Vec<CircuitOp>,
}

impl Default for StabilizerState {
    fn default() -> Self {
        Self::initialise()
    }
}

impl StabilizerState {
    pub const INPUT: &'static str = "I";

    /// One input qubit `I` carrying the logical qubit: `X̄ = X_I`, `Z̄ = Z_I`.
    pub fn initialise() -> Self {
        let mut index = FxHashMap::default();
        index.insert(Self::INPUT.to_string(), 0);
        StabilizerState {
            labels: vec![Self::INPUT.to_string()],
            index,
            generators: Vec::new(),
            slot_qubit: Vec::new(),
            logical_x: PauliOperator::single(1, 0, Letter::X).expect("qubit 0 exists"),
            logical_z: PauliOperator::single(1, 0, Letter::Z).expect("qubit 0 exists"),
            nt: StabMap::default(),
            max_combo_size: None,
            circuit: Vec::new(),
        }
    }

    /// Builds a state from explicit operators and enumerates its non-trivial
    /// combinations. Generator `i` is attributed to `slot_qubits[i]`.
    pub fn from_generators(
        labels: Vec<String>,
        generators: Vec<PauliOperator>,
        slot_qubits: Vec<usize>,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
    ) -> Result<Self> {
        let n = labels.len();
        for op in generators.iter().chain([&logical_x, &logical_z]) {
            if op.num_qubits() != n {
                return Err(SpfError::Dimension { left: op.num_qubits(), right: n });
            }
        }
        if slot_qubits.len() != generators.len() || slot_qubits.iter().any(|&q| q >= n) {
            return Err(SpfError::Config("slot attribution does not match generators".into()));
        }
        let mut index = FxHashMap::default();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(SpfError::DuplicateLabel(l.clone()));
            }
        }
        let nt = triviality::enumerate_nontrivial(&generators, None)?;
        let state = StabilizerState {
            labels,
            index,
            generators,
            slot_qubit: slot_qubits,
            logical_x,
            logical_z,
            nt,
            max_combo_size: None,
            circuit: Vec::new(),
        };
        state.check_group_relations()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn qubit<Q: QubitRef>(&self, q: Q) -> Result<usize> {
        q.resolve(self)
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn generator(&self, slot: usize) -> Result<&PauliOperator> {
        self.generators.get(slot).ok_or(SpfError::DeadGenerator(slot))
    }

    /// Qubit whose addition created each slot.
    pub fn slot_qubits(&self) -> &[usize] {
        &self.slot_qubit
    }

    /// Slot created together with the given qubit.
    pub fn slot_of<Q: QubitRef>(&self, q: Q) -> Result<usize> {
        let q = q.resolve(self)?;
        self.slot_qubit
            .iter()
            .position(|&s| s == q)
            .ok_or_else(|| SpfError::UnknownQubit(format!("no generator created by {}", self.labels[q])))
    }

    /// Combination naming generators by the labels of the qubits that created them.
    pub fn combo<Q: QubitRef + Copy>(&self, qubits: &[Q]) -> Result<Combination> {
        qubits.iter().map(|&q| self.slot_of(q)).collect::<Result<BitSet>>().map(Combination)
    }

    /// Labels of the qubits that created each slot in `c`.
    pub fn combo_labels(&self, c: &Combination) -> Vec<String> {
        c.iter().map(|s| self.labels[self.slot_qubit[s]].clone()).collect()
    }

    pub fn logical_x(&self) -> &PauliOperator {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOperator {
        &self.logical_z
    }

    pub fn nt_stabs(&self) -> &StabMap {
        &self.nt
    }

    /// Tracked entries sorted by combination, for stable output.
    pub fn sorted_nt_stabs(&self) -> Vec<(&Combination, &PauliOperator)> {
        let mut v: Vec<_> = self.nt.iter().collect();
        v.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        v
    }

    pub fn max_combo_size(&self) -> Option<usize> {
        self.max_combo_size
    }

    /// Caps stored combinations at `cap` generators. Existing larger entries
    /// are dropped.
    pub fn set_max_combo_size(&mut self, cap: Option<usize>) {
        self.max_combo_size = cap;
        if let Some(m) = cap {
            self.nt.retain(|c, _| c.len() <= m);
        }
    }

    pub fn circuit(&self) -> &[CircuitOp] {
        &self.circuit
    }

    fn within_cap(&self, c: &Combination) -> bool {
        self.max_combo_size.is_none_or(|m| c.len() <= m)
    }

    pub fn stabilizer_of(&self, c: &Combination) -> Result<PauliOperator> {
        if c.is_empty() {
            return Err(SpfError::EmptyCombination);
        }
        let n = self.num_qubits();
        let mut acc = PauliOperator::identity(n);
        for s in c.iter() {
            acc.mul_assign_right(self.generator(s)?);
        }
        Ok(acc)
    }

    /// Adds a qubit in `|0⟩`, contributing generator `Z_q` in a fresh slot.
    pub fn add_qubit(&mut self, label: &str) -> Result<usize> {
        if self.index.contains_key(label) {
            return Err(SpfError::DuplicateLabel(label.to_string()));
        }
        let q = self.labels.len();
        let n = q + 1;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), q);
        for g in &mut self.generators {
            g.extend_to(n);
        }
        self.logical_x.extend_to(n);
        self.logical_z.extend_to(n);
        for op in self.nt.values_mut() {
            op.extend_to(n);
        }
        let slot = self.generators.len();
        let k = PauliOperator::single(n, q, Letter::Z)?;
        self.generators.push(k.clone());
        self.slot_qubit.push(q);
        if self.within_cap(&Combination::singleton(slot)) {
            self.nt.insert(Combination::singleton(slot), k);
        }
        self.circuit.push(CircuitOp::AddQubit { label: label.to_string() });
        Ok(q)
    }

    /// Conjugates everything by `H` or `S`; the tracked key set is unchanged.
    pub fn apply_single_qubit_gate<Q: QubitRef>(&mut self, qubit: Q, gate: Gate) -> Result<()> {
        let q = qubit.resolve(self)?;
        let apply: fn(&mut PauliOperator, usize) = match gate {
            Gate::H => PauliOperator::apply_h,
            Gate::S => PauliOperator::apply_s,
            Gate::Cz => return Err(SpfError::GateArity { gate: "CZ", expected: 2, got: 1 }),
        };
        for g in &mut self.generators {
            apply(g, q);
        }
        apply(&mut self.logical_x, q);
        apply(&mut self.logical_z, q);
        for op in self.nt.values_mut() {
            if op.acts_on(q) {
                apply(op, q);
            }
        }
        self.circuit.push(CircuitOp::Gate { gate, qubits: vec![q] });
        Ok(())
    }

    pub fn apply_h<Q: QubitRef>(&mut self, qubit: Q) -> Result<()> {
        self.apply_single_qubit_gate(qubit, Gate::H)
    }

    pub fn apply_s<Q: QubitRef>(&mut self, qubit: Q) -> Result<()> {
        self.apply_single_qubit_gate(qubit, Gate::S)
    }

    /// Applies `CZ(u, v)` and repairs the tracked map.
    ///
    /// Only entries acting on `u` or `v` can change. New non-trivial entries
    /// arise from pairs of old entries with disjoint combinations whose
    /// supports were disjoint before the gate and overlap after it; such a
    /// pair necessarily has one member on `u` only and the other on `v` only.
    /// Every entry touching `{u, v}` is then batch-tested.
    pub fn apply_cz<Q: QubitRef, R: QubitRef>(&mut self, u: Q, v: R) -> Result<()> {
        let u = u.resolve(self)?;
        let v = v.resolve(self)?;
        if u == v {
            return Err(SpfError::SameQubit(u));
        }
        for g in &mut self.generators {
            g.apply_cz(u, v);
        }
        self.logical_x.apply_cz(u, v);
        self.logical_z.apply_cz(u, v);

        // (combination, support before, value after)
        let mut u_side: Vec<(Combination, BitSet, PauliOperator)> = Vec::new();
        let mut v_side: Vec<(Combination, BitSet, PauliOperator)> = Vec::new();
        let mut touched: Vec<Combination> = Vec::new();
        for (c, op) in self.nt.iter_mut() {
            let (on_u, on_v) = (op.acts_on(u), op.acts_on(v));
            if !on_u && !on_v {
                continue;
            }
            let before = op.support();
            op.apply_cz(u, v);
            touched.push(c.clone());
            if on_u && !on_v {
                u_side.push((c.clone(), before, op.clone()));
            } else if on_v && !on_u {
                v_side.push((c.clone(), before, op.clone()));
            }
        }

        let mut added = StabMap::default();
        let words = v_side.len().div_ceil(64);
        let mask_of = |pick: &dyn Fn(&(Combination, BitSet, PauliOperator)) -> bool| {
            let mut m = vec![0u64; words];
            for (k, e) in v_side.iter().enumerate() {
                if pick(e) {
                    m[k / 64] |= 1 << (k % 64);
                }
            }
            m
        };
        let by_qubit: Vec<Vec<u64>> =
            (0..self.num_qubits()).map(|q| mask_of(&|e| e.1.contains(q))).collect();
        let by_slot: Vec<Vec<u64>> =
            (0..self.generators.len()).map(|i| mask_of(&|e| e.0.contains(i))).collect();
        let reaches_u = mask_of(&|e| e.2.acts_on(u));
        let mut allowed = vec![0u64; words];
        for (ca, before_a, after_a) in &u_side {
            if after_a.acts_on(v) {
                allowed.iter_mut().for_each(|w| *w = !0);
            } else {
                allowed.copy_from_slice(&reaches_u);
            }
            for q in before_a.iter() {
                allowed.iter_mut().zip(&by_qubit[q]).for_each(|(w, m)| *w &= !m);
            }
            for i in ca.iter() {
                allowed.iter_mut().zip(&by_slot[i]).for_each(|(w, m)| *w &= !m);
            }
            for (wi, &word) in allowed.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if k >= v_side.len() {
                        break;
                    }
                    let (cb, _, after_b) = &v_side[k];
                    let union = Combination(ca.bits().union(cb.bits()));
                    if !self.within_cap(&union) || self.nt.contains_key(&union) {
                        continue;
                    }
                    added.entry(union).or_insert_with(|| after_a * after_b);
                }
            }
        }
        touched.extend(added.keys().cloned());
        self.nt.extend(added);

        let cands: Vec<(&Combination, &PauliOperator)> =
            touched.iter().map(|c| (c, &self.nt[c])).collect();
        let trivial: Vec<Combination> = triviality::tracker_witnesses(&cands, &self.nt, &self.generators)
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        for c in trivial {
            self.nt.remove(&c);
        }
        self.circuit.push(CircuitOp::Gate { gate: Gate::Cz, qubits: vec![u, v] });
        Ok(())
    }

    /// Any of the supported gates, dispatching on arity.
    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(SpfError::GateArity { gate: "gate", expected: gate.arity(), got: qubits.len() });
        }
        match gate {
            Gate::Cz => self.apply_cz(qubits[0], qubits[1]),
            g => self.apply_single_qubit_gate(qubits[0], g),
        }
    }

    /// Measures `basis` on `qubit`, projecting onto `outcome` unless the result
    /// is already determined, in which case the state is left untouched and
    /// the forced eigenvalue is reported.
    pub fn measure_qubit<Q: QubitRef>(
        &mut self,
        qubit: Q,
        basis: Basis,
        outcome: Outcome,
    ) -> Result<MeasurementRecord> {
        self.measure_qubit_with_pivot(qubit, basis, outcome, None)
    }

    /// As [`Self::measure_qubit`], with the overwritten slot chosen by the
    /// caller. `None` prefers the slot created by the measured qubit when it
    /// anticommutes, otherwise the first anticommuting slot.
    pub fn measure_qubit_with_pivot<Q: QubitRef>(
        &mut self,
        qubit: Q,
        basis: Basis,
        outcome: Outcome,
        pivot: Option<usize>,
    ) -> Result<MeasurementRecord> {
        let q = qubit.resolve(self)?;
        let n = self.num_qubits();
        let mut m = PauliOperator::single(n, q, basis.letter())?;
        if outcome == Outcome::Minus {
            m.negate();
        }

        if let Some(slot) = pivot {
            let g = self.generators.get(slot).ok_or(SpfError::DeadGenerator(slot))?;
            if g.commutes(&m) {
                return Err(SpfError::CommutingPivot { slot, qubit: q });
            }
        }
        let own = self.slot_qubit.iter().position(|&sq| sq == q).filter(|&i| !self.generators[i].commutes(&m));
        let first = || self.generators.iter().position(|g| !g.commutes(&m));
        let Some(a) = pivot.or(own).or_else(first) else {
            if !self.logical_x.commutes(&m) || !self.logical_z.commutes(&m) {
                return Err(SpfError::LogicalDestroying { qubit: q, basis });
            }
            let forced = self.forced_eigenvalue(q, basis)?;
            self.circuit.push(CircuitOp::Measure { qubit: q, basis, outcome: forced });
            return Ok(MeasurementRecord {
                qubit: q,
                basis,
                outcome: forced,
                deterministic: true,
                slot: None,
                replacements: Vec::new(),
            });
        };

        let k_a = self.generators[a].clone();
        let mut changed = BitSet::new();
        for (i, g) in self.generators.iter_mut().enumerate() {
            if i == a {
                continue;
            }
            if !g.commutes(&m) {
                *g = &k_a * g;
                changed.insert(i);
            }
            if g.acts_on(q) {
                *g = &m * g;
                changed.insert(i);
            }
        }
        self.generators[a] = m.clone();
        for l in [&mut self.logical_x, &mut self.logical_z] {
            if !l.commutes(&m) {
                *l = &k_a * l;
            }
            if l.acts_on(q) {
                *l = &m * l;
            }
        }

        let old = std::mem::take(&mut self.nt);
        let mut candidates: FxHashSet<Combination> = FxHashSet::default();
        let mut fresh: Vec<Combination> = Vec::new();
        for (c, op) in &old {
            if c.contains(a) {
                let rest = c.without(a);
                if !rest.is_empty() && !old.contains_key(&rest) {
                    fresh.push(rest);
                }
                continue;
            }
            if c.intersects(&Combination(changed.clone())) {
                self.nt.insert(c.clone(), self.stabilizer_of(c)?);
                candidates.insert(c.clone());
            } else {
                self.nt.insert(c.clone(), op.clone());
            }
        }
        for c in fresh {
            if self.within_cap(&c) && !self.nt.contains_key(&c) {
                let value = self.stabilizer_of(&c)?;
                self.nt.insert(c.clone(), value);
                candidates.insert(c);
            }
        }
        self.nt.insert(Combination::singleton(a), m);

        let cands: Vec<(&Combination, &PauliOperator)> =
            candidates.iter().map(|c| (c, &self.nt[c])).collect();
        let trivial: Vec<Combination> = triviality::tracker_witnesses(&cands, &self.nt, &self.generators)
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        for c in trivial {
            self.nt.remove(&c);
        }

        let replacements =
            triviality::detrivialise_generators(&mut self.generators, &mut self.nt, self.max_combo_size)?;
        self.circuit.push(CircuitOp::Measure { qubit: q, basis, outcome });
        Ok(MeasurementRecord { qubit: q, basis, outcome, deterministic: false, slot: Some(a), replacements })
    }

    /// Eigenvalue of `P_q` when it lies in the stabilizer group up to sign.
    fn forced_eigenvalue(&self, q: usize, basis: Basis) -> Result<Outcome> {
        let target = PauliOperator::single(self.num_qubits(), q, basis.letter())?;
        let c = gf2::decompose(&self.generators, &target)
            .ok_or_else(|| SpfError::Internal("commuting measurement outside the stabilizer group".into()))?;
        let s = self.stabilizer_of(&Combination(c))?;
        match s.sign() {
            Some(sign) => Ok(Outcome::from_sign(sign)),
            None => Err(SpfError::Internal("non-Hermitian stabilizer".into())),
        }
    }

    fn check_group_relations(&self) -> Result<()> {
        let gens = &self.generators;
        for (i, g) in gens.iter().enumerate() {
            for h in &gens[i + 1..] {
                if !g.commutes(h) {
                    return Err(SpfError::Internal("generators do not commute".into()));
                }
            }
            if !g.commutes(&self.logical_x) || !g.commutes(&self.logical_z) {
                return Err(SpfError::Internal("generator anticommutes with a logical".into()));
            }
            if !g.is_hermitian() {
                return Err(SpfError::Internal("generator phase is not real".into()));
            }
        }
        if self.logical_x.commutes(&self.logical_z) {
            return Err(SpfError::Internal("logical operators commute".into()));
        }
        Ok(())
    }

    /// Verifies every structural invariant, including a single-shot test of
    /// each tracked entry. Intended for tests and debugging.
    pub fn check_invariants(&self) -> Result<()> {
        self.check_group_relations()?;
        if self.generators.len() + 1 != self.num_qubits() {
            return Err(SpfError::Internal("generator count is not qubit count minus one".into()));
        }
        for (c, op) in &self.nt {
            if self.stabilizer_of(c)? != *op {
                return Err(SpfError::Internal(format!("stale value for {c:?}")));
            }
            if !op.is_hermitian() {
                return Err(SpfError::Internal(format!("non-real phase for {c:?}")));
            }
            if let Some(w) = triviality::is_trivial_single_shot(c, &self.generators)? {
                return Err(SpfError::Internal(format!("tracked {c:?} is trivial via {w:?}")));
            }
        }
        Ok(())
    }

    pub fn to_snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            qubits: self.labels.clone(),
            generators: self.generators.clone(),
            generator_qubits: self.slot_qubit.clone(),
            logical_x: self.logical_x.clone(),
            logical_z: self.logical_z.clone(),
            nt_stabs: self
                .sorted_nt_stabs()
                .into_iter()
                .map(|(c, op)| TrackedEntry { combo: c.clone(), op: op.clone() })
                .collect(),
            circuit: self.circuit.clone(),
            meta: SnapshotMeta { max_combo_size: self.max_combo_size },
        }
    }

    pub fn from_snapshot(snap: StateSnapshot) -> Result<Self> {
        let n = snap.qubits.len();
        let mut index = FxHashMap::default();
        for (i, l) in snap.qubits.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(SpfError::DuplicateLabel(l.clone()));
            }
        }
        let all_ops = snap
            .generators
            .iter()
            .chain([&snap.logical_x, &snap.logical_z])
            .chain(snap.nt_stabs.iter().map(|e| &e.op));
        for op in all_ops {
            if op.num_qubits() != n {
                return Err(SpfError::Dimension { left: op.num_qubits(), right: n });
            }
        }
        if snap.generator_qubits.len() != snap.generators.len() {
            return Err(SpfError::Config("generator_qubits length mismatch".into()));
        }
        let state = StabilizerState {
            labels: snap.qubits,
            index,
            generators: snap.generators,
            slot_qubit: snap.generator_qubits,
            logical_x: snap.logical_x,
            logical_z: snap.logical_z,
            nt: snap.nt_stabs.into_iter().map(|e| (e.combo, e.op)).collect(),
            max_combo_size: snap.meta.max_combo_size,
            circuit: snap.circuit,
        };
        state.check_group_relations()?;
        Ok(state)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_snapshot())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_snapshot(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedEntry {
    pub combo: Combination,
    pub op: PauliOperator,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub max_combo_size: Option<usize>,
}

/// Serialisable form of a [`StabilizerState`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub qubits: Vec<String>,
    pub generators: Vec<PauliOperator>,
    #[serde(default)]
    pub generator_qubits: Vec<usize>,
    pub logical_x: PauliOperator,
    pub logical_z: PauliOperator,
    pub nt_stabs: Vec<TrackedEntry>,
    #[serde(default)]
    pub circuit: Vec<CircuitOp>,
    #[serde(default)]
    pub meta: SnapshotMeta,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_qubit_bond() -> StabilizerState {
        let mut s = StabilizerState::initialise();
        s.apply_h("I").unwrap();
        s.add_qubit("O").unwrap();
        s.apply_h("O").unwrap();
        s.apply_cz("I", "O").unwrap();
        s
    }

    #[test]
    fn initial_state() {
        let s = StabilizerState::initialise();
        assert_eq!(s.num_qubits(), 1);
        assert_eq!(s.num_generators(), 0);
        assert!(s.nt_stabs().is_empty());
        assert_eq!(s.logical_x().to_string(), "+X");
        assert!(!s.logical_x().commutes(s.logical_z()));
    }

    #[test]
    fn add_qubit_tracks_singletons() {
        let mut s = StabilizerState::initialise();
        for l in ["1", "2", "3"] {
            s.add_qubit(l).unwrap();
        }
        assert_eq!(s.nt_stabs().len(), 3);
        assert!(s.nt_stabs().keys().all(|c| c.len() == 1));
        assert!(matches!(s.add_qubit("2"), Err(SpfError::DuplicateLabel(_))));
        s.check_invariants().unwrap();
    }

    #[test]
    fn hadamard_on_fresh_qubit() {
        let mut s = StabilizerState::initialise();
        s.add_qubit("1").unwrap();
        s.apply_h("1").unwrap();
        assert_eq!(s.nt_stabs()[&Combination::singleton(0)].to_string(), "+IX");
    }

    #[test]
    fn two_qubit_cz_example() {
        let mut s = StabilizerState::initialise();
        s.add_qubit("1").unwrap();
        s.add_qubit("2").unwrap();
        s.apply_h("1").unwrap();
        s.apply_h("2").unwrap();
        s.apply_cz("1", "2").unwrap();
        let mut got: Vec<String> = s.sorted_nt_stabs().iter().map(|(_, op)| op.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["+IXZ", "+IYY", "+IZX"]);
        s.check_invariants().unwrap();
    }

    #[test]
    fn bond_logicals() {
        let s = two_qubit_bond();
        assert_eq!(s.logical_x().to_string(), "+ZI");
        assert_eq!(s.logical_z().to_string(), "+XZ");
    }

    #[test]
    fn cz_rejects_same_qubit() {
        let mut s = two_qubit_bond();
        assert!(matches!(s.apply_cz("O", "O"), Err(SpfError::SameQubit(_))));
        assert!(matches!(s.apply_cz("O", "Q"), Err(SpfError::UnknownQubit(_))));
    }

    #[test]
    fn deterministic_measurement_leaves_state() {
        let mut s = StabilizerState::initialise();
        s.add_qubit("1").unwrap();
        s.add_qubit("2").unwrap();
        let before = s.to_snapshot();
        let rec = s.measure_qubit("1", Basis::Z, Outcome::Minus).unwrap();
        assert!(rec.deterministic);
        assert_eq!(rec.outcome, Outcome::Plus);
        let after = s.to_snapshot();
        assert_eq!(before.generators, after.generators);
        assert_eq!(before.nt_stabs, after.nt_stabs);
    }

    #[test]
    fn logical_destroying_measurement_is_an_error() {
        let mut s = two_qubit_bond();
        s.add_qubit("3").unwrap();
        let mut t = StabilizerState::initialise();
        assert!(matches!(
            t.measure_qubit("I", Basis::X, Outcome::Plus),
            Err(SpfError::LogicalDestroying { .. })
        ));
        s.check_invariants().unwrap();
    }

    #[test]
    fn random_measurement_overwrites_an_anticommuting_slot() {
        let mut s = two_qubit_bond();
        let rec = s.measure_qubit("I", Basis::X, Outcome::Plus).unwrap();
        assert!(!rec.deterministic);
        assert_eq!(rec.slot, Some(0));
        assert_eq!(s.generator(0).unwrap().to_string(), "+XI");
        s.check_invariants().unwrap();
        // the logical qubit now lives on O
        assert!(!s.logical_x().acts_on(0));
        assert!(!s.logical_z().acts_on(0));
    }

    #[test]
    fn snapshot_round_trip() {
        let mut s = two_qubit_bond();
        s.set_max_combo_size(Some(3));
        let json = s.to_json().unwrap();
        let back = StabilizerState::from_json(&json).unwrap();
        assert_eq!(back.to_snapshot(), s.to_snapshot());
    }
}
