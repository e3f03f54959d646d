//! Teleportation measurement patterns from pairs of logical operators, the
//! graph-path baseline, and loss-configuration accounting.
//!
//! A pair of logical operators yields a pattern when their letters on the
//! output qubit anticommute and their letters on every other qubit commute;
//! the pattern measures each other qubit in the (unique) non-identity basis
//! either operator uses there.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::channels::Graph;
use crate::error::{Result, SpfError};
use crate::pauli::{Basis, Letter, PauliOperator};
use crate::state::{Combination, QubitRef, StabilizerState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalKind {
    X,
    Y,
    Z,
}

impl LogicalKind {
    pub const ALL: [LogicalKind; 3] = [LogicalKind::X, LogicalKind::Z, LogicalKind::Y];
}

/// `S_source · L̄` for one of the bare logicals `X̄`, `Z̄`, `Ȳ = i·X̄·Z̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalOperator {
    pub op: PauliOperator,
    pub kind: LogicalKind,
    pub source: Combination,
}

/// Bare logical of the given kind.
pub fn bare_logical(state: &StabilizerState, kind: LogicalKind) -> PauliOperator {
    match kind {
        LogicalKind::X => state.logical_x().clone(),
        LogicalKind::Z => state.logical_z().clone(),
        LogicalKind::Y => {
            let mut y = state.logical_x() * state.logical_z();
            y.mul_phase(1);
            y
        }
    }
}

/// Pauli correction and output frame for one outcome record.
///
/// After applying `correction` on the output qubit, the output carries the
/// input state rotated by the single-qubit Clifford that maps `X → frame_x`
/// and `Z → frame_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Byproduct {
    pub correction: Letter,
    pub frame_x: Letter,
    pub frame_z: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    pub output: usize,
    pub measurements: BTreeMap<usize, Basis>,
    /// Every logical pair producing this measurement map; empty for
    /// patterns that did not come from a pairing (graph paths).
    pub provenance: Vec<(LogicalOperator, LogicalOperator)>,
}

impl MeasurementPattern {
    pub fn weight(&self) -> usize {
        self.measurements.len()
    }

    pub fn measured(&self) -> BitSet {
        self.measurements.keys().copied().collect()
    }

    /// Builds the pattern for a valid pair, or `None` when the pair violates
    /// the anticommute-at-output / commute-elsewhere conditions.
    pub fn from_pair(output: usize, a: &LogicalOperator, b: &LogicalOperator) -> Option<Self> {
        let measurements = pair_measurements(output, &a.op, &b.op)?;
        Some(MeasurementPattern { output, measurements, provenance: vec![(a.clone(), b.clone())] })
    }

    /// Checks the pairing conditions for every provenance.
    pub fn satisfies_pair_conditions(&self) -> bool {
        self.provenance.iter().all(|(a, b)| {
            pair_measurements(self.output, &a.op, &b.op).as_ref() == Some(&self.measurements)
        })
    }

    /// Correction for the first provenance given outcomes `±1` per measured qubit.
    pub fn byproduct(&self, outcomes: &BTreeMap<usize, i8>) -> Result<Byproduct> {
        let (a, b) = self
            .provenance
            .first()
            .ok_or_else(|| SpfError::Config("pattern has no logical provenance".into()))?;
        let image_a = output_image(self.output, &a.op, outcomes)?;
        let image_b = output_image(self.output, &b.op, outcomes)?;
        let (fx, fz) = frame_images((a.kind, image_a), (b.kind, image_b))?;
        let mut correction = PauliOperator::identity(1);
        if fx.sign() == Some(-1) {
            correction = &correction * &fz;
        }
        if fz.sign() == Some(-1) {
            correction = &correction * &fx;
        }
        Ok(Byproduct { correction: correction.letter(0), frame_x: fx.letter(0), frame_z: fz.letter(0) })
    }
}

/// `±P_O` that `op` reduces to once every other qubit in its support has
/// been measured with the recorded outcome.
fn output_image(output: usize, op: &PauliOperator, outcomes: &BTreeMap<usize, i8>) -> Result<PauliOperator> {
    let mut sign = op.sign().ok_or_else(|| SpfError::Internal("non-Hermitian logical".into()))?;
    for q in op.support().iter() {
        if q == output {
            continue;
        }
        let m = outcomes
            .get(&q)
            .ok_or_else(|| SpfError::Config(format!("missing outcome for qubit {q}")))?;
        sign *= m.signum();
    }
    let mut image = PauliOperator::single(1, 0, op.letter(output))?;
    if sign < 0 {
        image.negate();
    }
    Ok(image)
}

/// Images of `X̄` and `Z̄` from the images of the two provenance kinds.
fn frame_images(
    a: (LogicalKind, PauliOperator),
    b: (LogicalKind, PauliOperator),
) -> Result<(PauliOperator, PauliOperator)> {
    use LogicalKind::*;
    let minus_i_times = |p: PauliOperator, q: &PauliOperator| {
        let mut r = &p * q;
        r.mul_phase(3);
        r
    };
    let (a, b) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    match (a.0, b.0) {
        (X, Z) => Ok((a.1, b.1)),
        // Ȳ = i·X̄·Z̄, so Z̄ = −i·X̄·Ȳ and X̄ = −i·Ȳ·Z̄
        (X, Y) => {
            let z = minus_i_times(a.1.clone(), &b.1);
            Ok((a.1, z))
        }
        (Y, Z) => {
            let x = minus_i_times(a.1, &b.1);
            Ok((x, b.1))
        }
        _ => Err(SpfError::Internal("provenance pair of identical kinds".into())),
    }
}

/// Measurement map of a pair, if the pair satisfies the pairing conditions.
pub fn pair_measurements(
    output: usize,
    a: &PauliOperator,
    b: &PauliOperator,
) -> Option<BTreeMap<usize, Basis>> {
    let (la, lb) = (a.letter(output), b.letter(output));
    if la == Letter::I || lb == Letter::I || la == lb {
        return None;
    }
    let mut conflict = a.x_bits().symmetric_difference(b.x_bits());
    conflict.union_assign(&a.z_bits().symmetric_difference(b.z_bits()));
    let shared = a.support().intersection(&b.support());
    let mut bad = conflict.intersection(&shared);
    bad.remove(output);
    if !bad.is_empty() {
        return None;
    }
    let x = a.x_bits().union(b.x_bits());
    let z = a.z_bits().union(b.z_bits());
    let mut out = BTreeMap::new();
    for q in x.union(&z).iter() {
        if q == output {
            continue;
        }
        let basis = Letter::from_bits(x.contains(q), z.contains(q)).basis().expect("in support");
        out.insert(q, basis);
    }
    Some(out)
}

/// Result of a pattern search.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PatternSearch {
    pub output: usize,
    pub max_weight: usize,
    /// Distinct measurement maps, ascending weight then map order.
    pub patterns: Vec<MeasurementPattern>,
    /// Number of valid logical pairs, before collapsing duplicate maps.
    pub pair_count: usize,
    /// Valid pairs of one `X̄`-kind and one `Z̄`-kind operator.
    pub xz_pair_count: usize,
}

fn check_output(state: &StabilizerState, output: usize) -> Result<()> {
    if output == 0 {
        return Err(SpfError::OutputQubit("output coincides with the input qubit".into()));
    }
    if output >= state.num_qubits() {
        return Err(SpfError::OutputQubit(format!("qubit {output} does not exist")));
    }
    Ok(())
}

/// Every `S_c · L̄` for tracked `c` (and the bare logicals) acting on the
/// output with weight at most `max_logical_weight`.
pub fn logical_operators(
    state: &StabilizerState,
    output: usize,
    max_logical_weight: usize,
) -> Vec<LogicalOperator> {
    let bare: Vec<(LogicalKind, PauliOperator)> =
        LogicalKind::ALL.iter().map(|&k| (k, bare_logical(state, k))).collect();
    let mut sources: Vec<(Combination, Option<&PauliOperator>)> = vec![(Combination::default(), None)];
    sources.extend(state.sorted_nt_stabs().into_iter().map(|(c, s)| (c.clone(), Some(s))));
    sources
        .par_iter()
        .flat_map_iter(|(c, s)| {
            bare.iter().filter_map(move |(kind, l)| {
                let op = match s {
                    Some(s) => *s * l,
                    None => l.clone(),
                };
                (op.acts_on(output) && op.weight() <= max_logical_weight).then(|| LogicalOperator {
                    op,
                    kind: *kind,
                    source: c.clone(),
                })
            })
        })
        .collect()
}

/// All distinct patterns of weight at most `max_weight`, from logical
/// operators of weight at most `max_weight + 1`.
pub fn find_measurement_patterns<Q: QubitRef>(
    state: &StabilizerState,
    output: Q,
    max_weight: usize,
) -> Result<PatternSearch> {
    let output = output.resolve(state)?;
    check_output(state, output)?;
    let logicals = logical_operators(state, output, max_weight + 1);
    Ok(pair_up(output, max_weight, &logicals))
}

/// Right-hand logicals arranged by their letters on the non-output qubits,
/// so that a left operator only walks branches it is compatible with.
struct LetterTrie {
    positions: Vec<usize>,
    /// Children per node indexed by letter `I, X, Y, Z`; 0 means absent.
    children: Vec<[u32; 4]>,
    /// Operators ending at each node (only leaves are populated).
    leaves: FxHashMap<u32, Vec<u32>>,
}

fn letter_index(l: Letter) -> usize {
    match l {
        Letter::I => 0,
        Letter::X => 1,
        Letter::Y => 2,
        Letter::Z => 3,
    }
}

impl LetterTrie {
    fn build(positions: Vec<usize>, ops: &[&LogicalOperator]) -> Self {
        let mut trie = LetterTrie { positions, children: vec![[0; 4]], leaves: FxHashMap::default() };
        for (i, l) in ops.iter().enumerate() {
            let mut node = 0usize;
            for &q in &trie.positions {
                let k = letter_index(l.op.letter(q));
                if trie.children[node][k] == 0 {
                    trie.children[node][k] = trie.children.len() as u32;
                    trie.children.push([0; 4]);
                }
                node = trie.children[node][k] as usize;
            }
            trie.leaves.entry(node as u32).or_default().push(i as u32);
        }
        trie
    }

    /// Operators whose letters agree with `letters` wherever both act, adding
    /// at most `budget` qubits outside the support of `letters`.
    fn compatible(&self, letters: &[usize], budget: usize, out: &mut Vec<u32>) {
        self.walk(0, 0, letters, budget, out);
    }

    fn walk(&self, node: usize, depth: usize, letters: &[usize], budget: usize, out: &mut Vec<u32>) {
        if depth == self.positions.len() {
            if let Some(list) = self.leaves.get(&(node as u32)) {
                out.extend_from_slice(list);
            }
            return;
        }
        let here = letters[depth];
        let kids = &self.children[node];
        if kids[0] != 0 {
            self.walk(kids[0] as usize, depth + 1, letters, budget, out);
        }
        if here != 0 {
            if kids[here] != 0 {
                self.walk(kids[here] as usize, depth + 1, letters, budget, out);
            }
        } else if budget > 0 {
            for &k in &kids[1..] {
                if k != 0 {
                    self.walk(k as usize, depth + 1, letters, budget - 1, out);
                }
            }
        }
    }
}

/// Pairs logicals grouped by their letter at the output, lowest weights first.
fn pair_up(output: usize, max_weight: usize, logicals: &[LogicalOperator]) -> PatternSearch {
    let mut groups: [Vec<&LogicalOperator>; 3] = Default::default();
    for l in logicals {
        let g = match l.op.letter(output) {
            Letter::X => 0,
            Letter::Y => 1,
            Letter::Z => 2,
            Letter::I => continue,
        };
        groups[g].push(l);
    }
    for g in &mut groups {
        g.sort_by(|a, b| (a.op.weight(), a.kind, &a.source).cmp(&(b.op.weight(), b.kind, &b.source)));
    }
    let n = logicals.first().map_or(0, |l| l.op.num_qubits());
    let positions: Vec<usize> = (0..n).filter(|&q| q != output).collect();

    // (left group, left index, right group, right index)
    let mut found: Vec<(u8, u32, u8, u32)> = Vec::new();
    for (ga, gb) in [(0u8, 1u8), (0, 2), (1, 2)] {
        let (left, right) = (&groups[ga as usize], &groups[gb as usize]);
        if left.is_empty() || right.is_empty() {
            continue;
        }
        let trie = LetterTrie::build(positions.clone(), right);
        let chunk: Vec<(u8, u32, u8, u32)> = left
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, a)| {
                let off_output = a.op.weight() - 1;
                let mut hits = Vec::new();
                if off_output <= max_weight {
                    let letters: Vec<usize> = positions.iter().map(|&q| letter_index(a.op.letter(q))).collect();
                    trie.compatible(&letters, max_weight - off_output, &mut hits);
                    hits.sort_unstable();
                }
                hits.into_iter().map(move |j| (ga, i as u32, gb, j))
            })
            .collect();
        found.extend(chunk);
    }

    let pick = |g: u8, i: u32| groups[g as usize][i as usize];
    let pair_count = found.len();
    let xz_pair_count = found
        .iter()
        .filter(|&&(ga, i, gb, j)| {
            matches!(
                (pick(ga, i).kind, pick(gb, j).kind),
                (LogicalKind::X, LogicalKind::Z) | (LogicalKind::Z, LogicalKind::X)
            )
        })
        .count();

    let mut index: FxHashMap<(BitSet, BitSet), usize> = FxHashMap::default();
    let mut patterns: Vec<MeasurementPattern> = Vec::new();
    for (ga, i, gb, j) in found {
        let (a, b) = (pick(ga, i), pick(gb, j));
        let (a, b) = if a.kind <= b.kind { (a, b) } else { (b, a) };
        let mut x = a.op.x_bits().union(b.op.x_bits());
        let mut z = a.op.z_bits().union(b.op.z_bits());
        x.remove(output);
        z.remove(output);
        match index.get(&(x.clone(), z.clone())) {
            Some(&k) => patterns[k].provenance.push((a.clone(), b.clone())),
            None => {
                let measurements = x
                    .union(&z)
                    .iter()
                    .map(|q| (q, Letter::from_bits(x.contains(q), z.contains(q)).basis().expect("in support")))
                    .collect();
                index.insert((x, z), patterns.len());
                patterns.push(MeasurementPattern { output, measurements, provenance: vec![(a.clone(), b.clone())] });
            }
        }
    }
    for p in &mut patterns {
        p.provenance.sort_by_key(provenance_key);
    }
    sort_patterns(&mut patterns);
    PatternSearch { output, max_weight, patterns, pair_count, xz_pair_count }
}

fn provenance_key(p: &(LogicalOperator, LogicalOperator)) -> (usize, LogicalKind, LogicalKind, Combination, Combination) {
    (p.0.op.weight() + p.1.op.weight(), p.0.kind, p.1.kind, p.0.source.clone(), p.1.source.clone())
}

/// Stable order: ascending weight, then lexicographic measurement map.
pub fn sort_patterns(patterns: &mut [MeasurementPattern]) {
    patterns.sort_by(|a, b| {
        (a.weight(), a.measurements.iter().collect::<Vec<_>>())
            .cmp(&(b.weight(), b.measurements.iter().collect::<Vec<_>>()))
    });
}

/// Smallest weight of any pattern, if one exists.
pub fn minimum_pattern_weight<Q: QubitRef>(state: &StabilizerState, output: Q) -> Result<Option<usize>> {
    let output = output.resolve(state)?;
    check_output(state, output)?;
    let n = state.num_qubits();
    for w in 1..n {
        let logicals = logical_operators(state, output, w + 1);
        let search = pair_up(output, w, &logicals);
        if !search.patterns.is_empty() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Search at `minimum weight + extra_weight`.
pub fn find_patterns_auto<Q: QubitRef>(
    state: &StabilizerState,
    output: Q,
    extra_weight: usize,
) -> Result<PatternSearch> {
    let output = output.resolve(state)?;
    match minimum_pattern_weight(state, output)? {
        Some(w) => find_measurement_patterns(state, output, w + extra_weight),
        None => Ok(PatternSearch { output, ..Default::default() }),
    }
}

/// Budget for the graph-path baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathBudget {
    /// Paths up to this many edges longer than the shortest are included.
    pub extra_length: usize,
    pub max_paths: usize,
}

impl Default for PathBudget {
    fn default() -> Self {
        PathBudget { extra_length: 2, max_paths: 10_000 }
    }
}

/// Induced simple paths from `input` to `output`, shortest first.
pub fn induced_paths(graph: &Graph, input: usize, output: usize, budget: PathBudget) -> Vec<Vec<usize>> {
    let n = graph.num_nodes();
    if input >= n || output >= n || input == output {
        return Vec::new();
    }
    let mut dist = vec![usize::MAX; n];
    dist[output] = 0;
    let mut queue = VecDeque::from([output]);
    while let Some(v) = queue.pop_front() {
        for w in graph.neighbours(v).iter() {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[input] == usize::MAX {
        return Vec::new();
    }
    let max_len = dist[input] + budget.extra_length;
    let mut paths = Vec::new();
    let mut path = vec![input];
    let mut on_path = BitSet::singleton(input);
    extend_paths(graph, output, max_len, &dist, &mut path, &mut on_path, &mut paths, budget.max_paths);
    paths.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    paths
}

#[allow(clippy::too_many_arguments)]
fn extend_paths(
    graph: &Graph,
    output: usize,
    max_len: usize,
    dist: &[usize],
    path: &mut Vec<usize>,
    on_path: &mut BitSet,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) {
    if out.len() >= cap {
        return;
    }
    let last = *path.last().expect("non-empty path");
    if last == output {
        out.push(path.clone());
        return;
    }
    let edges_so_far = path.len() - 1;
    for w in graph.neighbours(last).iter() {
        if on_path.contains(w) || dist[w] == usize::MAX || edges_so_far + 1 + dist[w] > max_len {
            continue;
        }
        // induced: w may touch the path only at its current end
        let touches = graph.neighbours(w).intersection(on_path);
        if touches.len() != 1 {
            continue;
        }
        path.push(w);
        on_path.insert(w);
        extend_paths(graph, output, max_len, dist, path, on_path, out, cap);
        on_path.remove(w);
        path.pop();
    }
}

/// Graph-path patterns: `X` along each path (except the output), `Z` on the
/// path's neighbourhood.
pub fn gpf_patterns(graph: &Graph, input: usize, output: usize, budget: PathBudget) -> Vec<MeasurementPattern> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for path in induced_paths(graph, input, output, budget) {
        let on_path: BitSet = path.iter().copied().collect();
        let mut measurements = BTreeMap::new();
        for &v in &path {
            if v != output {
                measurements.insert(v, Basis::X);
            }
        }
        for &v in &path {
            for w in graph.neighbours(v).iter() {
                if !on_path.contains(w) {
                    measurements.insert(w, Basis::Z);
                }
            }
        }
        if seen.insert(measurements.clone()) {
            out.push(MeasurementPattern { output, measurements, provenance: Vec::new() });
        }
    }
    out
}

/// Loss configurations a pattern set can absorb.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossTolerance {
    /// `counts[k]` = number of tolerable lost sets of size `k` (index 0 is ∅).
    pub counts: Vec<u64>,
    /// Tolerable non-empty sets.
    pub total: u64,
    pub max_size: usize,
    /// Inclusion-maximal tolerable sets, sorted.
    pub maximal: Vec<BitSet>,
}

impl LossTolerance {
    pub fn is_tolerable(&self, lost: &BitSet) -> bool {
        self.maximal.iter().any(|m| lost.is_subset(m))
    }
}

/// Counts lost subsets of `candidates` avoided by at least one pattern.
pub fn tolerable_loss_configurations(patterns: &[MeasurementPattern], candidates: &BitSet) -> LossTolerance {
    let mut free: Vec<BitSet> = patterns
        .iter()
        .map(|p| candidates.difference(&p.measured()))
        .collect::<FxHashSet<_>>()
        .into_iter()
        .collect();
    free.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut maximal: Vec<BitSet> = Vec::new();
    for f in free {
        if !maximal.iter().any(|m| f.is_subset(m)) {
            maximal.push(f);
        }
    }
    maximal.sort();

    let members = candidates.to_vec();
    let k = members.len();
    let mut counts = vec![0u64; k + 1];
    if patterns.is_empty() {
        return LossTolerance { counts, total: 0, max_size: 0, maximal: Vec::new() };
    }
    if k <= 20 {
        let position: FxHashMap<usize, usize> = members.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut mark = vec![false; 1 << k];
        for m in &maximal {
            let mask = m.iter().fold(0usize, |acc, q| acc | 1 << position[&q]);
            mark[mask] = true;
        }
        for bit in 0..k {
            for mask in 0..1usize << k {
                if mask >> bit & 1 == 1 && mark[mask] {
                    mark[mask ^ 1 << bit] = true;
                }
            }
        }
        for (mask, &ok) in mark.iter().enumerate() {
            if ok {
                counts[mask.count_ones() as usize] += 1;
            }
        }
    } else {
        let mut all: FxHashSet<BitSet> = FxHashSet::default();
        for m in &maximal {
            let ms = m.to_vec();
            for size in 0..=ms.len() {
                all.extend(crate::bits::k_subsets(&ms, size));
            }
        }
        for s in &all {
            counts[s.len()] += 1;
        }
    }
    let total = counts.iter().skip(1).sum();
    let max_size = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
    LossTolerance { counts, total, max_size, maximal }
}
