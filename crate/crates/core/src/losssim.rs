//! Monte Carlo teleportation rates under qubit loss.
//!
//! Heralded loss reveals the lost set before any measurement; unheralded loss
//! is only discovered when a measurement is attempted on a lost qubit. Every
//! trial draws from its own ChaCha stream keyed by `(grid index, trial)`, so
//! results do not depend on how trials are scheduled across threads.

use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::channels::{build_channel, ChannelSpec, LAYOUT_VERSION};
use crate::error::{Result, SpfError};
use crate::patterns::{find_patterns_auto, MeasurementPattern};
use crate::pauli::Basis;

/// Qubit masks are 128 bits wide.
pub const MAX_QUBITS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    Heralded,
    Unheralded,
}

impl LossMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LossMode::Heralded => "heralded",
            LossMode::Unheralded => "unheralded",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Pick among the lowest-weight surviving patterns.
    #[default]
    MaxTolerance,
    /// Pick among all surviving patterns.
    MostCommon,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::MaxTolerance => "max_tolerance",
            Strategy::MostCommon => "most_common",
        }
    }
}

/// Where the simulated patterns came from, echoed into every output.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSource {
    pub channel_kind: String,
    pub dims: String,
    pub layout_version: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSimConfig {
    pub loss_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: LossMode,
    pub strategy: Strategy,
    /// Keep patterns that do not touch a successfully measured qubit.
    #[serde(default)]
    pub keep_omitting: bool,
    pub source: PatternSource,
}

impl LossSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SpfError::Config("trials must be at least 1".into()));
        }
        if self.loss_grid.is_empty() {
            return Err(SpfError::Config("empty loss grid".into()));
        }
        if self.loss_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(SpfError::Config("loss rates must lie in [0, 1]".into()));
        }
        if self.loss_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(SpfError::Config("loss grid must be sorted".into()));
        }
        Ok(())
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || SpfError::Config(format!("invalid loss grid `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts.iter().map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        // round to the step's decimal resolution to avoid 0.30000000000000004
        return Ok((0..=count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect());
    }
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Estimated rate at one loss probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub p_loss: f64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl SimPoint {
    pub fn new(p_loss: f64, trials: u64, successes: u64) -> Self {
        let rate = successes as f64 / trials as f64;
        let stderr = (rate * (1.0 - rate) / trials as f64).sqrt();
        SimPoint { p_loss, trials, successes, rate, stderr }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: LossSimConfig,
    pub layout_version: u32,
    pub points: Vec<SimPoint>,
    /// Set when the pattern list was empty, so every trial failed.
    pub no_patterns: bool,
}

impl SimResult {
    pub fn csv_header() -> &'static str {
        "channel_kind,dims,layout_version,mode,strategy,p_loss,trials,successes,rate,stderr,seed"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::csv_header());
        out.push('\n');
        self.write_rows(&mut out);
        out
    }

    pub fn write_rows(&self, out: &mut String) {
        let c = &self.config;
        let strategy = match c.mode {
            LossMode::Heralded => "none",
            LossMode::Unheralded => c.strategy.as_str(),
        };
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{},{},{:.6},{:.6},{}",
                c.source.channel_kind,
                c.source.dims,
                self.layout_version,
                c.mode.as_str(),
                strategy,
                p.p_loss,
                p.trials,
                p.successes,
                p.rate,
                p.stderr,
                c.seed
            );
        }
    }
}

/// Patterns packed into qubit masks.
#[derive(Clone, Debug)]
pub struct PackedPatterns {
    measured: Vec<u128>,
    /// Qubits measured in a basis with an X component (X or Y).
    x_part: Vec<u128>,
    /// Qubits measured in a basis with a Z component (Z or Y).
    z_part: Vec<u128>,
}

fn bit(q: usize) -> u128 {
    1u128 << q
}

fn basis_parts(b: Basis) -> (bool, bool) {
    match b {
        Basis::X => (true, false),
        Basis::Y => (true, true),
        Basis::Z => (false, true),
    }
}

fn parts_basis(x: bool, z: bool) -> Basis {
    match (x, z) {
        (true, false) => Basis::X,
        (true, true) => Basis::Y,
        _ => Basis::Z,
    }
}

fn mask_of(set: &BitSet) -> Result<u128> {
    let mut m = 0u128;
    for q in set.iter() {
        if q >= MAX_QUBITS {
            return Err(SpfError::SizeGuard { what: "qubit index for loss simulation", limit: MAX_QUBITS - 1, got: q });
        }
        m |= bit(q);
    }
    Ok(m)
}

impl PackedPatterns {
    pub fn new(patterns: &[MeasurementPattern]) -> Result<Self> {
        let mut packed = PackedPatterns { measured: Vec::new(), x_part: Vec::new(), z_part: Vec::new() };
        for p in patterns {
            let (mut m, mut x, mut z) = (0u128, 0u128, 0u128);
            for (&q, &b) in &p.measurements {
                if q >= MAX_QUBITS {
                    return Err(SpfError::SizeGuard { what: "qubit index for loss simulation", limit: MAX_QUBITS - 1, got: q });
                }
                let (bx, bz) = basis_parts(b);
                m |= bit(q);
                if bx {
                    x |= bit(q);
                }
                if bz {
                    z |= bit(q);
                }
            }
            packed.measured.push(m);
            packed.x_part.push(x);
            packed.z_part.push(z);
        }
        Ok(packed)
    }

    pub fn len(&self) -> usize {
        self.measured.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measured.is_empty()
    }

    fn has(&self, r: usize, q: usize, b: Basis) -> bool {
        let (bx, bz) = basis_parts(b);
        self.measured[r] & bit(q) != 0
            && (self.x_part[r] & bit(q) != 0) == bx
            && (self.z_part[r] & bit(q) != 0) == bz
    }
}

/// Success table over loss patterns of the lossy qubits, or the list of
/// measured sets when there are too many lossy qubits for a table.
enum Herald {
    Table { lossy: Vec<usize>, ok: Vec<bool> },
    Scan { measured: Vec<u128> },
}

const TABLE_LIMIT: usize = 24;

impl Herald {
    fn new(packed: &PackedPatterns, lossy: &[usize]) -> Self {
        if lossy.len() > TABLE_LIMIT {
            let mut measured = packed.measured.clone();
            measured.sort_unstable();
            measured.dedup();
            return Herald::Scan { measured };
        }
        let k = lossy.len();
        let mut ok = vec![false; 1 << k];
        for &m in &packed.measured {
            // lossy qubits this pattern leaves alone
            let free = lossy.iter().enumerate().filter(|(_, &q)| m & bit(q) == 0).fold(0usize, |a, (i, _)| a | 1 << i);
            ok[free] = true;
        }
        for b in 0..k {
            for mask in (0..1usize << k).rev() {
                if mask >> b & 1 == 1 && ok[mask] {
                    ok[mask ^ 1 << b] = true;
                }
            }
        }
        Herald::Table { lossy: lossy.to_vec(), ok }
    }

    fn survives(&self, lost: u128) -> bool {
        match self {
            Herald::Table { lossy, ok } => {
                let idx = lossy.iter().enumerate().filter(|(_, &q)| lost & bit(q) != 0).fold(0usize, |a, (i, _)| a | 1 << i);
                ok[idx]
            }
            Herald::Scan { measured } => measured.iter().any(|&m| m & lost == 0),
        }
    }
}

fn trial_rng(seed: u64, point: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | (trial & 0xffff_ffff));
    rng
}

fn sample_lost(rng: &mut ChaCha8Rng, lossy: &[usize], p: f64) -> u128 {
    let mut lost = 0u128;
    for &q in lossy {
        if rng.random::<f64>() < p {
            lost |= bit(q);
        }
    }
    lost
}

/// Qubits subject to loss: everything except the input and the output.
pub fn lossy_qubits(num_qubits: usize, input: usize, output: usize) -> BitSet {
    (0..num_qubits).filter(|&q| q != input && q != output).collect()
}

/// Heralded rate at one loss probability.
pub fn simulate_heralded(patterns: &[MeasurementPattern], lossy: &BitSet, p_l: f64, trials: u64, seed: u64) -> Result<SimPoint> {
    simulate_heralded_at(patterns, lossy, p_l, trials, seed, 0)
}

fn simulate_heralded_at(
    patterns: &[MeasurementPattern],
    lossy: &BitSet,
    p_l: f64,
    trials: u64,
    seed: u64,
    point: usize,
) -> Result<SimPoint> {
    mask_of(lossy)?;
    let packed = PackedPatterns::new(patterns)?;
    let lossy = lossy.to_vec();
    let herald = Herald::new(&packed, &lossy);
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(seed, point, t);
            let lost = sample_lost(&mut rng, &lossy, p_l);
            !packed.is_empty() && herald.survives(lost)
        })
        .count() as u64;
    Ok(SimPoint::new(p_l, trials, successes))
}

/// One measurement attempt in an unheralded run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub qubit: usize,
    pub basis: Basis,
    pub lost: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub success: bool,
    pub transcript: Vec<Attempt>,
}

/// What the strategy knows after some attempts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
struct Knowledge {
    performed: u128,
    x_part: u128,
    z_part: u128,
    lost: u128,
}

struct Node {
    remaining: Arc<Vec<u32>>,
    complete: bool,
    /// Most frequent next measurements, in qubit then basis order.
    ties: Vec<(usize, Basis)>,
}

/// Memo of strategy decisions shared across trials; entries are pure
/// functions of the knowledge state, so sharing never changes results.
pub struct StrategyCache {
    nodes: Mutex<FxHashMap<Knowledge, Arc<Node>>>,
    stored: Mutex<usize>,
}

const CACHE_BUDGET: usize = 1 << 24;

impl Default for StrategyCache {
    fn default() -> Self {
        StrategyCache { nodes: Mutex::new(FxHashMap::default()), stored: Mutex::new(0) }
    }
}

impl StrategyCache {
    fn get(&self, k: &Knowledge) -> Option<Arc<Node>> {
        self.nodes.lock().expect("cache lock").get(k).cloned()
    }

    fn put(&self, k: Knowledge, node: Arc<Node>) {
        let mut stored = self.stored.lock().expect("cache lock");
        let mut nodes = self.nodes.lock().expect("cache lock");
        if *stored + node.remaining.len() > CACHE_BUDGET {
            nodes.clear();
            *stored = 0;
        }
        *stored += node.remaining.len() + 1;
        nodes.insert(k, node);
    }
}

struct Strategist<'a> {
    packed: &'a PackedPatterns,
    strategy: Strategy,
    keep_omitting: bool,
    cache: &'a StrategyCache,
}

impl Strategist<'_> {
    fn node(&self, k: Knowledge, parent: impl FnOnce() -> Vec<u32>) -> Arc<Node> {
        if let Some(n) = self.cache.get(&k) {
            return n;
        }
        let remaining = parent();
        let node = Arc::new(self.evaluate(&k, remaining));
        self.cache.put(k, node.clone());
        node
    }

    fn evaluate(&self, k: &Knowledge, remaining: Vec<u32>) -> Node {
        let p = self.packed;
        let complete = remaining.iter().any(|&r| p.measured[r as usize] & !k.performed == 0);
        let chosen: Vec<u32> = match self.strategy {
            Strategy::MostCommon => remaining.clone(),
            Strategy::MaxTolerance => {
                let w = remaining.iter().map(|&r| p.measured[r as usize].count_ones()).min().unwrap_or(0);
                remaining.iter().copied().filter(|&r| p.measured[r as usize].count_ones() == w).collect()
            }
        };
        let mut counts: FxHashMap<(usize, Basis), u64> = FxHashMap::default();
        for &r in &chosen {
            let r = r as usize;
            let mut open = p.measured[r] & !k.performed;
            while open != 0 {
                let q = open.trailing_zeros() as usize;
                open &= open - 1;
                let b = parts_basis(p.x_part[r] & bit(q) != 0, p.z_part[r] & bit(q) != 0);
                *counts.entry((q, b)).or_default() += 1;
            }
        }
        let best = counts.values().copied().max().unwrap_or(0);
        let mut ties: Vec<(usize, Basis)> = counts.into_iter().filter(|&(_, c)| c == best).map(|(m, _)| m).collect();
        ties.sort();
        Node { remaining: Arc::new(remaining), complete, ties }
    }

    fn run(&self, lost_truth: u128, rng: &mut ChaCha8Rng, record: bool) -> StrategyRun {
        let p = self.packed;
        let mut k = Knowledge::default();
        let mut node = self.node(k, || (0..p.len() as u32).collect());
        let mut transcript = Vec::new();
        loop {
            if node.complete {
                return StrategyRun { success: true, transcript };
            }
            if node.ties.is_empty() {
                return StrategyRun { success: false, transcript };
            }
            let pick = if node.ties.len() == 1 { 0 } else { rng.random_range(0..node.ties.len()) };
            let (q, b) = node.ties[pick];
            let is_lost = lost_truth & bit(q) != 0;
            if record {
                transcript.push(Attempt { qubit: q, basis: b, lost: is_lost });
            }
            let parent = node.remaining.clone();
            if is_lost {
                k.lost |= bit(q);
                node = self.node(k, || parent.iter().copied().filter(|&r| p.measured[r as usize] & bit(q) == 0).collect());
            } else {
                let (bx, bz) = basis_parts(b);
                k.performed |= bit(q);
                if bx {
                    k.x_part |= bit(q);
                }
                if bz {
                    k.z_part |= bit(q);
                }
                let keep = self.keep_omitting;
                node = self.node(k, || {
                    parent
                        .iter()
                        .copied()
                        .filter(|&r| {
                            let r = r as usize;
                            p.has(r, q, b) || (keep && p.measured[r] & bit(q) == 0)
                        })
                        .collect()
                });
            }
        }
    }
}

/// Runs the sequential measurement strategy against a hidden lost set.
pub fn run_unheralded_strategy(
    patterns: &[MeasurementPattern],
    lost: &BitSet,
    strategy: Strategy,
    keep_omitting: bool,
    rng: &mut ChaCha8Rng,
) -> Result<StrategyRun> {
    let packed = PackedPatterns::new(patterns)?;
    let cache = StrategyCache::default();
    let s = Strategist { packed: &packed, strategy, keep_omitting, cache: &cache };
    Ok(s.run(mask_of(lost)?, rng, true))
}

/// Unheralded rate at one loss probability.
pub fn simulate_unheralded(
    patterns: &[MeasurementPattern],
    lossy: &BitSet,
    p_l: f64,
    trials: u64,
    seed: u64,
    strategy: Strategy,
    keep_omitting: bool,
) -> Result<SimPoint> {
    let packed = PackedPatterns::new(patterns)?;
    let cache = StrategyCache::default();
    unheralded_at(&packed, &lossy.to_vec(), p_l, trials, seed, 0, strategy, keep_omitting, &cache)
}

#[allow(clippy::too_many_arguments)]
fn unheralded_at(
    packed: &PackedPatterns,
    lossy: &[usize],
    p_l: f64,
    trials: u64,
    seed: u64,
    point: usize,
    strategy: Strategy,
    keep_omitting: bool,
    cache: &StrategyCache,
) -> Result<SimPoint> {
    mask_of(&lossy.iter().copied().collect())?;
    let s = Strategist { packed, strategy, keep_omitting, cache };
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(seed, point, t);
            let lost = sample_lost(&mut rng, lossy, p_l);
            s.run(lost, &mut rng, false).success
        })
        .count() as u64;
    Ok(SimPoint::new(p_l, trials, successes))
}

/// Full grid for one pattern set.
pub fn simulate(patterns: &[MeasurementPattern], lossy: &BitSet, config: &LossSimConfig) -> Result<SimResult> {
    config.validate()?;
    let packed = PackedPatterns::new(patterns)?;
    let lossy_list = lossy.to_vec();
    let cache = StrategyCache::default();
    let mut points = Vec::with_capacity(config.loss_grid.len());
    for (i, &p) in config.loss_grid.iter().enumerate() {
        let point = match config.mode {
            LossMode::Heralded => simulate_heralded_at(patterns, lossy, p, config.trials, config.seed, i)?,
            LossMode::Unheralded => unheralded_at(
                &packed,
                &lossy_list,
                p,
                config.trials,
                config.seed,
                i,
                config.strategy,
                config.keep_omitting,
                &cache,
            )?,
        };
        points.push(point);
    }
    Ok(SimResult { config: config.clone(), layout_version: LAYOUT_VERSION, points, no_patterns: patterns.is_empty() })
}

/// Crossing estimates between two rate curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub sizes: (usize, usize),
    /// Interpolated loss rates where the curves swap order; empty when none.
    pub at: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub kind: String,
    pub sizes: Vec<usize>,
    pub extra_weight: usize,
    pub curves: Vec<SimResult>,
    pub crossings: Vec<Crossing>,
    /// Mean crossing when every size pair crosses exactly once and all
    /// crossings fall within [`CROSSING_SPREAD`] of each other.
    pub single_crossing: Option<f64>,
}

pub const CROSSING_SPREAD: f64 = 0.05;

/// Crossings between two curves on the same grid. Only grid points where
/// the curves differ by more than two combined standard errors are used,
/// and a crossing is placed by linear interpolation between consecutive
/// such points of opposite sign.
pub fn crossings(a: &[SimPoint], b: &[SimPoint]) -> Vec<f64> {
    let significant: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(pa, pb)| {
            let d = pa.rate - pb.rate;
            let sigma = (pa.stderr.powi(2) + pb.stderr.powi(2)).sqrt();
            (d.abs() > 2.0 * sigma && d != 0.0).then_some((pa.p_loss, d))
        })
        .collect();
    significant
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            p0 + (p1 - p0) * d0 / (d0 - d1)
        })
        .collect()
}

pub fn single_crossing(crossings: &[Crossing]) -> Option<f64> {
    if crossings.is_empty() || crossings.iter().any(|c| c.at.len() != 1) {
        return None;
    }
    let xs: Vec<f64> = crossings.iter().map(|c| c.at[0]).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo <= CROSSING_SPREAD).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Rate curves for square `k × k` lattices of one kind and their pairwise
/// crossings.
pub fn threshold_scan(
    kind: &str,
    sizes: &[usize],
    extra_weight: usize,
    base: &LossSimConfig,
) -> Result<ThresholdScan> {
    let mut curves = Vec::new();
    for &k in sizes {
        let spec = ChannelSpec::from_kind(kind, &[k, k], base.seed)?;
        if !matches!(spec, ChannelSpec::Square { .. } | ChannelSpec::Triangular { .. } | ChannelSpec::Hexagonal { .. }) {
            return Err(SpfError::Config(format!("threshold scans need a lattice kind, got `{kind}`")));
        }
        let channel = build_channel(&spec)?;
        let search = find_patterns_auto(&channel.state, channel.output(), extra_weight)?;
        let lossy = channel.graph.channel_qubits();
        let mut config = base.clone();
        config.source = PatternSource {
            channel_kind: spec.kind_name().to_string(),
            dims: spec.dims_string(),
            layout_version: LAYOUT_VERSION,
        };
        curves.push(simulate(&search.patterns, &lossy, &config)?);
    }
    let mut pairs = Vec::new();
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            pairs.push(Crossing { sizes: (sizes[i], sizes[j]), at: crossings(&curves[i].points, &curves[j].points) });
        }
    }
    let single = single_crossing(&pairs);
    Ok(ThresholdScan {
        kind: kind.to_string(),
        sizes: sizes.to_vec(),
        extra_weight,
        curves,
        crossings: pairs,
        single_crossing: single,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn pattern(ms: &[(usize, Basis)]) -> MeasurementPattern {
        MeasurementPattern { output: 9, measurements: ms.iter().copied().collect::<BTreeMap<_, _>>(), provenance: Vec::new() }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:0.1:0.05").unwrap(), vec![0.0, 0.05, 0.1]);
        assert_eq!(parse_grid("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_grid("0:0.5:0.025").unwrap().len(), 21);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn heralded_extremes() {
        let ps = vec![pattern(&[(0, Basis::X), (1, Basis::X)]), pattern(&[(0, Basis::X), (2, Basis::X)])];
        let lossy: BitSet = [1, 2].into_iter().collect();
        assert_eq!(simulate_heralded(&ps, &lossy, 0.0, 100, 1).unwrap().successes, 100);
        assert_eq!(simulate_heralded(&ps, &lossy, 1.0, 100, 1).unwrap().successes, 0);
        assert_eq!(simulate_heralded(&[], &lossy, 0.0, 10, 1).unwrap().successes, 0);
    }

    #[test]
    fn strategy_recovers_after_loss() {
        let ps = vec![
            pattern(&[(0, Basis::X), (1, Basis::X)]),
            pattern(&[(0, Basis::X), (2, Basis::Z)]),
            pattern(&[(0, Basis::X), (1, Basis::Z), (2, Basis::Z)]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lost: BitSet = [1].into_iter().collect();
        let run = run_unheralded_strategy(&ps, &lost, Strategy::MaxTolerance, false, &mut rng).unwrap();
        assert!(run.success);
        assert!(run.transcript.iter().any(|a| a.lost));
        let all: BitSet = [1, 2].into_iter().collect();
        let run = run_unheralded_strategy(&ps, &all, Strategy::MostCommon, false, &mut rng).unwrap();
        assert!(!run.success);
    }

    #[test]
    fn crossing_interpolation() {
        let mk = |rates: &[f64]| -> Vec<SimPoint> {
            rates.iter().enumerate().map(|(i, &r)| SimPoint { p_loss: i as f64 * 0.1, trials: 1, successes: 0, rate: r, stderr: 0.0 }).collect()
        };
        let a = mk(&[1.0, 0.8, 0.4, 0.1]);
        let b = mk(&[1.0, 0.9, 0.3, 0.0]);
        let x = crossings(&a, &b);
        assert_eq!(x.len(), 1);
        assert!((x[0] - 0.15).abs() < 1e-12);
        assert!(crossings(&a, &a).is_empty());
    }
}
