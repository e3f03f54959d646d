//! Fixtures shared by the benchmarks.

use spf_core::losssim::lossy_qubits;
use spf_core::patterns::find_patterns_auto;
use spf_core::{build_channel, BitSet, ChannelGraph, ChannelSpec, MeasurementPattern};

/// A channel with its patterns at `extra` above the minimum weight.
pub struct Fixture {
    pub channel: ChannelGraph,
    pub patterns: Vec<MeasurementPattern>,
    pub lossy: BitSet,
}

pub fn fixture(spec: &ChannelSpec, extra: usize) -> Fixture {
    let channel = build_channel(spec).expect("channel builds");
    let patterns = find_patterns_auto(&channel.state, channel.output(), extra).expect("pattern search").patterns;
    let lossy = lossy_qubits(channel.state.num_qubits(), channel.input(), channel.output());
    Fixture { channel, patterns, lossy }
}

pub fn worked_example() -> ChannelSpec {
    ChannelSpec::parallel_chains(3, 3)
}
