use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use spf_core::channels::{build_state, ChannelDescription};
use spf_core::losssim::{
    lossy_qubits, parse_grid, simulate, threshold_scan, LossMode, LossSimConfig, PatternSource, SimResult, Strategy,
};
use spf_core::oracle::{certify_pattern, InputState};
use spf_core::patterns::{
    find_measurement_patterns, find_patterns_auto, gpf_patterns, minimum_pattern_weight,
    tolerable_loss_configurations, PathBudget,
};
use spf_core::{build_channel, BitSet, ChannelSpec, StabilizerState};

use crate::error::{CliError, CliResult};
use crate::output::{emit, emit_json, read_json, Meta, PatternFile, SearchSummary, StateFile};
use crate::{
    BenchArgs, BuildArgs, Cli, Command, GpfArgs, LossArgs, ModeArg, PatternsArgs, SimulateArgs, StrategyArg,
    SweepArgs, ToleranceArgs, VerifyArgs,
};

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Build(a) => build(a),
        Command::Patterns(a) => patterns(a),
        Command::Gpf(a) => gpf(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Tolerance(a) => tolerance(a),
        Command::Bench(a) => bench(a),
    }
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<usize>> {
    text.split([',', 'x', 'X'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("invalid {what} `{text}`"))))
        .collect()
}

fn channel_spec(kind: &str, dims: &[usize], seed: u64) -> CliResult<ChannelSpec> {
    match kind {
        "chains" => match dims {
            [rows, cols] if *rows > 0 && *cols > 0 => Ok(ChannelSpec::parallel_chains(*rows, *cols)),
            _ => Err(CliError::Usage("chains takes two positive dimensions (chains x length)".into())),
        },
        _ => Ok(ChannelSpec::from_kind(kind, dims, seed)?),
    }
}

/// `auto` caps combinations at half the qubit count; `off` disables the cap.
fn combo_cap(text: &str, num_qubits: usize) -> CliResult<Option<usize>> {
    match text {
        "off" => Ok(None),
        "auto" => Ok(Some((num_qubits / 2).max(1))),
        n => match n.parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(CliError::Usage(format!("--max-combo-size must be auto, off or a positive number, got `{n}`"))),
        },
    }
}

fn build(a: BuildArgs) -> CliResult<()> {
    let dims = parse_list(&a.dims, "dimensions")?;
    let spec = channel_spec(&a.kind, &dims, a.seed)?;
    let graph = spec.graph()?;
    let cap = combo_cap(&a.max_combo_size, graph.num_nodes())?;
    let state = build_state(&graph, cap)?;
    let config = json!({ "kind": a.kind, "dims": dims, "max_combo_size": a.max_combo_size });
    let file = StateFile {
        meta: Meta::new("build", a.seed, config),
        channel: ChannelDescription::new(&spec, &graph),
        state: state.to_snapshot(),
    };
    emit_json(a.out.as_deref(), &file)
}

fn load_state(path: &Path) -> CliResult<(StateFile, StabilizerState)> {
    let file: StateFile = read_json(path)?;
    let state = StabilizerState::from_snapshot(file.state.clone())?;
    Ok((file, state))
}

fn patterns(a: PatternsArgs) -> CliResult<()> {
    let (file, mut state) = load_state(&a.state)?;
    if let Some(text) = &a.max_combo_size {
        let graph = file.channel.graph()?;
        state = build_state(&graph, combo_cap(text, graph.num_nodes())?)?;
    }
    let output = state.qubit(a.output_qubit.as_str())?;
    let search = match a.max_weight {
        Some(w) => find_measurement_patterns(&state, output, w)?,
        None => find_patterns_auto(&state, output, a.extra_weight)?,
    };
    let minimum = minimum_pattern_weight(&state, output)?;
    let config = json!({
        "state": a.state,
        "output_qubit": a.output_qubit,
        "extra_weight": a.extra_weight,
        "max_weight": a.max_weight,
        "max_combo_size": a.max_combo_size.as_deref().unwrap_or("as built"),
        "minimum_weight": minimum,
    });
    let out = PatternFile {
        meta: Meta::new("patterns", file.meta.seed, config),
        channel: file.channel,
        qubits: state.labels().to_vec(),
        input_qubit: 0,
        output_qubit: output,
        search: SearchSummary {
            method: "spf".into(),
            max_weight: search.max_weight,
            count: search.patterns.len(),
            pair_count: search.pair_count,
            xz_pair_count: search.xz_pair_count,
        },
        patterns: search.patterns,
    };
    emit_json(a.out.as_deref(), &out)
}

fn gpf(a: GpfArgs) -> CliResult<()> {
    let (file, state) = load_state(&a.state)?;
    let graph = file.channel.graph()?;
    let output = state.qubit(a.output_qubit.as_str())?;
    let budget = PathBudget { extra_length: a.extra_length, max_paths: a.max_paths };
    let found = gpf_patterns(&graph, graph.input(), output, budget);
    let config = json!({
        "state": a.state,
        "output_qubit": a.output_qubit,
        "extra_length": a.extra_length,
        "max_paths": a.max_paths,
    });
    let out = PatternFile {
        meta: Meta::new("gpf", file.meta.seed, config),
        channel: file.channel,
        qubits: state.labels().to_vec(),
        input_qubit: graph.input(),
        output_qubit: output,
        search: SearchSummary {
            method: "gpf".into(),
            max_weight: found.iter().map(|p| p.weight()).max().unwrap_or(0),
            count: found.len(),
            pair_count: 0,
            xz_pair_count: 0,
        },
        patterns: found,
    };
    emit_json(a.out.as_deref(), &out)
}

fn loss_config(a: &LossArgs, source: PatternSource) -> CliResult<LossSimConfig> {
    let config = LossSimConfig {
        loss_grid: parse_grid(&a.loss)?,
        trials: a.trials,
        seed: a.seed,
        mode: match a.mode {
            ModeArg::Heralded => LossMode::Heralded,
            ModeArg::Unheralded => LossMode::Unheralded,
        },
        strategy: match a.strategy {
            StrategyArg::MaxTolerance => Strategy::MaxTolerance,
            StrategyArg::MostCommon => Strategy::MostCommon,
        },
        keep_omitting: a.keep_omitting,
        source,
    };
    config.validate()?;
    Ok(config)
}

fn source_of(channel: &ChannelDescription) -> PatternSource {
    PatternSource {
        channel_kind: channel.kind.clone(),
        dims: channel.spec.dims_string(),
        layout_version: channel.layout_version,
    }
}

fn simulate_cmd(a: SimulateArgs) -> CliResult<()> {
    let file: PatternFile = read_json(&a.patterns)?;
    let config = loss_config(&a.loss, source_of(&file.channel))?;
    let lossy = lossy_qubits(file.qubits.len(), file.input_qubit, file.output_qubit);
    let result = simulate(&file.patterns, &lossy, &config)?;
    let echo = json!({ "patterns": a.patterns, "method": file.search.method, "sim": config });
    let mut text = Meta::new("simulate", config.seed, echo).csv_comment();
    text.push_str(&result.to_csv());
    emit(a.out.as_deref(), &text)
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let sizes = parse_list(&a.sizes, "sizes")?;
    if sizes.len() < 2 {
        return Err(CliError::Usage("a sweep needs at least two sizes".into()));
    }
    let base = loss_config(&a.loss, PatternSource::default())?;
    let scan = threshold_scan(&a.kind, &sizes, a.extra_weight, &base)?;
    let echo = json!({ "kind": a.kind, "sizes": sizes, "extra_weight": a.extra_weight, "sim": base });
    let meta = Meta::new("sweep", base.seed, echo);

    let mut csv = meta.csv_comment();
    csv.push_str(SimResult::csv_header());
    csv.push('\n');
    for curve in &scan.curves {
        curve.write_rows(&mut csv);
    }
    let report = json!({
        "meta": meta,
        "kind": scan.kind,
        "sizes": scan.sizes,
        "extra_weight": scan.extra_weight,
        "crossings": scan.crossings,
        "single_crossing": scan.single_crossing,
    });
    let report_text = format!("{}\n", serde_json::to_string_pretty(&report).expect("report serialises"));
    match (&a.out, &a.report) {
        (None, None) => emit(None, &report_text),
        (out, report) => {
            if let Some(path) = out {
                emit(Some(path), &csv)?;
            }
            if let Some(path) = report {
                emit(Some(path), &report_text)?;
            }
            Ok(())
        }
    }
}

fn verify(a: VerifyArgs) -> CliResult<()> {
    let (file, state) = load_state(&a.state)?;
    let patterns: PatternFile = read_json(&a.patterns)?;
    if patterns.qubits != state.labels() {
        return Err(CliError::Usage(format!(
            "{} was not derived from {}: qubit labels differ",
            a.patterns.display(),
            a.state.display()
        )));
    }
    let inputs = InputState::default_set(a.seed);
    let mut results = Vec::with_capacity(patterns.patterns.len());
    for (i, p) in patterns.patterns.iter().enumerate() {
        let cert = certify_pattern(&state, p, &inputs)?;
        results.push(json!({ "index": i, "weight": p.weight(), "certification": cert }));
    }
    let failed = results.iter().filter(|r| r["certification"]["certified"] != Value::Bool(true)).count();
    let total = results.len();
    let config = json!({ "state": a.state, "patterns": a.patterns, "input_seed": a.seed });
    let report = json!({
        "meta": Meta::new("verify", file.meta.seed, config),
        "total": total,
        "certified": total - failed,
        "all_certified": failed == 0,
        "results": results,
    });
    emit_json(a.out.as_deref(), &report)?;
    if failed > 0 {
        return Err(CliError::Uncertified { failed, total });
    }
    Ok(())
}

fn tolerance(a: ToleranceArgs) -> CliResult<()> {
    let file: PatternFile = read_json(&a.patterns)?;
    let candidates: BitSet =
        (0..file.qubits.len()).filter(|&q| q != file.input_qubit && q != file.output_qubit).collect();
    let tol = tolerable_loss_configurations(&file.patterns, &candidates);
    let maximal: Vec<Vec<&str>> =
        tol.maximal.iter().map(|m| m.iter().map(|q| file.qubits[q].as_str()).collect()).collect();
    let config = json!({ "patterns": a.patterns, "method": file.search.method });
    let report = json!({
        "meta": Meta::new("tolerance", file.meta.seed, config),
        "total": tol.total,
        "max_size": tol.max_size,
        "counts": tol.counts,
        "maximal": maximal,
    });
    emit_json(a.out.as_deref(), &report)
}

fn node_range(text: &str) -> CliResult<Vec<usize>> {
    let body = text.strip_prefix("n=").unwrap_or(text);
    let bad = || CliError::Usage(format!("--random-graphs expects `n=A..B`, got `{text}`"));
    let (lo, hi) = body.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo < 3 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

/// Edge counts for `n` nodes; `auto` gives n-1, 3n/2 and 2n.
fn edge_counts(text: &str, n: usize) -> CliResult<Vec<usize>> {
    let max = n * (n - 1) / 2 - 1;
    let mut ms = if text == "auto" { vec![n - 1, 3 * n / 2, 2 * n] } else { parse_list(text, "edge counts")? };
    ms.retain(|&m| m >= n - 1 && m <= max);
    ms.dedup();
    Ok(ms)
}

fn bench(a: BenchArgs) -> CliResult<()> {
    let nodes = node_range(&a.random_graphs)?;
    let echo = json!({
        "random_graphs": a.random_graphs,
        "edges": a.edges,
        "trials": a.trials,
        "extra_weight": a.extra_weight,
    });
    let mut csv = Meta::new("bench", a.seed, echo).csv_comment();
    csv.push_str("nodes,edges,trial,graph_seed,build_ms,pattern_ms,nontrivial,min_weight,patterns\n");
    for &n in &nodes {
        for m in edge_counts(&a.edges, n)? {
            for trial in 0..a.trials {
                let graph_seed = a.seed ^ ((n as u64) << 48 | (m as u64) << 32 | trial);
                let t = Instant::now();
                let ch = build_channel(&ChannelSpec::RandomGnm { nodes: n, edges: m, seed: graph_seed })?;
                let build_ms = t.elapsed().as_secs_f64() * 1e3;
                let t = Instant::now();
                let search = find_patterns_auto(&ch.state, ch.output(), a.extra_weight)?;
                let pattern_ms = t.elapsed().as_secs_f64() * 1e3;
                let min_weight = search.patterns.first().map(|p| p.weight().to_string()).unwrap_or_default();
                let _ = writeln!(
                    csv,
                    "{n},{m},{trial},{graph_seed},{build_ms:.3},{pattern_ms:.3},{},{min_weight},{}",
                    ch.state.nt_stabs().len(),
                    search.patterns.len()
                );
            }
        }
    }
    emit(a.out.as_deref(), &csv)
}
