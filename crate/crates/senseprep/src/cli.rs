//! Subcommands. Each one reads its inputs, runs one pipeline stage, writes
//! its files into the output directory and returns a one-line summary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use senseprep_core::anomaly::tqbayes_detect;
use senseprep_core::bayesnet::{learn_static, learn_transition, penalized_score, score, Lag};
use senseprep_core::ingest::{discretize, fit_discretization, inject_errors, synth_generate, SensorDataset, StateMatrix, SynthProfile};
use senseprep_core::metrics::{mean_rmse, precision_recall, rmse, PrecisionRecall};
use senseprep_core::redundancy::{recover_static, rsdrda_schedule, ssdrda, RealtimeReport, ScheduleConfig, StaticReport};
use senseprep_core::spectra::PcaModel;
use senseprep_core::Matrix;

use crate::artifacts::{
    load_json, save_json, DiscretizationDoc, Manifest, PcaDoc, StaticNetworkDoc, TransitionNetworkDoc, DISCRETIZATION_FILE,
    MANIFEST_FILE, PCA_FILE, STATIC_FILE, TRANSITION_FILE,
};
use crate::config::RunConfig;
use crate::io::{load_csv, write_csv, write_file};
use crate::reports::{
    realtime_cells, realtime_csv, recovery_csv, static_cells, static_csv, DetectionDoc, Truth, DETECTION_CSV, DETECTION_JSON,
    METRICS_JSON, REALTIME_CSV, REALTIME_JSON, REALTIME_RECOVERY_CSV, STATIC_CSV, STATIC_JSON, STATIC_RECOVERY_CSV, TRUTH_JSON,
};
use crate::{check_schema, Error};

#[derive(Debug, Parser)]
#[command(name = "senseprep", version, about = "Sensor data anomaly detection and redundancy scheduling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset: data.csv, train.csv, test.csv.
    Synth(Args),
    /// Fit the PCA model, discretization and both networks.
    Learn(Args),
    /// Screen test rows and localize abnormal nodes.
    Detect(Args),
    /// Add scaled training means to selected test rows, with a truth sidecar.
    Inject(Args),
    /// Static redundant-node detection and recovery.
    RedundancyStatic(Args),
    /// Slice-by-slice sleep scheduling and recovery.
    RedundancyRealtime(Args),
    /// Precision/recall against the truth sidecar, RMSE of recovered readings.
    Evaluate(Args),
}

/// Flags shared by all subcommands; each overrides the config key of the
/// same name.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Args {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $SENSEPREP_OUT, then `.`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Training CSV; repeat for several sequences.
    #[arg(long)]
    pub train: Vec<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Full-length series for real-time scheduling.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Truth sidecar for `evaluate` (default: <out>/truth.json).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub train_rows: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub alpha_warning: Option<f64>,
    #[arg(long)]
    pub alpha_alarm: Option<f64>,
    #[arg(long)]
    pub contribution_ratio: Option<f64>,
    #[arg(long)]
    pub k_states: Option<usize>,
    #[arg(long)]
    pub max_parents: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub slice_len: Option<usize>,
    #[arg(long)]
    pub train_frac: Option<f64>,
    /// Comma-separated test rows to corrupt.
    #[arg(long, value_delimiter = ',')]
    pub error_rows: Option<Vec<usize>>,
    #[arg(long)]
    pub error_count: Option<usize>,
    #[arg(long)]
    pub error_pct: Option<f64>,
}

impl Args {
    /// Defaults, then the config file, then flags; validated.
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    cfg.$field = self.$field.clone();
                }
            )*};
        }
        set!(profile, seed, nodes, rows, train_rows, alpha_warning, alpha_alarm, contribution_ratio);
        set!(k_states, max_parents, tau, slice_len, train_frac, error_count, error_pct);
        set_opt!(test, data, noise, error_rows);
        if !self.train.is_empty() {
            cfg.train = self.train.clone();
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one command and returns its stdout summary.
pub fn run(cli: &Cli) -> Result<Value, Error> {
    let (args, f): (&Args, fn(&RunConfig, &Args) -> Result<Value, Error>) = match &cli.command {
        Command::Synth(a) => (a, cmd_synth),
        Command::Learn(a) => (a, cmd_learn),
        Command::Detect(a) => (a, cmd_detect),
        Command::Inject(a) => (a, cmd_inject),
        Command::RedundancyStatic(a) => (a, cmd_redundancy_static),
        Command::RedundancyRealtime(a) => (a, cmd_redundancy_realtime),
        Command::Evaluate(a) => (a, cmd_evaluate),
    };
    let cfg = args.resolve()?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    f(&cfg, args)
}

fn synthesize(cfg: &RunConfig) -> Result<SensorDataset, Error> {
    let mut profile = SynthProfile::from_name(&cfg.profile)?;
    if let Some(noise) = cfg.noise {
        profile = profile.with_noise(noise);
    }
    Ok(synth_generate(cfg.seed, cfg.rows, cfg.nodes, &profile)?)
}

fn synth_split(cfg: &RunConfig) -> Result<(SensorDataset, SensorDataset), Error> {
    if cfg.train_rows + 2 > cfg.rows || cfg.train_rows < 2 {
        return Err(Error::Config(format!(
            "train_rows ({}) must leave at least two rows on each side of {} rows",
            cfg.train_rows, cfg.rows
        )));
    }
    let data = synthesize(cfg)?;
    Ok((data.slice_rows(0, cfg.train_rows)?, data.slice_rows(cfg.train_rows, cfg.rows)?))
}

/// Training sequences: the configured CSV files, else the synthetic split.
fn training_sequences(cfg: &RunConfig) -> Result<Vec<SensorDataset>, Error> {
    if cfg.train.is_empty() {
        return Ok(vec![synth_split(cfg)?.0]);
    }
    let seqs = cfg.train.iter().map(|p| load_csv(p)).collect::<Result<Vec<_>, _>>()?;
    for s in &seqs[1..] {
        check_schema(seqs[0].node_ids(), s.node_ids())?;
    }
    Ok(seqs)
}

/// Rows of all sequences stacked, for fits that ignore time order.
fn stack(seqs: &[SensorDataset]) -> Result<SensorDataset, Error> {
    if let [one] = seqs {
        return Ok(one.clone());
    }
    let rows: Vec<&[f64]> = seqs.iter().flat_map(|s| (0..s.rows()).map(move |i| s.row(i))).collect();
    Ok(SensorDataset::new(Matrix::from_rows(&rows)?, seqs[0].node_ids().to_vec(), None)?)
}

fn test_data(cfg: &RunConfig) -> Result<SensorDataset, Error> {
    match &cfg.test {
        Some(p) => load_csv(p),
        None => Ok(synth_split(cfg)?.1),
    }
}

fn series_data(cfg: &RunConfig) -> Result<SensorDataset, Error> {
    match &cfg.data {
        Some(p) => load_csv(p),
        None => synthesize(cfg),
    }
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir().join(name)
}

fn cmd_synth(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let data = synthesize(cfg)?;
    let (train, test) = synth_split(cfg)?;
    write_csv(&out(cfg, "data.csv"), &data)?;
    write_csv(&out(cfg, "train.csv"), &train)?;
    write_csv(&out(cfg, "test.csv"), &test)?;
    Ok(json!({
        "profile": cfg.profile,
        "seed": cfg.seed,
        "rows": data.rows(),
        "nodes": data.nodes(),
        "train_rows": train.rows(),
        "test_rows": test.rows(),
    }))
}

fn cmd_learn(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let seqs = training_sequences(cfg)?;
    let all = stack(&seqs)?;
    let ids = all.node_ids().to_vec();
    let pca = PcaModel::fit(&all, cfg.contribution_ratio, cfg.alpha_warning)?;
    let scheme = fit_discretization(&all, cfg.k_states)?;
    let states: Vec<StateMatrix> = seqs.iter().map(|s| discretize(s, &scheme)).collect::<Result<_, _>>()?;
    let net = learn_static(&states, cfg.max_parents)?;
    let log_likelihood = score(&states, net.dag(), Lag::Same)?;
    let penalized = penalized_score(&states, net.dag(), Lag::Same)?;
    let tn = learn_transition(&states, cfg.max_parents)?;
    let last = seqs.last().map(|s| s.row(s.rows() - 1).to_vec()).unwrap_or_default();

    save_json(&out(cfg, PCA_FILE), &PcaDoc::new(&pca, &ids))?;
    save_json(&out(cfg, DISCRETIZATION_FILE), &DiscretizationDoc::new(&scheme, &ids))?;
    save_json(&out(cfg, STATIC_FILE), &StaticNetworkDoc::new(&net, &ids, log_likelihood, penalized))?;
    save_json(&out(cfg, TRANSITION_FILE), &TransitionNetworkDoc::new(&tn, &ids))?;
    save_json(
        &out(cfg, MANIFEST_FILE),
        &Manifest {
            node_ids: ids,
            training_rows: all.rows(),
            last_training_row: last,
            contribution_ratio: cfg.contribution_ratio,
            alpha_warning: cfg.alpha_warning,
            alpha_alarm: cfg.alpha_alarm,
            states: cfg.k_states,
            max_parents: cfg.max_parents,
        },
    )?;
    Ok(json!({
        "k": pca.k(),
        "nodes": pca.nodes(),
        "training_rows": all.rows(),
        "sequences": seqs.len(),
        "static_edges": net.dag().edge_count(),
        "transition_edges": tn.dag().edge_count(),
        "penalized_score": penalized,
    }))
}

fn load_manifest(cfg: &RunConfig) -> Result<Manifest, Error> {
    load_json(&out(cfg, MANIFEST_FILE))
}

fn cmd_detect(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let manifest = load_manifest(cfg)?;
    let pca_doc: PcaDoc = load_json(&out(cfg, PCA_FILE))?;
    let tn_doc: TransitionNetworkDoc = load_json(&out(cfg, TRANSITION_FILE))?;
    let disc_doc: DiscretizationDoc = load_json(&out(cfg, DISCRETIZATION_FILE))?;
    for ids in [&pca_doc.node_ids, &tn_doc.node_ids, &disc_doc.node_ids] {
        check_schema(&manifest.node_ids, ids)?;
    }
    let test = test_data(cfg)?;
    check_schema(&manifest.node_ids, test.node_ids())?;

    let model = pca_doc.model()?.with_alpha(cfg.alpha_warning)?;
    let tn = tn_doc.network()?;
    let scheme = disc_doc.scheme()?;
    let report = tqbayes_detect(&test, &manifest.last_training_row, &model, &tn, &scheme)?;
    let (aq, at) = model.limits_at(cfg.alpha_alarm)?;
    let alarms: Vec<bool> = report.rows.iter().map(|r| r.q > aq || r.t2 > at).collect();
    let doc = DetectionDoc::new(&manifest.node_ids, &report, (cfg.alpha_warning, cfg.alpha_alarm), (aq, at), &alarms);

    save_json(&out(cfg, DETECTION_JSON), &doc)?;
    write_file(&out(cfg, DETECTION_CSV), &doc.to_csv()?)?;
    Ok(json!({
        "rows": doc.rows.len(),
        "flagged": doc.flagged_rows().count(),
        "alarms": alarms.iter().filter(|a| **a).count(),
        "abnormal_cells": doc.abnormal_cells().count(),
    }))
}

fn cmd_inject(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let train = stack(&training_sequences(cfg)?)?;
    let test = test_data(cfg)?;
    check_schema(train.node_ids(), test.node_ids())?;
    let m = train.rows() as f64;
    let means: Vec<f64> = (0..train.nodes()).map(|j| train.column(j).iter().sum::<f64>() / m).collect();
    let rows: Vec<usize> = match &cfg.error_rows {
        Some(rows) => rows.iter().copied().collect::<BTreeSet<_>>().into_iter().collect(),
        None => {
            let count = cfg.error_count.min(test.rows());
            (test.rows() - count..test.rows()).collect()
        }
    };
    let corrupted = inject_errors(&test, &rows, cfg.error_pct, &means)?;
    write_csv(&out(cfg, "corrupted.csv"), &corrupted)?;
    save_json(
        &out(cfg, TRUTH_JSON),
        &Truth {
            node_ids: test.node_ids().to_vec(),
            rows: rows.clone(),
            test_rows: test.rows(),
            error_pct: cfg.error_pct,
            deltas: means.iter().map(|a| a * cfg.error_pct).collect(),
        },
    )?;
    Ok(json!({ "corrupted_rows": rows.len(), "test_rows": test.rows(), "error_pct": cfg.error_pct }))
}

#[derive(Serialize)]
struct StaticDoc<'a> {
    node_ids: &'a [String],
    #[serde(flatten)]
    report: &'a StaticReport,
}

fn cmd_redundancy_static(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let doc: StaticNetworkDoc = load_json(&out(cfg, STATIC_FILE))?;
    let net = doc.network()?;
    let report = ssdrda(&net, cfg.tau)?;
    let data = test_data(cfg)?;
    check_schema(&doc.node_ids, data.node_ids())?;
    let cells = recover_static(&data, &net, &report)?;

    save_json(&out(cfg, STATIC_JSON), &StaticDoc { node_ids: &doc.node_ids, report: &report })?;
    write_file(&out(cfg, STATIC_CSV), &static_csv(&report)?)?;
    write_file(&out(cfg, STATIC_RECOVERY_CSV), &recovery_csv(static_cells(&cells))?)?;
    let redundant: Vec<&str> = report.redundant_nodes().map(|i| doc.node_ids[i].as_str()).collect();
    Ok(json!({ "tau": cfg.tau, "redundant": redundant, "recovered_cells": cells.len() }))
}

#[derive(Serialize)]
struct RealtimeDoc<'a> {
    node_ids: &'a [String],
    slice_len: usize,
    train_frac: f64,
    /// Bin edges fitted on the first slice's training window.
    edges: Vec<Vec<f64>>,
    #[serde(flatten)]
    report: &'a RealtimeReport,
}

fn cmd_redundancy_realtime(cfg: &RunConfig, _: &Args) -> Result<Value, Error> {
    let data = series_data(cfg)?;
    let sched = ScheduleConfig {
        slice_len: cfg.slice_len,
        train_frac: cfg.train_frac,
        tau: cfg.tau,
        max_parents: cfg.max_parents,
    };
    let window = sched.train_len().min(data.rows());
    let scheme = fit_discretization(&data.slice_rows(0, window)?, cfg.k_states)?;
    let report = rsdrda_schedule(&data, &scheme, &sched)?;

    let doc = RealtimeDoc {
        node_ids: data.node_ids(),
        slice_len: cfg.slice_len,
        train_frac: cfg.train_frac,
        edges: (0..scheme.nodes()).map(|j| scheme.edges(j).to_vec()).collect(),
        report: &report,
    };
    save_json(&out(cfg, REALTIME_JSON), &doc)?;
    write_file(&out(cfg, REALTIME_CSV), &realtime_csv(&report)?)?;
    write_file(&out(cfg, REALTIME_RECOVERY_CSV), &recovery_csv(realtime_cells(&report))?)?;
    Ok(json!({
        "slices": report.slices.len(),
        "steps": report.steps.len(),
        "sleeping": report.sleeping().count(),
    }))
}

fn pr_json(pr: &PrecisionRecall) -> Value {
    json!({
        "precision": pr.precision,
        "recall": pr.recall,
        "tp": pr.counts.tp,
        "fp": pr.counts.fp,
        "fn": pr.counts.fn_,
        "tn": pr.counts.tn,
    })
}

/// Per-node RMSE over recovered (sleeping) readings, plus their mean.
pub fn recovery_rmse(report: &RealtimeReport, node_ids: &[String]) -> Result<Value, Error> {
    let mut per_node = Vec::new();
    let mut values = Vec::new();
    for (node, id) in node_ids.iter().enumerate() {
        let (actual, est): (Vec<f64>, Vec<f64>) = report
            .steps
            .iter()
            .filter(|s| s.node == node)
            .filter_map(|s| s.estimate.map(|e| (s.actual, e)))
            .unzip();
        if actual.is_empty() {
            continue;
        }
        let r = rmse(&actual, &est)?;
        values.push(r);
        per_node.push(json!({ "node": node, "id": id, "cells": actual.len(), "rmse": r }));
    }
    let mean = if values.is_empty() { None } else { Some(mean_rmse(&values)?) };
    Ok(json!({ "per_node": per_node, "mean_rmse": mean }))
}

fn cmd_evaluate(cfg: &RunConfig, args: &Args) -> Result<Value, Error> {
    let truth_path = args.truth.clone().unwrap_or_else(|| out(cfg, TRUTH_JSON));
    let truth: Truth = load_json(&truth_path)?;
    let det: DetectionDoc = load_json(&out(cfg, DETECTION_JSON))?;
    check_schema(&truth.node_ids, &det.node_ids)?;
    if det.rows.len() != truth.test_rows {
        return Err(Error::Format(format!(
            "detection covers {} rows, truth describes {}",
            det.rows.len(),
            truth.test_rows
        )));
    }
    let n = truth.node_ids.len();
    let universe: BTreeSet<usize> = (0..truth.test_rows).collect();
    let truth_rows: BTreeSet<usize> = truth.rows.iter().copied().collect();
    let flagged: BTreeSet<usize> = det.flagged_rows().collect();
    let localized: BTreeSet<usize> = det.localized_rows().collect();
    let alarms: BTreeSet<usize> = det.rows.iter().filter(|r| r.alarm).map(|r| r.row).collect();

    let cells = |rows: &BTreeSet<usize>| -> BTreeSet<(usize, usize)> {
        rows.iter().flat_map(|&r| (0..n).map(move |j| (r, j))).collect()
    };
    let cell_universe = cells(&universe);
    let truth_cells = cells(&truth_rows);
    let abnormal: BTreeSet<(usize, usize)> = det.abnormal_cells().collect();

    let mut metrics = json!({
        "empty_denominator": "1.0 when the truth set is empty, else 0.0",
        "truth_rows": truth_rows.len(),
        "test_rows": truth.test_rows,
        "rows": {
            "tq": pr_json(&precision_recall(&truth_rows, &flagged, &universe)?),
            "tq_alarm": pr_json(&precision_recall(&truth_rows, &alarms, &universe)?),
            "tqbayes": pr_json(&precision_recall(&truth_rows, &localized, &universe)?),
        },
        "cells": {
            "tq": pr_json(&precision_recall(&truth_cells, &cells(&flagged), &cell_universe)?),
            "tqbayes": pr_json(&precision_recall(&truth_cells, &abnormal, &cell_universe)?),
        },
        "recovery": Value::Null,
    });
    let realtime = out(cfg, REALTIME_JSON);
    if realtime.exists() {
        let report: RealtimeReport = load_json(&realtime)?;
        let ids: Vec<String> = load_ids(&realtime)?;
        metrics["recovery"] = recovery_rmse(&report, &ids)?;
    }
    save_json(&out(cfg, METRICS_JSON), &metrics)?;
    Ok(metrics)
}

fn load_ids(path: &Path) -> Result<Vec<String>, Error> {
    #[derive(serde::Deserialize)]
    struct Ids {
        node_ids: Vec<String>,
    }
    Ok(load_json::<Ids>(path)?.node_ids)
}
