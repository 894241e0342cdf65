use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use ttnc_core::mps::{fidelity, random_mps_with};
use ttnc_core::stats::{linear_fit, log2_fit, mean};
use ttnc_core::transpiler::{
    rewrite_basis, transpile_with_layout, Basis, Topology, TranspileReport,
};
use ttnc_core::ttn::{predict_max_gate_qubits, renormalize, ttn_to_circuit};

use crate::config::{derive_seed, BenchConfig, Mode, MAX_FIDELITY_SITES};
use crate::csv::{num, CsvWriter};
use crate::error::{CliError, CliResult};

pub const FIDELITY_HEADER: [&str; 5] = ["n", "chi", "seed", "fidelity", "discarded_weight"];
pub const DEPTH_HEADER: [&str; 7] = [
    "n",
    "chi",
    "topology",
    "mode",
    "two_qubit_depth",
    "total_depth",
    "swap_count",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityRow {
    pub n: usize,
    pub chi: usize,
    pub seed: u64,
    pub fidelity: f64,
    pub discarded_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRow {
    pub n: usize,
    pub chi: usize,
    pub topology: Topology,
    pub mode: Mode,
    pub sample: usize,
    pub report: TranspileReport,
    pub max_gate_qubits: usize,
}

fn tasks(cfg: &BenchConfig) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        for &chi in &cfg.chis {
            for s in 0..cfg.samples_per_n {
                out.push((n, chi, s));
            }
        }
    }
    out
}

fn sample_seed(cfg: &BenchConfig, n: usize, chi: usize, s: usize) -> u64 {
    derive_seed(cfg.seed, &[n as u64, chi as u64, s as u64])
}

/// Compiles one random MPS and measures the fidelity of the prepared state.
pub fn fidelity_sample(
    n: usize,
    chi: usize,
    seed: u64,
    cfg: &BenchConfig,
) -> CliResult<FidelityRow> {
    let m = random_mps_with(n, chi, seed, cfg.ensemble)?;
    let t = renormalize(&m, cfg.max_bond)?;
    let mut got = t.to_statevector()?;
    got.normalize();
    Ok(FidelityRow {
        n,
        chi,
        seed,
        fidelity: fidelity(&got, &m.to_statevector()?)?,
        discarded_weight: t.total_discarded_weight(),
    })
}

pub fn run_fidelity(cfg: &BenchConfig) -> CliResult<Vec<FidelityRow>> {
    cfg.validate()?;
    if let Some(&n) = cfg.n_range.iter().find(|&&n| n > MAX_FIDELITY_SITES) {
        return Err(CliError::Capacity(format!(
            "fidelity benchmarks are limited to n <= {MAX_FIDELITY_SITES}, got {n}"
        )));
    }
    let mut rows: Vec<FidelityRow> = tasks(cfg)
        .into_par_iter()
        .map(|(n, chi, s)| fidelity_sample(n, chi, sample_seed(cfg, n, chi, s), cfg))
        .collect::<CliResult<_>>()?;
    rows.sort_by_key(|r| (r.n, r.chi));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelitySummary {
    pub n: usize,
    pub chi: usize,
    pub mean_fidelity: f64,
    pub mean_discarded_weight: f64,
}

pub fn fidelity_summary(rows: &[FidelityRow]) -> Vec<FidelitySummary> {
    let mut groups: BTreeMap<(usize, usize), Vec<&FidelityRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, r.chi)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, chi), g)| FidelitySummary {
            n,
            chi,
            mean_fidelity: mean(&g.iter().map(|r| r.fidelity).collect::<Vec<_>>()),
            mean_discarded_weight: mean(&g.iter().map(|r| r.discarded_weight).collect::<Vec<_>>()),
        })
        .collect()
}

/// Per-chi linear fit of mean fidelity against `n`. Series with fewer than
/// two distinct `n` are skipped.
pub fn fidelity_fits(summary: &[FidelitySummary]) -> Vec<(usize, ttnc_core::stats::LinearFit)> {
    let mut by_chi: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for s in summary {
        let e = by_chi.entry(s.chi).or_default();
        e.0.push(s.n as f64);
        e.1.push(s.mean_fidelity);
    }
    by_chi
        .into_iter()
        .filter_map(|(chi, (x, y))| linear_fit(&x, &y).ok().map(|f| (chi, f)))
        .collect()
}

pub fn fidelity_csv(cfg: &BenchConfig, rows: &[FidelityRow]) -> String {
    let mut w = CsvWriter::new(&cfg.to_json(), &FIDELITY_HEADER);
    for r in rows {
        w.row(&[
            r.n.to_string(),
            r.chi.to_string(),
            r.seed.to_string(),
            num(r.fidelity),
            num(r.discarded_weight),
        ]);
    }
    let summary = fidelity_summary(rows);
    w.comment(&["mean,n,chi,mean_fidelity,mean_discarded_weight".into()]);
    for s in &summary {
        w.comment(&[
            "mean".into(),
            s.n.to_string(),
            s.chi.to_string(),
            num(s.mean_fidelity),
            num(s.mean_discarded_weight),
        ]);
    }
    w.comment(&["fit,chi,slope,intercept,r_squared".into()]);
    for (chi, f) in fidelity_fits(&summary) {
        w.comment(&[
            "fit".into(),
            chi.to_string(),
            num(f.slope),
            num(f.intercept),
            num(f.r_squared),
        ]);
    }
    w.finish()
}

/// Compiles, transpiles for `topology`, and rewrites into its native basis.
pub fn depth_sample(
    n: usize,
    chi: usize,
    topology: Topology,
    sample: usize,
    cfg: &BenchConfig,
) -> CliResult<DepthRow> {
    let m = random_mps_with(n, chi, sample_seed(cfg, n, chi, sample), cfg.ensemble)?;
    let t = renormalize(&m, cfg.max_bond)?;
    let c = ttn_to_circuit(&t)?;
    let t = transpile_with_layout(&c, &topology.graph(n), None)?;
    let mut report = t.report;
    let native = rewrite_basis(&t.circuit, Basis::for_topology(topology))?;
    report.total_depth = native.depth(true);
    Ok(DepthRow {
        n,
        chi,
        topology,
        mode: cfg.mode(),
        sample,
        report,
        max_gate_qubits: c.max_gate_qubits(),
    })
}

pub fn run_depth(cfg: &BenchConfig) -> CliResult<Vec<DepthRow>> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for (n, chi, s) in tasks(cfg) {
        for &topo in &cfg.topologies {
            jobs.push((n, chi, topo, s));
        }
    }
    let mut rows: Vec<DepthRow> = jobs
        .into_par_iter()
        .map(|(n, chi, topo, s)| depth_sample(n, chi, topo, s, cfg))
        .collect::<CliResult<_>>()?;
    rows.sort_by_key(|r| (r.n, r.chi, r.topology, r.sample));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthFit {
    pub chi: usize,
    pub topology: Topology,
    pub mode: Mode,
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub mean_two_qubit_depth: f64,
}

/// Series means per `(chi, topology)` and a fit `a log2 n + b` of the mean
/// two-qubit depth.
pub fn depth_fits(rows: &[DepthRow]) -> Vec<DepthFit> {
    let mut series: BTreeMap<(usize, Topology, Mode), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        series
            .entry((r.chi, r.topology, r.mode))
            .or_default()
            .entry(r.n)
            .or_default()
            .push(r.report.two_qubit_depth as f64);
    }
    series
        .into_iter()
        .filter_map(|((chi, topology, mode), by_n)| {
            let xs: Vec<f64> = by_n.keys().map(|&n| n as f64).collect();
            let ys: Vec<f64> = by_n.values().map(|v| mean(v)).collect();
            let f = log2_fit(&xs, &ys).ok()?;
            Some(DepthFit {
                chi,
                topology,
                mode,
                a: f.slope,
                b: f.intercept,
                r_squared: f.r_squared,
                mean_two_qubit_depth: mean(&ys),
            })
        })
        .collect()
}

pub fn depth_csv(cfg: &BenchConfig, rows: &[DepthRow]) -> CliResult<String> {
    let mut w = CsvWriter::new(&cfg.to_json(), &DEPTH_HEADER);
    for r in rows {
        w.row(&[
            r.n.to_string(),
            r.chi.to_string(),
            r.topology.to_string(),
            r.mode.name().into(),
            r.report.two_qubit_depth.to_string(),
            r.report.total_depth.to_string(),
            r.report.swap_count.to_string(),
        ]);
    }
    w.comment(&["fit,chi,topology,mode,a,b,r_squared,mean_two_qubit_depth".into()]);
    for f in depth_fits(rows) {
        w.comment(&[
            "fit".into(),
            f.chi.to_string(),
            f.topology.to_string(),
            f.mode.name().into(),
            num(f.a),
            num(f.b),
            num(f.r_squared),
            num(f.mean_two_qubit_depth),
        ]);
    }
    if cfg.mode() == Mode::Exact {
        w.comment(&["gate_size,n,chi,max_gate_qubits,predicted".into()]);
        let mut seen = BTreeMap::new();
        for r in rows {
            seen.entry((r.n, r.chi)).or_insert(0usize);
            let e = seen.get_mut(&(r.n, r.chi)).expect("inserted");
            *e = (*e).max(r.max_gate_qubits);
        }
        for ((n, chi), got) in seen {
            let predicted = predict_max_gate_qubits(n, chi)?.max_gate_qubits;
            w.comment(&[
                "gate_size".into(),
                n.to_string(),
                chi.to_string(),
                got.to_string(),
                predicted.to_string(),
            ]);
        }
    }
    Ok(w.finish())
}
