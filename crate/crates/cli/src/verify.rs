use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use ttnc_core::mps::{mcz_mpo, pauli_exp_mpo, Mpo, Statevector};
use ttnc_core::stats::{log_log_fit, rmse, LinearFit};
use ttnc_core::verifier::{
    apply_mpo, build_verifier, noise_sweep_with, overlap_exact, overlap_sampled, NoiseSweepRow,
    MAX_VERIFIER_SITES,
};

use crate::config::derive_seed;
use crate::csv::{num, CsvWriter};
use crate::error::{CliError, CliResult};

pub const OVERLAP_HEADER: [&str; 5] = ["case", "n", "exact", "verifier", "abs_err"];
pub const SHOT_HEADER: [&str; 4] = ["shots", "seed", "estimate", "exact"];
pub const NOISE_HEADER: [&str; 3] = ["delta", "metric", "expected"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Mcz,
    PauliExp,
}

impl FromStr for OperatorKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "mcz" => Ok(OperatorKind::Mcz),
            "pauli-exp" => Ok(OperatorKind::PauliExp),
            _ => Err(CliError::Usage(format!(
                "unknown operator `{s}` (expected mcz or pauli-exp)"
            ))),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Mcz => "mcz",
            OperatorKind::PauliExp => "pauli-exp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub n: usize,
    /// Pauli string for `pauli-exp`; defaults to `Z` on every site.
    pub pauli: Option<String>,
    pub theta: f64,
}

impl OperatorSpec {
    pub fn mcz(n: usize) -> Self {
        Self {
            kind: OperatorKind::Mcz,
            n,
            pauli: None,
            theta: 0.0,
        }
    }

    pub fn pauli_exp(pauli: &str, theta: f64) -> Self {
        Self {
            kind: OperatorKind::PauliExp,
            n: pauli.len(),
            pauli: Some(pauli.to_string()),
            theta,
        }
    }

    pub fn build(&self) -> CliResult<Mpo> {
        if self.n == 0 || self.n > MAX_VERIFIER_SITES {
            return Err(CliError::Capacity(format!(
                "verifier needs 1 <= n <= {MAX_VERIFIER_SITES}, got {}",
                self.n
            )));
        }
        Ok(match self.kind {
            OperatorKind::Mcz => mcz_mpo(self.n)?,
            OperatorKind::PauliExp => {
                let s = self.pauli.clone().unwrap_or_else(|| "Z".repeat(self.n));
                if s.len() != self.n {
                    return Err(CliError::Usage(format!(
                        "pauli string `{s}` does not have {} sites",
                        self.n
                    )));
                }
                pauli_exp_mpo(&s, self.theta)?
            }
        })
    }
}

/// `|<phi|U|psi>|^2` from the dense operator.
pub fn direct_overlap(u: &Mpo, psi: &Statevector, phi: &Statevector) -> CliResult<f64> {
    Ok(phi.inner(&apply_mpo(u, psi)?)?.norm_sqr())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapRow {
    pub case: usize,
    pub n: usize,
    pub exact: f64,
    pub verifier: f64,
    pub abs_err: f64,
}

/// Random `(psi, phi)` pairs compared against the dense oracle.
pub fn overlap_rows(op: &OperatorSpec, pairs: usize, seed: u64) -> CliResult<Vec<OverlapRow>> {
    let u = op.build()?;
    let v = build_verifier(&u, None)?;
    (0..pairs)
        .into_par_iter()
        .map(|case| {
            let psi = Statevector::random(op.n, derive_seed(seed, &[0, case as u64]))?;
            let phi = Statevector::random(op.n, derive_seed(seed, &[1, case as u64]))?;
            let exact = direct_overlap(&u, &psi, &phi)?;
            let verifier = overlap_exact(&v, &psi, &phi)?;
            Ok(OverlapRow {
                case,
                n: op.n,
                exact,
                verifier,
                abs_err: (exact - verifier).abs(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotRow {
    pub shots: usize,
    pub seed: u64,
    pub estimate: f64,
    pub exact: f64,
}

/// One fixed random pair; `seeds` independent estimates per shot count.
pub fn shot_rows(
    op: &OperatorSpec,
    shot_grid: &[usize],
    seeds: usize,
    seed: u64,
) -> CliResult<Vec<ShotRow>> {
    let u = op.build()?;
    let v = build_verifier(&u, None)?;
    let psi = Statevector::random(op.n, derive_seed(seed, &[0]))?;
    let phi = Statevector::random(op.n, derive_seed(seed, &[1]))?;
    let exact = overlap_exact(&v, &psi, &phi)?;
    let jobs: Vec<(usize, u64)> = shot_grid
        .iter()
        .flat_map(|&s| (0..seeds as u64).map(move |k| (s, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(shots, k)| {
            let est = overlap_sampled(
                &v,
                &psi,
                &phi,
                shots,
                derive_seed(seed, &[2, shots as u64, k]),
            )?;
            Ok(ShotRow {
                shots,
                seed: k,
                estimate: est,
                exact,
            })
        })
        .collect()
}

/// RMSE per shot count and the log-log slope across them.
pub fn shot_rmse(rows: &[ShotRow]) -> CliResult<(Vec<(usize, f64)>, LinearFit)> {
    let mut grid: Vec<usize> = rows.iter().map(|r| r.shots).collect();
    grid.dedup();
    let per: Vec<(usize, f64)> = grid
        .iter()
        .map(|&s| {
            let est: Vec<f64> = rows
                .iter()
                .filter(|r| r.shots == s)
                .map(|r| r.estimate)
                .collect();
            let truth = rows.iter().find(|r| r.shots == s).map_or(0.0, |r| r.exact);
            (s, rmse(&est, truth))
        })
        .collect();
    let xs: Vec<f64> = per.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = per.iter().map(|p| p.1).collect();
    Ok((per, log_log_fit(&xs, &ys)?))
}

pub fn noise_rows(
    op: &OperatorSpec,
    deltas: &[f64],
    seed: u64,
    orthogonalize: bool,
) -> CliResult<Vec<NoiseSweepRow>> {
    let u = op.build()?;
    let psi = Statevector::random(op.n, derive_seed(seed, &[0]))?;
    Ok(noise_sweep_with(
        &u,
        &psi,
        deltas,
        derive_seed(seed, &[1]),
        orthogonalize,
    )?)
}

pub fn overlap_csv(config_json: &str, rows: &[OverlapRow]) -> String {
    let mut w = CsvWriter::new(config_json, &OVERLAP_HEADER);
    for r in rows {
        w.row(&[
            r.case.to_string(),
            r.n.to_string(),
            num(r.exact),
            num(r.verifier),
            num(r.abs_err),
        ]);
    }
    let max = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    w.comment(&["max_abs_err,value".into()]);
    w.comment(&["max_abs_err".into(), num(max)]);
    w.finish()
}

pub fn shot_csv(config_json: &str, rows: &[ShotRow]) -> CliResult<String> {
    let mut w = CsvWriter::new(config_json, &SHOT_HEADER);
    for r in rows {
        w.row(&[
            r.shots.to_string(),
            r.seed.to_string(),
            num(r.estimate),
            num(r.exact),
        ]);
    }
    let (per, fit) = shot_rmse(rows)?;
    w.comment(&["rmse,shots,rmse".into()]);
    for (s, e) in per {
        w.comment(&["rmse".into(), s.to_string(), num(e)]);
    }
    w.comment(&["fit,loglog_slope,intercept,r_squared".into()]);
    w.comment(&[
        "fit".into(),
        num(fit.slope),
        num(fit.intercept),
        num(fit.r_squared),
    ]);
    Ok(w.finish())
}

pub fn noise_csv(config_json: &str, rows: &[NoiseSweepRow]) -> String {
    let mut w = CsvWriter::new(config_json, &NOISE_HEADER);
    for r in rows {
        w.row(&[num(r.delta), num(r.metric), num(r.expected)]);
    }
    w.finish()
}
