use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ttnc_core::mps::Ensemble;
use ttnc_core::tensor::is_power_of_two;
use ttnc_core::transpiler::Topology;

use crate::error::{CliError, CliResult};

/// Largest `n` for which fidelities are simulated.
pub const MAX_FIDELITY_SITES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_range: Vec<usize>,
    pub chis: Vec<usize>,
    pub max_bond: Option<usize>,
    pub samples_per_n: usize,
    pub seed: u64,
    pub topologies: Vec<Topology>,
    pub output_dir: PathBuf,
    pub ensemble: Ensemble,
}

impl BenchConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n_range.is_empty() || self.chis.is_empty() || self.topologies.is_empty() {
            return Err(CliError::Usage(
                "n range, chis and topologies must be non-empty".into(),
            ));
        }
        if self.samples_per_n == 0 {
            return Err(CliError::Usage("samples per n must be at least 1".into()));
        }
        if let Some(&n) = self.n_range.iter().find(|&&n| n < 2) {
            return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
        }
        if let Some(&c) = self.chis.iter().find(|&&c| !is_power_of_two(c) || c < 2) {
            return Err(CliError::Usage(format!(
                "chi must be a power of two >= 2, got {c}"
            )));
        }
        if let Some(b) = self.max_bond.filter(|&b| !is_power_of_two(b)) {
            return Err(CliError::Usage(format!(
                "max bond must be a power of two, got {b}"
            )));
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        if self.max_bond.is_some() {
            Mode::Approx
        } else {
            Mode::Exact
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Approx,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        }
    }
}

/// Parses `6-20`, `8,16,32` or mixtures such as `4,6-8` (ranges inclusive).
pub fn parse_int_list(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("cannot parse integer list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_float_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| CliError::Usage(format!("cannot parse number `{p}`")))
        })
        .collect()
}

/// `none` or a power of two.
pub fn parse_max_bond(s: &str) -> CliResult<Option<usize>> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    let b: usize = s
        .parse()
        .map_err(|_| CliError::Usage(format!("bad max bond `{s}`")))?;
    if !is_power_of_two(b) {
        return Err(CliError::Usage(format!(
            "max bond must be a power of two, got {b}"
        )));
    }
    Ok(Some(b))
}

pub fn parse_topologies(s: &str) -> CliResult<Vec<Topology>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<Topology>().map_err(CliError::from))
        .collect()
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one sample, independent of scheduling order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ p))
}
