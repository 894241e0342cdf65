use std::path::Path;

use serde::Serialize;
use ttnc_core::mps::{fidelity, Mps, MAX_STATEVECTOR_QUBITS};
use ttnc_core::ttn::{renormalize, ttn_to_circuit};
use ttnc_core::Circuit;

use crate::config::MAX_FIDELITY_SITES;
use crate::csv::write_file;
use crate::error::{CliError, CliResult};

/// Printed as one JSON object by `ttnc compile`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompileReport {
    pub n_sites: usize,
    pub max_bond: Option<usize>,
    pub fidelity: Option<f64>,
    pub gate_count: usize,
    pub two_qubit_gate_count: usize,
    pub max_gate_qubits: usize,
    pub depth: usize,
    pub multi_qubit_depth: usize,
    pub discarded_weight: f64,
}

pub fn compile_mps(m: &Mps, max_bond: Option<usize>) -> CliResult<(Circuit, CompileReport)> {
    let t = renormalize(m, max_bond)?;
    let c = ttn_to_circuit(&t)?;
    let n = m.n_sites();
    let fidelity = if n <= MAX_FIDELITY_SITES.min(MAX_STATEVECTOR_QUBITS) {
        Some(prepared_fidelity(&c, m)?)
    } else {
        None
    };
    let report = CompileReport {
        n_sites: n,
        max_bond,
        fidelity,
        gate_count: c.len(),
        two_qubit_gate_count: c.two_qubit_count(),
        max_gate_qubits: c.max_gate_qubits(),
        depth: c.depth(true),
        multi_qubit_depth: c.multi_qubit_depth(),
        discarded_weight: t.total_discarded_weight(),
    };
    Ok((c, report))
}

/// Fidelity of `c` applied to `|0...0>` against the MPS.
pub fn prepared_fidelity(c: &Circuit, m: &Mps) -> CliResult<f64> {
    Ok(fidelity(&c.prepare()?, &m.to_statevector()?)?)
}

pub fn compile_file(
    input: &Path,
    max_bond: Option<usize>,
    output: &Path,
) -> CliResult<CompileReport> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let m = Mps::from_json(&text)?;
    let (c, report) = compile_mps(&m, max_bond)?;
    write_file(output, &c.to_json()?)?;
    Ok(report)
}
