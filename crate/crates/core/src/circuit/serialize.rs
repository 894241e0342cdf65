use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate, GateLabel};
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub qubits: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
}

impl Circuit {
    pub fn to_file(&self) -> CircuitFile {
        CircuitFile {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| {
                    let u = g.unitary();
                    let rows = |f: fn(&C64) -> f64| {
                        (0..u.nrows())
                            .map(|i| (0..u.ncols()).map(|j| f(&u[(i, j)])).collect())
                            .collect()
                    };
                    GateRecord {
                        qubits: g.qubits().to_vec(),
                        re: rows(|z| z.re),
                        im: rows(|z| z.im),
                        name: g.label().map(|l| l.name.clone()),
                        params: g.label().map(|l| l.params.clone()).unwrap_or_default(),
                    }
                })
                .collect(),
        }
    }

    pub fn from_file(f: &CircuitFile) -> Result<Circuit> {
        let mut c = Circuit::new(f.n_qubits);
        for (idx, r) in f.gates.iter().enumerate() {
            let d = r.re.len();
            if r.im.len() != d || r.re.iter().chain(&r.im).any(|row| row.len() != d) {
                return Err(Error::InvalidShape(format!(
                    "gate {idx}: matrix is not square"
                )));
            }
            let m = CMatrix::from_fn(d, d, |i, j| C64::new(r.re[i][j], r.im[i][j]));
            let mut g = Gate::new(r.qubits.clone(), m)?;
            if let Some(name) = &r.name {
                g = g.with_label(GateLabel::new(name, &r.params));
            }
            c.push(g)?;
        }
        Ok(c)
    }

    /// `{"n_qubits": n, "gates": [{"qubits": [...], "re": [[...]], "im": [[...]]}]}`
    /// with optional `name`/`params` tags.
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(&self.to_file())
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let f: CircuitFile = serde_json::from_str(text)?;
        Circuit::from_file(&f)
    }

    /// OpenQASM 2.0 text. Every gate must carry a basis label on at most two
    /// qubits; `ry` is written as `U(theta,0,0)` and `u` as `U(...)`.
    pub fn to_qasm2(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        writeln!(out, "qreg q[{}];", self.n_qubits).expect("string write");
        for (idx, g) in self.gates.iter().enumerate() {
            let label = g.label().filter(|_| g.arity() <= 2).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "gate {idx} ({} qubits) has no basis label; transpile first",
                    g.arity()
                ))
            })?;
            let args = g
                .qubits()
                .iter()
                .map(|q| format!("q[{q}]"))
                .collect::<Vec<_>>()
                .join(",");
            let p = &label.params;
            let head = match label.name.as_str() {
                "x" | "y" | "z" | "h" | "s" | "sdg" | "sx" | "cx" | "cz" | "swap" | "id" => {
                    label.name.clone()
                }
                "rx" | "rz" => format!("{}({:.16e})", label.name, p[0]),
                "ry" => format!("U({:.16e},0,0)", p[0]),
                "u" => format!("U({:.16e},{:.16e},{:.16e})", p[0], p[1], p[2]),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "gate {idx}: `{other}` has no OpenQASM 2.0 spelling"
                    )))
                }
            };
            writeln!(out, "{head} {args};").expect("string write");
        }
        Ok(out)
    }
}
