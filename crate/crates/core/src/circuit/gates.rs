//! Named standard gates and the ZYZ Euler decomposition.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::Gate;
use crate::error::{Error, Result};
use crate::tensor::{isometry_deviation, thin_svd, CMatrix, C64};

/// Basis-gate tag attached by constructors and the transpiler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateLabel {
    pub name: String,
    pub params: Vec<f64>,
}

impl GateLabel {
    pub fn new(name: &str, params: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            params: params.to_vec(),
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Matrix of a named gate; `None` for unknown names or wrong parameter counts.
pub fn named_matrix(name: &str, params: &[f64]) -> Option<CMatrix> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let m = match (name, params) {
        ("id", []) => CMatrix::identity(2, 2),
        ("x", []) => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        ("y", []) => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        ("z", []) => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        ("h", []) => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
        }
        ("s", []) => CMatrix::from_row_slice(2, 2, &[o, z, z, c(0.0, 1.0)]),
        ("sdg", []) => CMatrix::from_row_slice(2, 2, &[o, z, z, c(0.0, -1.0)]),
        ("sx", []) => {
            let p = c(0.5, 0.5);
            let m = c(0.5, -0.5);
            CMatrix::from_row_slice(2, 2, &[p, m, m, p])
        }
        ("rx", [t]) => {
            let (s, co) = (t / 2.0).sin_cos();
            CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
        }
        ("ry", [t]) => {
            let (s, co) = (t / 2.0).sin_cos();
            CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
        }
        ("rz", [t]) => CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(1.0, -t / 2.0),
                z,
                z,
                C64::from_polar(1.0, t / 2.0),
            ],
        ),
        ("u", [t, p, l]) => {
            let (s, co) = (t / 2.0).sin_cos();
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(co, 0.0),
                    -C64::from_polar(s, *l),
                    C64::from_polar(s, *p),
                    C64::from_polar(co, p + l),
                ],
            )
        }
        ("cx", []) => {
            CMatrix::from_row_slice(4, 4, &[o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z])
        }
        ("cz", []) => {
            let mut m = CMatrix::identity(4, 4);
            m[(3, 3)] = -o;
            m
        }
        ("swap", []) => {
            CMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o])
        }
        _ => return None,
    };
    Some(m)
}

fn arity(name: &str) -> usize {
    match name {
        "cx" | "cz" | "swap" => 2,
        _ => 1,
    }
}

impl Gate {
    /// A labelled standard gate, e.g. `Gate::named("cx", &[], &[0, 1])`.
    pub fn named(name: &str, params: &[f64], qubits: &[usize]) -> Result<Gate> {
        let m = named_matrix(name, params).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown gate `{name}` with {} params",
                params.len()
            ))
        })?;
        if qubits.len() != arity(name) {
            return Err(Error::InvalidArgument(format!(
                "`{name}` acts on {} qubits, got {}",
                arity(name),
                qubits.len()
            )));
        }
        let mut g = Gate::new(qubits.to_vec(), m)?;
        g.label = Some(GateLabel::new(name, params));
        Ok(g)
    }

    pub fn x(q: usize) -> Gate {
        Gate::named("x", &[], &[q]).expect("valid gate")
    }

    pub fn h(q: usize) -> Gate {
        Gate::named("h", &[], &[q]).expect("valid gate")
    }

    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate::named("rz", &[theta], &[q]).expect("valid gate")
    }

    pub fn ry(q: usize, theta: f64) -> Gate {
        Gate::named("ry", &[theta], &[q]).expect("valid gate")
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::named("cx", &[], &[control, target]).expect("valid gate")
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::named("swap", &[], &[a, b]).expect("valid gate")
    }

    /// Single-qubit gate tagged with its `U(theta, phi, lambda)` angles.
    /// Labelled `u` gate for a 2x2 matrix. Rounding drift up to 1e-6 (from
    /// fusing long runs of gates) is removed by polar projection.
    pub fn u_from_matrix(q: usize, m: CMatrix) -> Result<Gate> {
        if m.shape() != (2, 2) {
            return Err(Error::InvalidShape(format!(
                "u gate needs 2x2, got {:?}",
                m.shape()
            )));
        }
        let dev = isometry_deviation(&m);
        if dev > 1e-6 {
            return Err(Error::NotUnitary(dev));
        }
        let (u, _, vh) = thin_svd(&m);
        let m = u * vh;
        let (t, p, l) = zyz_angles(&m)?;
        let mut g = Gate::new(vec![q], m)?;
        g.label = Some(GateLabel::new("u", &[t, p, l]));
        Ok(g)
    }
}

/// Angles `(theta, phi, lambda)` with `m = e^{i a} U(theta, phi, lambda)`.
pub fn zyz_angles(m: &CMatrix) -> Result<(f64, f64, f64)> {
    if m.shape() != (2, 2) {
        return Err(Error::InvalidShape(format!(
            "ZYZ needs 2x2, got {:?}",
            m.shape()
        )));
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let v = m / det.sqrt();
    let theta = 2.0 * v[(1, 0)].norm().atan2(v[(0, 0)].norm());
    // v00 = e^{-i(phi+lam)/2} cos, v10 = e^{i(phi-lam)/2} sin
    let sum = if v[(0, 0)].norm() > 1e-12 {
        -2.0 * v[(0, 0)].arg()
    } else {
        0.0
    };
    let diff = if v[(1, 0)].norm() > 1e-12 {
        2.0 * v[(1, 0)].arg()
    } else {
        0.0
    };
    Ok((theta, (sum + diff) / 2.0, (sum - diff) / 2.0))
}

/// Label of the adjoint of a labelled gate, if expressible with a basis name.
pub(crate) fn inverse_label(label: &GateLabel, adjoint: &CMatrix) -> Option<GateLabel> {
    let p = &label.params;
    match label.name.as_str() {
        "id" | "x" | "y" | "z" | "h" | "cx" | "cz" | "swap" => Some(label.clone()),
        "s" => Some(GateLabel::new("sdg", &[])),
        "sdg" => Some(GateLabel::new("s", &[])),
        "rx" | "ry" | "rz" => Some(GateLabel::new(&label.name, &[-p[0]])),
        "u" => Some(GateLabel::new("u", &[-p[0], -p[2], -p[1]])),
        _ if adjoint.nrows() == 2 => zyz_angles(adjoint)
            .ok()
            .map(|(t, ph, l)| GateLabel::new("u", &[t, ph, l])),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::max_abs;

    fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> bool {
        let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        let phase = if ip.norm() > 0.0 {
            ip / ip.norm()
        } else {
            c(1.0, 0.0)
        };
        max_abs(&(a * phase - b)) < 1e-12
    }

    #[test]
    fn named_matrices_are_unitary() {
        for (n, p) in [
            ("x", vec![]),
            ("y", vec![]),
            ("z", vec![]),
            ("h", vec![]),
            ("s", vec![]),
            ("sdg", vec![]),
            ("sx", vec![]),
            ("rx", vec![0.3]),
            ("ry", vec![1.2]),
            ("rz", vec![-0.7]),
            ("u", vec![0.1, 0.2, 0.3]),
            ("cx", vec![]),
            ("cz", vec![]),
            ("swap", vec![]),
        ] {
            let m = named_matrix(n, &p).unwrap();
            let d = m.nrows();
            assert!(
                max_abs(&(m.adjoint() * &m - CMatrix::identity(d, d))) < 1e-14,
                "{n}"
            );
        }
        assert!(named_matrix("rz", &[]).is_none());
        assert!(named_matrix("ccx", &[]).is_none());
    }

    #[test]
    fn sx_squares_to_x() {
        let sx = named_matrix("sx", &[]).unwrap();
        assert!(max_abs(&(&sx * &sx - named_matrix("x", &[]).unwrap())) < 1e-15);
    }

    #[test]
    fn ry_is_u_with_zero_phases() {
        let a = named_matrix("ry", &[0.8]).unwrap();
        let b = named_matrix("u", &[0.8, 0.0, 0.0]).unwrap();
        assert!(max_abs(&(a - b)) < 1e-15);
    }

    #[test]
    fn zyz_reconstructs_random_unitaries() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = CMatrix::from_fn(2, 2, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let q = a.qr().q();
            let (t, p, l) = zyz_angles(&q).unwrap();
            assert!(equal_up_to_phase(
                &q,
                &named_matrix("u", &[t, p, l]).unwrap()
            ));
        }
        for m in [
            named_matrix("x", &[]).unwrap(),
            named_matrix("z", &[]).unwrap(),
            named_matrix("h", &[]).unwrap(),
            CMatrix::identity(2, 2),
        ] {
            let (t, p, l) = zyz_angles(&m).unwrap();
            assert!(equal_up_to_phase(
                &m,
                &named_matrix("u", &[t, p, l]).unwrap()
            ));
        }
    }

    #[test]
    fn inverse_labels_match_adjoints() {
        for (n, p) in [
            ("s", vec![]),
            ("rx", vec![0.4]),
            ("u", vec![0.5, -0.2, 1.1]),
            ("sx", vec![]),
        ] {
            let m = named_matrix(n, &p).unwrap();
            let adj = m.adjoint();
            let inv = inverse_label(&GateLabel::new(n, &p), &adj).unwrap();
            let got = named_matrix(&inv.name, &inv.params).unwrap();
            assert!(equal_up_to_phase(&adj, &got), "{n}");
        }
    }
}
