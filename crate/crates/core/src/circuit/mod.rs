//! Gate-level IR: dense unitary gates on a qubit register.
//!
//! A gate's matrix index uses its first listed qubit as the most significant
//! bit, matching the register convention where qubit 0 is the most
//! significant bit of a statevector index.

mod gates;
mod serialize;

pub use gates::{named_matrix, zyz_angles, GateLabel};
pub use serialize::{CircuitFile, GateRecord};

use crate::error::{Error, Result};
use crate::mps::Statevector;
use crate::tensor::{isometry_deviation, CMatrix, C64};

/// Largest gate arity accepted.
pub const MAX_GATE_QUBITS: usize = 16;

/// Tolerance on `U†U = I` for gates entering a circuit.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    qubits: Vec<usize>,
    unitary: CMatrix,
    label: Option<GateLabel>,
}

impl Gate {
    /// Validates arity, distinct qubits and unitarity.
    pub fn new(qubits: Vec<usize>, unitary: CMatrix) -> Result<Gate> {
        let g = Self::new_trusted(qubits, unitary)?;
        let dev = isometry_deviation(&g.unitary);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(g)
    }

    /// Shape checks only, for matrices that are unitary by construction
    /// (orthonormal completions, products of unitaries).
    pub(crate) fn new_trusted(qubits: Vec<usize>, unitary: CMatrix) -> Result<Gate> {
        let k = qubits.len();
        if k == 0 {
            return Err(Error::InvalidArgument(
                "a gate needs at least one qubit".into(),
            ));
        }
        if k > MAX_GATE_QUBITS {
            return Err(Error::Capacity(format!(
                "{k}-qubit gate exceeds the {MAX_GATE_QUBITS}-qubit limit; lower max_bond"
            )));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} repeated in gate"
                )));
            }
        }
        let d = 1usize << k;
        if unitary.shape() != (d, d) {
            return Err(Error::InvalidShape(format!(
                "{k}-qubit gate needs a {d}x{d} matrix, got {:?}",
                unitary.shape()
            )));
        }
        Ok(Gate {
            qubits,
            unitary,
            label: None,
        })
    }

    pub fn with_label(mut self, label: GateLabel) -> Gate {
        self.label = Some(label);
        self
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn label(&self) -> Option<&GateLabel> {
        self.label.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    pub fn adjoint(&self) -> Gate {
        let adj = self.unitary.adjoint();
        let label = self
            .label
            .as_ref()
            .and_then(|l| gates::inverse_label(l, &adj));
        Gate {
            qubits: self.qubits.clone(),
            unitary: adj,
            label,
        }
    }

    /// Same matrix on relabelled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            unitary: self.unitary.clone(),
            label: self.label.clone(),
        }
    }

    pub fn is_named(&self, name: &str) -> bool {
        self.label.as_ref().is_some_and(|l| l.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} outside a {}-qubit register",
                self.n_qubits
            )));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn max_gate_qubits(&self) -> usize {
        self.gates.iter().map(Gate::arity).max().unwrap_or(0)
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.arity() == 2).count()
    }

    /// Reversed order, each gate replaced by its adjoint.
    pub fn invert(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// ASAP layering over the qubit-dependency DAG. With `count_single_qubit`
    /// false, one-qubit gates are ignored entirely.
    pub fn depth(&self, count_single_qubit: bool) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            if g.arity() == 1 && !count_single_qubit {
                continue;
            }
            let l = 1 + g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
            for &q in &g.qubits {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    /// Depth counting only gates on two or more qubits.
    pub fn multi_qubit_depth(&self) -> usize {
        self.depth(false)
    }

    pub fn simulate(&self, input: &Statevector) -> Result<Statevector> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                got: input.n_qubits(),
            });
        }
        let mut state = input.clone();
        for g in &self.gates {
            apply_gate(g, state.amplitudes_mut(), self.n_qubits);
        }
        Ok(state)
    }

    /// Output state from `|0...0>`.
    pub fn prepare(&self) -> Result<Statevector> {
        self.simulate(&Statevector::zero(self.n_qubits)?)
    }

    /// Dense unitary of the whole circuit (column `j` = image of basis state `j`).
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n_qubits > 12 {
            return Err(Error::Capacity(format!(
                "dense unitary of {} qubits",
                self.n_qubits
            )));
        }
        let d = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            let out = self.simulate(&Statevector::basis(self.n_qubits, j)?)?;
            for (i, a) in out.amplitudes().iter().enumerate() {
                m[(i, j)] = *a;
            }
        }
        Ok(m)
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }
}

/// Applies `g` in place to a `2^n` amplitude buffer.
pub fn apply_gate(g: &Gate, amps: &mut [C64], n: usize) {
    let k = g.arity();
    let d = 1usize << k;
    let offsets: Vec<usize> = (0..d)
        .map(|j| {
            g.qubits
                .iter()
                .enumerate()
                .filter(|(t, _)| (j >> (k - 1 - t)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        })
        .collect();
    let mask: usize = g.qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let u = &g.unitary;
    let mut buf = vec![C64::new(0.0, 0.0); d];
    let mut base = 0usize;
    loop {
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = amps[base + o];
        }
        for (i, &o) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, b) in buf.iter().enumerate() {
                acc += u[(i, j)] * b;
            }
            amps[base + o] = acc;
        }
        // next index with zeros on every gate bit
        base = ((base | mask) + 1) & !mask;
        if base == 0 || base >= amps.len() {
            break;
        }
    }
}

/// Largest operator-norm distance between two matrices after removing the
/// best global phase.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let diff = a * phase - b;
    crate::tensor::singular_values(&diff)
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// `gates` random unitaries on random qubit subsets of size `1..=max_k`.
pub fn random_circuit<R: rand::Rng + ?Sized>(
    n: usize,
    gates: usize,
    max_k: usize,
    rng: &mut R,
) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..gates {
        let k = rng.random_range(1..=max_k.min(n));
        let mut qs: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            qs.swap(i, j);
        }
        qs.truncate(k);
        c.push(
            Gate::new_trusted(qs, crate::tensor::random_unitary(1 << k, rng))
                .expect("unitary on distinct qubits"),
        )
        .expect("qubits in range");
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Embeds a gate into the full register by explicit index arithmetic.
    fn full_matrix(g: &Gate, n: usize) -> CMatrix {
        let d = 1usize << n;
        let mut m = CMatrix::zeros(d, d);
        let sub = |idx: usize| -> usize {
            g.qubits()
                .iter()
                .fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
        };
        for row in 0..d {
            for col in 0..d {
                let rest_mask: usize = (0..n)
                    .filter(|q| !g.qubits().contains(q))
                    .map(|q| 1usize << (n - 1 - q))
                    .sum();
                if row & rest_mask != col & rest_mask {
                    continue;
                }
                m[(row, col)] = g.unitary()[(sub(row), sub(col))];
            }
        }
        m
    }

    #[test]
    fn empty_circuit_is_identity() {
        let x = Statevector::random(3, 1).unwrap();
        assert_eq!(Circuit::new(3).simulate(&x).unwrap(), x);
    }

    #[test]
    fn x_on_qubit_zero_flips_msb() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(0)).unwrap();
        let out = c.prepare().unwrap();
        assert_eq!(out.amplitudes()[0b10], C64::new(1.0, 0.0));
    }

    #[test]
    fn cx_control_is_first_qubit() {
        let mut c = Circuit::new(3);
        c.push(Gate::x(2)).unwrap();
        c.push(Gate::cx(2, 0)).unwrap();
        let out = c.prepare().unwrap();
        assert_eq!(out.amplitudes()[0b101], C64::new(1.0, 0.0));
    }

    #[test]
    fn simulation_matches_dense_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let c = random_circuit(4, 3, 3, &mut rng);
            let mut full = CMatrix::identity(16, 16);
            for g in c.gates() {
                full = full_matrix(g, 4) * full;
            }
            let x = Statevector::random(4, rng.random()).unwrap();
            let got = c.simulate(&x).unwrap();
            let want = &full * nalgebra::DVector::from_column_slice(x.amplitudes());
            for (a, b) in got.amplitudes().iter().zip(want.iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn simulation_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let c = random_circuit(5, 4, 3, &mut rng);
            let x = Statevector::random(5, rng.random()).unwrap();
            assert!((c.simulate(&x).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn invert_round_trips() {
        assert!(Circuit::new(2).invert().is_empty());
        let mut h = Circuit::new(1);
        h.push(Gate::h(0)).unwrap();
        assert!(max_abs(&(h.invert().gates()[0].unitary() - h.gates()[0].unitary())) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let c = random_circuit(4, 5, 3, &mut rng);
            let x = Statevector::random(4, rng.random()).unwrap();
            let back = c.invert().simulate(&c.simulate(&x).unwrap()).unwrap();
            for (a, b) in back.amplitudes().iter().zip(x.amplitudes()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn depth_examples() {
        assert_eq!(Circuit::new(3).depth(true), 0);
        let mut par = Circuit::new(4);
        par.push(Gate::cx(0, 1)).unwrap();
        par.push(Gate::cx(2, 3)).unwrap();
        assert_eq!(par.depth(true), 1);

        let n = 7;
        let mut stair = Circuit::new(n);
        for i in 0..n - 1 {
            stair.push(Gate::cx(i, i + 1)).unwrap();
        }
        assert_eq!(stair.depth(true), n - 1);

        let mut mixed = Circuit::new(2);
        mixed.push(Gate::h(0)).unwrap();
        mixed.push(Gate::cx(0, 1)).unwrap();
        mixed.push(Gate::h(1)).unwrap();
        assert_eq!(mixed.depth(true), 3);
        assert_eq!(mixed.depth(false), 1);
    }

    #[test]
    fn depth_ignores_within_layer_order() {
        let mut a = Circuit::new(4);
        a.push(Gate::cx(0, 1)).unwrap();
        a.push(Gate::cx(2, 3)).unwrap();
        a.push(Gate::cx(1, 2)).unwrap();
        let mut b = Circuit::new(4);
        b.push(Gate::cx(2, 3)).unwrap();
        b.push(Gate::cx(0, 1)).unwrap();
        b.push(Gate::cx(1, 2)).unwrap();
        assert_eq!(a.depth(true), b.depth(true));
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::new(vec![0, 0], CMatrix::identity(4, 4)).is_err());
        assert!(Gate::new(vec![0], CMatrix::identity(4, 4)).is_err());
        let mut bad = CMatrix::identity(2, 2);
        bad[(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(Gate::new(vec![0], bad), Err(Error::NotUnitary(_))));
        assert!(matches!(
            Gate::new_trusted((0..17).collect(), CMatrix::identity(1, 1)),
            Err(Error::Capacity(_))
        ));
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::x(2)).is_err());
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(4, &mut rng);
        let v = &u * C64::from_polar(1.0, 0.7);
        assert!(phase_aligned_distance(&u, &v) < 1e-12);
        assert!(phase_aligned_distance(&u, &CMatrix::identity(4, 4)) > 1e-3);
    }
}
