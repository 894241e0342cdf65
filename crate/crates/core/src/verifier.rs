//! Ancilla-free overlap circuits built from vectorised MPOs.
//!
//! The verifier for `U` inverts the preparation circuit of `vec(U)/|U|_F`
//! on `2N` qubits. Loading `phi` on the even qubits and `conj(psi)` on the
//! odd ones, the all-zeros amplitude squared is `|<phi|U|psi>|^2 / |U|_F^2`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::mps::{vectorize_mpo, Mpo, Statevector};
use crate::tensor::C64;
use crate::ttn::{renormalize, ttn_to_circuit};

/// Largest system size the verifier simulates (on twice as many qubits).
pub const MAX_VERIFIER_SITES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifierCircuit {
    pub circuit: Circuit,
    /// `|U|_F^2`, equal to `2^N` for a unitary.
    pub norm_const: f64,
    pub n_sites: usize,
    pub discarded_weight: f64,
}

impl VerifierCircuit {
    /// Physical qubit carrying qubit `i` of `phi`.
    pub fn phi_qubit(i: usize) -> usize {
        2 * i
    }

    /// Physical qubit carrying qubit `i` of `psi`.
    pub fn psi_qubit(i: usize) -> usize {
        2 * i + 1
    }

    /// The product input `phi ⊗ conj(psi)`, interleaved.
    pub fn input_state(&self, psi: &Statevector, phi: &Statevector) -> Result<Statevector> {
        let n = self.n_sites;
        for s in [psi, phi] {
            if s.n_qubits() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: s.n_qubits(),
                });
            }
        }
        let total = 2 * n;
        let spread = |x: usize, slot: fn(usize) -> usize| -> usize {
            (0..n)
                .filter(|&q| (x >> (n - 1 - q)) & 1 == 1)
                .map(|q| 1usize << (total - 1 - slot(q)))
                .sum()
        };
        let mut amps = vec![C64::new(0.0, 0.0); 1 << total];
        for (a, &fa) in phi.amplitudes().iter().enumerate() {
            let ia = spread(a, Self::phi_qubit);
            for (b, &pb) in psi.amplitudes().iter().enumerate() {
                amps[ia | spread(b, Self::psi_qubit)] = fa * pb.conj();
            }
        }
        Statevector::new(total, amps)
    }

    /// Output distribution over the `2N`-qubit computational basis.
    pub fn output_probabilities(&self, psi: &Statevector, phi: &Statevector) -> Result<Vec<f64>> {
        let out = self.circuit.simulate(&self.input_state(psi, phi)?)?;
        Ok(out.amplitudes().iter().map(|a| a.norm_sqr()).collect())
    }
}

pub fn build_verifier(u: &Mpo, max_bond: Option<usize>) -> Result<VerifierCircuit> {
    let n = u.n_sites();
    if n > MAX_VERIFIER_SITES {
        return Err(Error::Capacity(format!(
            "verifier limited to {MAX_VERIFIER_SITES} sites, got {n}"
        )));
    }
    let vec = vectorize_mpo(u)?;
    let ttn = renormalize(&vec.mps, max_bond)?;
    let prep = ttn_to_circuit(&ttn)?;
    Ok(VerifierCircuit {
        circuit: prep.invert(),
        norm_const: vec.scale * vec.scale,
        n_sites: n,
        discarded_weight: ttn.total_discarded_weight(),
    })
}

/// `norm_const * |<0...0| V (phi ⊗ conj psi)>|^2`, i.e. `|<phi|U|psi>|^2` for
/// an untruncated build.
pub fn overlap_exact(v: &VerifierCircuit, psi: &Statevector, phi: &Statevector) -> Result<f64> {
    Ok(v.norm_const * v.output_probabilities(psi, phi)?[0])
}

/// Shot estimate of [`overlap_exact`]: `norm_const * zeros / shots`.
pub fn overlap_sampled(
    v: &VerifierCircuit,
    psi: &Statevector,
    phi: &Statevector,
    shots: usize,
    seed: u64,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let probs = v.output_probabilities(psi, phi)?;
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::Internal(format!("output distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = (0..shots).filter(|_| dist.sample(&mut rng) == 0).count();
    Ok(v.norm_const * zeros as f64 / shots as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepRow {
    pub delta: f64,
    pub metric: f64,
    pub expected: f64,
}

/// `U psi` for an operator small enough to materialise.
pub fn apply_mpo(u: &Mpo, psi: &Statevector) -> Result<Statevector> {
    if psi.n_qubits() != u.n_sites() {
        return Err(Error::SizeMismatch {
            expected: u.n_sites(),
            got: psi.n_qubits(),
        });
    }
    let dense = u.to_dense()?;
    let x = crate::tensor::CMatrix::from_column_slice(psi.amplitudes().len(), 1, psi.amplitudes());
    Statevector::new(
        psi.n_qubits(),
        (dense * x).column(0).iter().copied().collect(),
    )
}

/// For each `delta`, `phi = sqrt(1-delta) U psi + sqrt(delta) eta` with `eta`
/// Haar-random. With `orthogonalize`, `eta` is projected off `U psi` first,
/// so `phi` is normalised and the exact metric is `1 - delta`; otherwise
/// `phi` is renormalised and `expected` is the direct overlap.
pub fn noise_sweep_with(
    u: &Mpo,
    psi: &Statevector,
    deltas: &[f64],
    seed: u64,
    orthogonalize: bool,
) -> Result<Vec<NoiseSweepRow>> {
    if let Some(d) = deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::InvalidArgument(format!("delta {d} outside [0, 1]")));
    }
    let v = build_verifier(u, None)?;
    let target = apply_mpo(u, psi)?;
    let mut eta = Statevector::random(psi.n_qubits(), seed)?;
    if orthogonalize {
        let c = target.inner(&eta)?;
        for (e, t) in eta.amplitudes_mut().iter_mut().zip(target.amplitudes()) {
            *e -= c * t;
        }
        eta.normalize();
    }
    deltas
        .iter()
        .map(|&delta| {
            let (a, b) = ((1.0 - delta).sqrt(), delta.sqrt());
            let amps = target
                .amplitudes()
                .iter()
                .zip(eta.amplitudes())
                .map(|(t, e)| t * a + e * b)
                .collect();
            let mut phi = Statevector::new(psi.n_qubits(), amps)?;
            let expected = if orthogonalize {
                1.0 - delta
            } else {
                phi.normalize();
                phi.inner(&target)?.norm_sqr()
            };
            Ok(NoiseSweepRow {
                delta,
                metric: overlap_exact(&v, psi, &phi)?,
                expected,
            })
        })
        .collect()
}

pub fn noise_sweep(
    u: &Mpo,
    psi: &Statevector,
    deltas: &[f64],
    seed: u64,
) -> Result<Vec<NoiseSweepRow>> {
    noise_sweep_with(u, psi, deltas, seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{mcz_mpo, pauli_exp_mpo};

    fn direct(u: &Mpo, psi: &Statevector, phi: &Statevector) -> f64 {
        phi.inner(&apply_mpo(u, psi).unwrap()).unwrap().norm_sqr()
    }

    #[test]
    fn identity_gives_swap_test() {
        let u = Mpo::identity(3).unwrap();
        let v = build_verifier(&u, None).unwrap();
        assert!((v.norm_const - 8.0).abs() < 1e-9);
        let psi = Statevector::random(3, 1).unwrap();
        let phi = Statevector::random(3, 2).unwrap();
        assert!((overlap_exact(&v, &psi, &psi).unwrap() - 1.0).abs() < 1e-9);
        let want = phi.inner(&psi).unwrap().norm_sqr();
        assert!((overlap_exact(&v, &psi, &phi).unwrap() - want).abs() < 1e-9);
        let orth = Statevector::basis(3, 5).unwrap();
        assert!(overlap_exact(&v, &Statevector::basis(3, 2).unwrap(), &orth).unwrap() < 1e-12);
    }

    #[test]
    fn self_overlap_is_one() {
        let u = mcz_mpo(3).unwrap();
        let v = build_verifier(&u, None).unwrap();
        let psi = Statevector::random(3, 7).unwrap();
        let phi = apply_mpo(&u, &psi).unwrap();
        assert!((overlap_exact(&v, &psi, &phi).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_dense_oracle() {
        for n in 2..=5 {
            let zs: String = "XYZ".chars().cycle().take(n).collect();
            for u in [mcz_mpo(n).unwrap(), pauli_exp_mpo(&zs, 0.7).unwrap()] {
                let v = build_verifier(&u, None).unwrap();
                let layers = (2.0 * n as f64).log2().ceil() as usize + 1;
                assert!(v.circuit.multi_qubit_depth() <= layers);
                for s in 0..20 {
                    let psi = Statevector::random(n, 100 + s).unwrap();
                    let phi = Statevector::random(n, 200 + s).unwrap();
                    let got = overlap_exact(&v, &psi, &phi).unwrap();
                    assert!((got - direct(&u, &psi, &phi)).abs() < 1e-9, "n={n}");
                    assert!(got <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn zz_example() {
        let u = pauli_exp_mpo("ZZ", 0.7).unwrap();
        let v = build_verifier(&u, None).unwrap();
        let psi = Statevector::random(2, 3).unwrap();
        let phi = Statevector::random(2, 4).unwrap();
        assert!((overlap_exact(&v, &psi, &phi).unwrap() - direct(&u, &psi, &phi)).abs() < 1e-9);
    }

    #[test]
    fn sampling_limits() {
        let u = mcz_mpo(2).unwrap();
        let v = build_verifier(&u, None).unwrap();
        let psi = Statevector::random(2, 5).unwrap();
        let phi = Statevector::random(2, 6).unwrap();
        for seed in 0..20 {
            let e = overlap_sampled(&v, &psi, &phi, 1, seed).unwrap();
            assert!(e == 0.0 || (e - v.norm_const).abs() < 1e-12);
        }
        let exact = overlap_exact(&v, &psi, &phi).unwrap();
        let p = exact / v.norm_const;
        let shots = 1_000_000;
        let se = v.norm_const * (p * (1.0 - p) / shots as f64).sqrt();
        let est = overlap_sampled(&v, &psi, &phi, shots, 9).unwrap();
        assert!((est - exact).abs() < 5.0 * se);
        assert!(overlap_sampled(&v, &psi, &phi, 0, 0).is_err());
        assert!(overlap_sampled(&v, &psi, &Statevector::random(3, 0).unwrap(), 1, 0).is_err());
    }

    #[test]
    fn noise_sweep_is_monotone() {
        let u = mcz_mpo(4).unwrap();
        let psi = Statevector::random(4, 11).unwrap();
        let deltas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let rows = noise_sweep(&u, &psi, &deltas, 3).unwrap();
        assert!((rows[0].metric - 1.0).abs() < 1e-9);
        assert!(rows[10].metric.abs() < 1e-9);
        for w in rows.windows(2) {
            assert!(w[1].metric < w[0].metric + 1e-9);
        }
        for r in &rows {
            assert!((r.metric - r.expected).abs() < 1e-9);
        }
        let raw = noise_sweep_with(&u, &psi, &deltas, 3, false).unwrap();
        for r in &raw {
            assert!((r.metric - r.expected).abs() < 1e-9);
        }
        assert!(noise_sweep(&u, &psi, &[1.5], 0).is_err());
    }
}
