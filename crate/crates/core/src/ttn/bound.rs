use crate::error::{Error, Result};
use crate::tensor::exact_log2;

/// Predicted largest gate of an exact tree compilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateSizeBound {
    pub chi: usize,
    pub max_gate_qubits: usize,
    /// Smallest `N` at which the `4 log2 chi` ceiling is reached.
    pub saturation_n: usize,
}

/// Smallest integer `L` with `L >= 4 + log2(log2 chi)`.
fn saturation_layers(chi: usize) -> Result<usize> {
    let b = exact_log2(chi)
        .filter(|&b| b >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("chi {chi} must be a power of two >= 2")))?;
    Ok(4 + b.next_power_of_two().trailing_zeros() as usize)
}

/// Runs the renormaliser on shapes alone: every internal MPS bond is `chi`,
/// each merge keeps `min(da*db, l*r, max_bond)` and costs a gate on
/// `log2 da + log2 db` qubits.
pub fn shape_only_max_gate_qubits(n: usize, chi: usize, max_bond: Option<usize>) -> usize {
    // (l, d, r) per chain element
    let mut chain: Vec<(usize, usize, usize)> = (0..n)
        .map(|i| {
            let l = if i == 0 { 1 } else { chi };
            let r = if i + 1 == n { 1 } else { chi };
            (l, 2, r)
        })
        .collect();
    let log2 = |x: usize| x.trailing_zeros() as usize;
    let mut best = 0;
    while chain.len() > 1 {
        let mut next = Vec::with_capacity(chain.len().div_ceil(2));
        for pair in chain.chunks(2) {
            match pair {
                [a, b] => {
                    best = best.max(log2(a.1) + log2(b.1));
                    let mut k = (a.1 * b.1).min(a.0 * b.2);
                    if let Some(cap) = max_bond {
                        k = k.min(cap);
                    }
                    next.push((a.0, k, b.2));
                }
                [a] => next.push(*a),
                _ => unreachable!(),
            }
        }
        chain = next;
    }
    best
}

/// `4 log2 chi` once `ceil(log2 n) >= 4 + log2 log2 chi`, otherwise the
/// shape-only construction's maximum for this `n`.
pub fn predict_max_gate_qubits(n: usize, chi: usize) -> Result<GateSizeBound> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let layers = saturation_layers(chi)?;
    let ceiling = 4 * chi.trailing_zeros() as usize;
    let saturation_n = (1usize << (layers - 1)) + 1;
    let depth = n.next_power_of_two().trailing_zeros() as usize;
    let max_gate_qubits = if depth >= layers {
        ceiling
    } else {
        shape_only_max_gate_qubits(n, chi, None)
    };
    Ok(GateSizeBound {
        chi,
        max_gate_qubits,
        saturation_n,
    })
}
