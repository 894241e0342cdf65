use super::{site_tensor, Mps, PHYS_DIM};
use crate::error::{Error, Result};
#[cfg(test)]
use crate::tensor::max_abs;
use crate::tensor::{row_major, svd_matrix, CMatrix, Tensor, C64};

/// Largest operator [`Mpo::to_dense`] will materialise.
pub const MAX_DENSE_MPO_QUBITS: usize = 12;

fn mpo_site(i: usize, l: usize, r: usize, data: Vec<C64>) -> Result<Tensor> {
    Tensor::new(
        vec![l, PHYS_DIM, PHYS_DIM, r],
        data,
        vec![
            super::bond_label(i),
            format!("i{i}"),
            format!("o{i}"),
            super::bond_label(i + 1),
        ],
    )
}

/// Chain of `(left, in, out, right)` tensors. As a dense matrix the row index
/// is the output and the column index the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Mpo {
    sites: Vec<Tensor>,
}

impl Mpo {
    pub fn new(sites: Vec<Tensor>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidShape("an MPO needs at least one site".into()));
        }
        let n = sites.len();
        let mut out: Vec<Tensor> = Vec::with_capacity(n);
        for (i, t) in sites.into_iter().enumerate() {
            let s = t.shape().to_vec();
            if s.len() != 4 || s[1] != PHYS_DIM || s[2] != PHYS_DIM {
                return Err(Error::InvalidShape(format!("MPO site {i} has shape {s:?}")));
            }
            if (i == 0 && s[0] != 1) || (i == n - 1 && s[3] != 1) {
                return Err(Error::InvalidShape(
                    "boundary bonds must have dimension 1".into(),
                ));
            }
            if let Some(prev) = out.last() {
                if prev.shape()[3] != s[0] {
                    return Err(Error::InvalidShape(format!("MPO bond {i} mismatch")));
                }
            }
            out.push(mpo_site(i, s[0], s[3], t.into_data())?);
        }
        Ok(Self { sites: out })
    }

    /// Builds from per-site bond-indexed 2x2 operator blocks:
    /// `blocks[i][l][r]` is the operator (row = out, col = in) on site `i`.
    pub fn from_blocks(blocks: Vec<Vec<Vec<CMatrix>>>) -> Result<Self> {
        let sites = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                let l = b.len();
                let r = b.first().map_or(0, Vec::len);
                let mut d = vec![C64::new(0.0, 0.0); l * 4 * r];
                for (a, row) in b.iter().enumerate() {
                    if row.len() != r {
                        return Err(Error::InvalidShape("ragged MPO block".into()));
                    }
                    for (c, op) in row.iter().enumerate() {
                        for inp in 0..2 {
                            for outp in 0..2 {
                                d[((a * 2 + inp) * 2 + outp) * r + c] = op[(outp, inp)];
                            }
                        }
                    }
                }
                mpo_site(i, l, r, d)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_blocks(vec![vec![vec![CMatrix::identity(2, 2)]]; n])
    }

    /// Tensor product of single-qubit operators, bond dimension 1.
    pub fn product(ops: &[CMatrix]) -> Result<Self> {
        Self::from_blocks(ops.iter().map(|o| vec![vec![o.clone()]]).collect())
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Tensor] {
        &self.sites
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut d = vec![self.sites[0].shape()[0]];
        d.extend(self.sites.iter().map(|s| s.shape()[3]));
        d
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// `sqrt(tr(U†U))` computed along the chain.
    pub fn frobenius_norm(&self) -> f64 {
        let mut env = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for t in &self.sites {
            let (l, r) = (t.shape()[0], t.shape()[3]);
            let mut next = CMatrix::zeros(r, r);
            for io in 0..4 {
                let w = CMatrix::from_fn(l, r, |a, b| t.data()[(a * 4 + io) * r + b]);
                next += w.adjoint() * &env * w;
            }
            env = next;
        }
        env[(0, 0)].re.max(0.0).sqrt()
    }

    /// Dense `2^N x 2^N` matrix, site 0 most significant.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let n = self.n_sites();
        if n > MAX_DENSE_MPO_QUBITS {
            return Err(Error::Capacity(format!(
                "{n}-site MPO exceeds the dense limit of {MAX_DENSE_MPO_QUBITS}"
            )));
        }
        // acc[((out_prefix * 2^k) + in_prefix) * bond + b], with k sites done
        let mut acc = vec![C64::new(1.0, 0.0)];
        let mut bond = 1;
        for (k, t) in self.sites.iter().enumerate() {
            let r = t.shape()[3];
            let dim = 1usize << k;
            let nd = dim * 2;
            let mut next = vec![C64::new(0.0, 0.0); nd * nd * r];
            for o in 0..dim {
                for ip in 0..dim {
                    for l in 0..bond {
                        let a = acc[(o * dim + ip) * bond + l];
                        if a == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for inp in 0..2 {
                            for outp in 0..2 {
                                let base = ((l * 2 + inp) * 2 + outp) * r;
                                let row = (o * 2 + outp) * nd + ip * 2 + inp;
                                for c in 0..r {
                                    next[row * r + c] += a * t.data()[base + c];
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            bond = r;
        }
        let dim = 1usize << n;
        Ok(CMatrix::from_row_slice(dim, dim, &acc))
    }
}

fn pauli(c: char) -> Result<CMatrix> {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    Ok(match c {
        'I' => CMatrix::identity(2, 2),
        'X' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown Pauli letter `{other}`"
            )))
        }
    })
}

/// Multi-controlled Z on `n` qubits, `I - 2|1..1><1..1|`, bond dimension 2.
pub fn mcz_mpo(n: usize) -> Result<Mpo> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "MCZ needs at least two qubits".into(),
        ));
    }
    let id = CMatrix::identity(2, 2);
    let mut p1 = CMatrix::zeros(2, 2);
    p1[(1, 1)] = C64::new(1.0, 0.0);
    let zero = CMatrix::zeros(2, 2);
    let mut blocks = vec![vec![vec![id.clone(), p1.clone()]]];
    for _ in 1..n - 1 {
        blocks.push(vec![
            vec![id.clone(), zero.clone()],
            vec![zero.clone(), p1.clone()],
        ]);
    }
    blocks.push(vec![vec![id], vec![p1 * C64::new(-2.0, 0.0)]]);
    Mpo::from_blocks(blocks)
}

/// `exp(-i theta P) = cos(theta) I - i sin(theta) P` for a Pauli string `P`.
pub fn pauli_exp_mpo(pauli_string: &str, theta: f64) -> Result<Mpo> {
    let ops: Vec<CMatrix> = pauli_string.chars().map(pauli).collect::<Result<_>>()?;
    if ops.is_empty() {
        return Err(Error::InvalidArgument("empty Pauli string".into()));
    }
    if pauli_string.chars().all(|c| c == 'I') {
        return Err(Error::InvalidArgument(
            "all-identity Pauli string; the exponential is a global phase".into(),
        ));
    }
    let c = C64::new(theta.cos(), 0.0);
    let s = C64::new(0.0, -theta.sin());
    let n = ops.len();
    let id = CMatrix::identity(2, 2);
    if n == 1 {
        return Mpo::from_blocks(vec![vec![vec![&id * c + &ops[0] * s]]]);
    }
    let zero = CMatrix::zeros(2, 2);
    let mut blocks = vec![vec![vec![&id * c, &ops[0] * s]]];
    for op in &ops[1..n - 1] {
        blocks.push(vec![
            vec![id.clone(), zero.clone()],
            vec![zero.clone(), op.clone()],
        ]);
    }
    blocks.push(vec![vec![id], vec![ops[n - 1].clone()]]);
    Mpo::from_blocks(blocks)
}

/// Normalised vectorisation of an MPO plus the norm that was divided out.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedMpo {
    /// `2N` sites: site `2i` carries `out_i`, site `2i+1` carries `in_i`.
    pub mps: Mps,
    /// Frobenius norm of the operator.
    pub scale: f64,
}

/// Splits each MPO site into an (out) site and an (in) site by SVD, giving the
/// state `vec(U)/||U||_F` with amplitude index `(out_0, in_0, out_1, in_1, ...)`.
pub fn vectorize_mpo(u: &Mpo) -> Result<VectorizedMpo> {
    let mut sites = Vec::with_capacity(2 * u.n_sites());
    for (i, t) in u.sites().iter().enumerate() {
        let (l, r) = (t.shape()[0], t.shape()[3]);
        // rows (l, out), cols (in, r)
        let m = CMatrix::from_fn(l * 2, 2 * r, |row, col| {
            let (a, outp) = (row / 2, row % 2);
            let (inp, b) = (col / r, col % r);
            t.data()[((a * 2 + inp) * 2 + outp) * r + b]
        });
        let svd = svd_matrix(&m, None)?;
        let k = svd.s.len();
        let mut svh = svd.vh.clone();
        for (j, s) in svd.s.iter().enumerate() {
            svh.row_mut(j).scale_mut(*s);
        }
        sites.push(site_tensor(2 * i, l, k, row_major(&svd.u))?);
        sites.push(site_tensor(2 * i + 1, k, r, row_major(&svh))?);
    }
    let raw = Mps::new(sites)?;
    let (mps, scale) = raw.normalized()?;
    Ok(VectorizedMpo { mps, scale })
}
