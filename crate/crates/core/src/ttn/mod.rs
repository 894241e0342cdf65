//! Binary tree tensor networks built from an MPS by layered merge + SVD.
//!
//! Each layer right-canonicalises the working chain, then merges neighbours
//! `(0,1), (2,3), ...` left to right. A merge contracts the shared bond into
//! `T[l, pa, pb, r]` and splits it with the child legs `(pa, pb)` as rows, so
//! `u` is the isometry toward the leaves and `s·vh` becomes the new chain node
//! `(l, k, r)`. The orthogonality centre is then moved onto the next unmerged
//! node by QR so every truncation sees isometric environments.

mod bound;
mod to_circuit;

pub use bound::{predict_max_gate_qubits, shape_only_max_gate_qubits, GateSizeBound};
pub use to_circuit::{staircase_circuit, ttn_to_circuit};

use std::ops::Range;

use crate::error::{Error, Result};
use crate::mps::{Mps, Statevector, MAX_STATEVECTOR_QUBITS};
use crate::tensor::{
    exact_log2, is_power_of_two, isometry_deviation, lq_thin, qr_thin, row_major, svd_matrix,
    CMatrix, Tensor, C64,
};

/// Allowed deviation of the input norm from one.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Where a node input comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Child {
    /// A physical site (its qubit index).
    Leaf(usize),
    Node {
        layer: usize,
        index: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TtnNode {
    /// Shape `[da, db, k]`, legs `(c0, c1, up)`; an isometry from `up` to `(c0, c1)`.
    pub tensor: Tensor,
    pub children: [Child; 2],
    /// Qubits the node's gate acts on: the children's input qubits, left then right.
    pub qubits: Vec<usize>,
    /// The first `log2 k` of `qubits`, which carry the parent's state.
    pub up_qubits: Vec<usize>,
    pub leaves: Range<usize>,
    pub discarded_weight: f64,
}

impl TtnNode {
    pub fn up_dim(&self) -> usize {
        self.tensor.shape()[2]
    }

    pub fn child_dims(&self) -> (usize, usize) {
        (self.tensor.shape()[0], self.tensor.shape()[1])
    }

    /// `(da*db) x k` isometry.
    pub fn isometry(&self) -> CMatrix {
        self.tensor.to_matrix(&["c0", "c1"]).expect("node legs")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ttn {
    n_sites: usize,
    layers: Vec<Vec<TtnNode>>,
    root: Vec<C64>,
    root_child: Child,
    root_qubits: Vec<usize>,
    leaf_map: Vec<usize>,
    total_discarded_weight: f64,
}

#[derive(Clone, Debug)]
struct Element {
    l: usize,
    d: usize,
    r: usize,
    data: Vec<C64>,
    source: Child,
    in_qubits: Vec<usize>,
    leaves: Range<usize>,
}

impl Element {
    fn left_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.l * self.d, self.r, &self.data)
    }

    fn right_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.l, self.d * self.r, &self.data)
    }
}

fn right_canonicalize(chain: &mut [Element]) {
    for i in (1..chain.len()).rev() {
        let (lf, q) = lq_thin(&chain[i].right_matrix());
        let k = q.nrows();
        chain[i].l = k;
        chain[i].data = row_major(&q);
        let prev = chain[i - 1].left_matrix() * lf;
        chain[i - 1].r = k;
        chain[i - 1].data = row_major(&prev);
    }
}

fn qubit_count(dim: usize) -> Result<usize> {
    exact_log2(dim)
        .ok_or_else(|| Error::Internal(format!("node dimension {dim} is not a power of two")))
}

/// Converts a normalised MPS into a TTN with `ceil(log2 N)` layers, keeping at
/// most `max_bond` singular values per merge.
pub fn renormalize(m: &Mps, max_bond: Option<usize>) -> Result<Ttn> {
    if let Some(b) = max_bond {
        if !is_power_of_two(b) {
            return Err(Error::InvalidArgument(format!(
                "max_bond {b} is not a power of two"
            )));
        }
    }
    let norm = m.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let n = m.n_sites();
    let padded = m.pad_bonds_pow2();
    let mut chain: Vec<Element> = padded
        .sites()
        .iter()
        .enumerate()
        .map(|(i, t)| Element {
            l: t.shape()[0],
            d: t.shape()[1],
            r: t.shape()[2],
            data: t.data().to_vec(),
            source: Child::Leaf(i),
            in_qubits: vec![i],
            leaves: i..i + 1,
        })
        .collect();

    let mut layers = Vec::new();
    let mut total = 0.0;
    while chain.len() > 1 {
        let layer_idx = layers.len();
        right_canonicalize(&mut chain);
        let mut nodes = Vec::new();
        let mut next_chain = Vec::with_capacity(chain.len().div_ceil(2));
        let mut i = 0;
        while i < chain.len() {
            if i + 1 == chain.len() {
                next_chain.push(chain[i].clone());
                break;
            }
            let (a, b) = (&chain[i], &chain[i + 1]);
            let (l, r, da, db) = (a.l, b.r, a.d, b.d);
            // P[(x, pa), (pb, y)] = sum_m a[x, pa, m] b[m, pb, y]
            let p = a.left_matrix() * b.right_matrix();
            let mat = CMatrix::from_fn(da * db, l * r, |row, col| {
                let (pa, pb) = (row / db, row % db);
                let (x, y) = (col / r, col % r);
                p[(x * da + pa, pb * r + y)]
            });
            let svd = svd_matrix(&mat, max_bond)?;
            let k = svd.s.len();
            total += svd.discarded_weight;
            let mut data = vec![C64::new(0.0, 0.0); l * k * r];
            for j in 0..k {
                for x in 0..l {
                    for y in 0..r {
                        data[(x * k + j) * r + y] = svd.vh[(j, x * r + y)] * svd.s[j];
                    }
                }
            }
            let mut qubits = a.in_qubits.clone();
            qubits.extend_from_slice(&b.in_qubits);
            let up_qubits = qubits[..qubit_count(k)?].to_vec();
            let leaves = a.leaves.start..b.leaves.end;
            nodes.push(TtnNode {
                tensor: Tensor::from_matrix(&svd.u, &[("c0", da), ("c1", db)], &[("up", k)])?,
                children: [a.source, b.source],
                qubits,
                up_qubits: up_qubits.clone(),
                leaves: leaves.clone(),
                discarded_weight: svd.discarded_weight,
            });
            let mut el = Element {
                l,
                d: k,
                r,
                data,
                source: Child::Node {
                    layer: layer_idx,
                    index: nodes.len() - 1,
                },
                in_qubits: up_qubits,
                leaves,
            };
            if i + 2 < chain.len() {
                let (q, rm) = qr_thin(&el.left_matrix());
                let nr = q.ncols();
                el.r = nr;
                el.data = row_major(&q);
                let next = &mut chain[i + 2];
                let moved = rm * next.right_matrix();
                next.l = nr;
                next.data = row_major(&moved);
            }
            next_chain.push(el);
            i += 2;
        }
        layers.push(nodes);
        chain = next_chain;
    }
    let top = chain.pop().expect("non-empty chain");
    Ok(Ttn {
        n_sites: n,
        layers,
        root: top.data,
        root_child: top.source,
        root_qubits: top.in_qubits,
        leaf_map: (0..n).collect(),
        total_discarded_weight: total,
    })
}

impl Ttn {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn layers(&self) -> &[Vec<TtnNode>] {
        &self.layers
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn node(&self, layer: usize, index: usize) -> &TtnNode {
        &self.layers[layer][index]
    }

    /// The non-isometric top tensor as a vector over the root qubits.
    pub fn root(&self) -> &[C64] {
        &self.root
    }

    pub fn root_child(&self) -> Child {
        self.root_child
    }

    pub fn root_qubits(&self) -> &[usize] {
        &self.root_qubits
    }

    /// `leaf_map()[site]` is the qubit carrying that site's physical leg.
    pub fn leaf_map(&self) -> &[usize] {
        &self.leaf_map
    }

    pub fn total_discarded_weight(&self) -> f64 {
        self.total_discarded_weight
    }

    pub fn root_norm(&self) -> f64 {
        self.root.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest bond (`up` dimension) anywhere in the tree.
    pub fn max_bond(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(TtnNode::up_dim)
            .max()
            .unwrap_or(1)
            .max(self.root.len())
    }

    /// Largest gate the circuit mapping will emit (before product factoring).
    pub fn max_gate_qubits(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(|n| n.qubits.len())
            .max()
            .unwrap_or(0)
            .max(self.root_qubits.len())
    }

    pub fn max_isometry_deviation(&self) -> f64 {
        self.layers
            .iter()
            .flatten()
            .map(|n| isometry_deviation(&n.isometry()))
            .fold(0.0, f64::max)
    }

    /// `2^|leaves| x k` matrix mapping the child's input to its leaf amplitudes.
    fn subtree_matrix(&self, c: Child) -> CMatrix {
        match c {
            Child::Leaf(_) => CMatrix::identity(2, 2),
            Child::Node { layer, index } => {
                let node = &self.layers[layer][index];
                let a = self.subtree_matrix(node.children[0]);
                let b = self.subtree_matrix(node.children[1]);
                a.kronecker(&b) * node.isometry()
            }
        }
    }

    /// Full contraction, including the root scalar/vector.
    pub fn to_statevector(&self) -> Result<Statevector> {
        if self.n_sites > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Capacity(format!("{} sites", self.n_sites)));
        }
        let m = self.subtree_matrix(self.root_child);
        let root = nalgebra::DVector::from_column_slice(&self.root);
        Statevector::new(self.n_sites, (m * root).iter().copied().collect())
    }
}
