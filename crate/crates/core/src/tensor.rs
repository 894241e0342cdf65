//! Dense complex tensors with labelled legs.
//!
//! Data is stored row-major: the last leg varies fastest. Every leg carries a
//! string label that is unique within its tensor, and contractions pair legs
//! by label rather than by position.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Singular values at or below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Label given to the new leg created by [`truncated_svd`].
pub const SVD_LEG: &str = "svd";

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<C64>,
    legs: Vec<String>,
}

impl Tensor {
    pub fn new<S: Into<String>>(shape: Vec<usize>, data: Vec<C64>, legs: Vec<S>) -> Result<Self> {
        let legs: Vec<String> = legs.into_iter().map(Into::into).collect();
        if shape.contains(&0) {
            return Err(Error::InvalidShape(format!("zero dimension in {shape:?}")));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::InvalidShape(format!(
                "shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        if legs.len() != shape.len() {
            return Err(Error::InvalidShape(format!(
                "{} legs for rank-{} tensor",
                legs.len(),
                shape.len()
            )));
        }
        for (i, l) in legs.iter().enumerate() {
            if legs[..i].contains(l) {
                return Err(Error::InvalidShape(format!("duplicate leg label `{l}`")));
            }
        }
        Ok(Self { shape, data, legs })
    }

    pub fn zeros<S: Into<String>>(shape: Vec<usize>, legs: Vec<S>) -> Result<Self> {
        let len = shape.iter().product();
        Self::new(shape, vec![C64::new(0.0, 0.0); len], legs)
    }

    /// Builds a tensor from a matrix, splitting rows and columns into the given legs.
    pub fn from_matrix(
        m: &CMatrix,
        row_legs: &[(&str, usize)],
        col_legs: &[(&str, usize)],
    ) -> Result<Self> {
        let rows: usize = row_legs.iter().map(|l| l.1).product();
        let cols: usize = col_legs.iter().map(|l| l.1).product();
        if rows != m.nrows() || cols != m.ncols() {
            return Err(Error::InvalidShape(format!(
                "matrix is {}x{}, legs describe {rows}x{cols}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        let (legs, shape): (Vec<&str>, Vec<usize>) =
            row_legs.iter().chain(col_legs.iter()).copied().unzip();
        Self::new(shape, data, legs)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn legs(&self) -> &[String] {
        &self.legs
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn leg_index(&self, leg: &str) -> Result<usize> {
        self.legs
            .iter()
            .position(|l| l == leg)
            .ok_or_else(|| Error::UnknownLeg(leg.to_string()))
    }

    pub fn dim(&self, leg: &str) -> Result<usize> {
        Ok(self.shape[self.leg_index(leg)?])
    }

    pub fn relabel(mut self, from: &str, to: &str) -> Result<Self> {
        let i = self.leg_index(from)?;
        if from != to && self.legs.iter().any(|l| l == to) {
            return Err(Error::InvalidShape(format!("duplicate leg label `{to}`")));
        }
        self.legs[i] = to.to_string();
        Ok(self)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * alpha).collect(),
            legs: self.legs.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x.conj()).collect(),
            legs: self.legs.clone(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reorders the legs. `order` must be a permutation of the current labels.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.rank() {
            return Err(Error::InvalidLegOrder(format!(
                "{order:?} is not a permutation of {:?}",
                self.legs
            )));
        }
        let mut perm = Vec::with_capacity(order.len());
        for leg in order {
            let i = self.leg_index(leg)?;
            if perm.contains(&i) {
                return Err(Error::InvalidLegOrder(format!("leg `{leg}` repeated")));
            }
            perm.push(i);
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let old_strides = strides(&self.shape);
        let moved_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; new_shape.len()];
        let mut offset = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[offset]);
            // odometer increment over the new index order
            for ax in (0..new_shape.len()).rev() {
                idx[ax] += 1;
                offset += moved_strides[ax];
                if idx[ax] < new_shape[ax] {
                    break;
                }
                offset -= moved_strides[ax] * new_shape[ax];
                idx[ax] = 0;
            }
        }
        Ok(Self {
            shape: new_shape,
            data,
            legs: order.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Permutes to `order`, then merges each group of adjacent legs into one.
    ///
    /// Groups must cover the permuted legs in order; a merged leg is labelled by
    /// joining its members with `*`.
    pub fn permute_reshape(&self, order: &[&str], groups: &[&[&str]]) -> Result<Self> {
        let p = self.permute(order)?;
        let flat: Vec<&str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        if flat != order {
            return Err(Error::InvalidLegOrder(format!(
                "groups {groups:?} are not a contiguous partition of {order:?}"
            )));
        }
        if groups.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidLegOrder("empty merge group".into()));
        }
        let mut shape = Vec::with_capacity(groups.len());
        let mut legs = Vec::with_capacity(groups.len());
        let mut at = 0;
        for g in groups {
            shape.push(p.shape[at..at + g.len()].iter().product());
            legs.push(g.join("*"));
            at += g.len();
        }
        Self::new(shape, p.data, legs)
    }

    /// Splits one leg into several with the given dimensions and labels.
    pub fn split_leg(&self, leg: &str, parts: &[(&str, usize)]) -> Result<Self> {
        let i = self.leg_index(leg)?;
        let d: usize = parts.iter().map(|p| p.1).product();
        if d != self.shape[i] {
            return Err(Error::InvalidShape(format!(
                "cannot split leg `{leg}` of dimension {} into {parts:?}",
                self.shape[i]
            )));
        }
        let mut shape = self.shape[..i].to_vec();
        let mut legs = self.legs[..i].to_vec();
        for (l, d) in parts {
            shape.push(*d);
            legs.push(l.to_string());
        }
        shape.extend_from_slice(&self.shape[i + 1..]);
        legs.extend_from_slice(&self.legs[i + 1..]);
        Self::new(shape, self.data.clone(), legs)
    }

    /// Flattens into a matrix with `row_legs` (in that order) as rows and the
    /// remaining legs, in their current order, as columns.
    pub fn to_matrix(&self, row_legs: &[&str]) -> Result<CMatrix> {
        let col_legs: Vec<&str> = self
            .legs
            .iter()
            .map(String::as_str)
            .filter(|l| !row_legs.contains(l))
            .collect();
        let order: Vec<&str> = row_legs.iter().chain(col_legs.iter()).copied().collect();
        let p = self.permute(&order)?;
        let rows: usize = p.shape[..row_legs.len()].iter().product();
        let cols = p.data.len() / rows;
        Ok(CMatrix::from_row_slice(rows, cols, &p.data))
    }
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub fn frobenius_norm(t: &Tensor) -> f64 {
    t.frobenius_norm()
}

/// Sums over each paired leg. Result legs are `a`'s free legs followed by `b`'s.
pub fn contract(a: &Tensor, b: &Tensor, pairs: &[(&str, &str)]) -> Result<Tensor> {
    for (la, lb) in pairs {
        let da = a.dim(la)?;
        let db = b.dim(lb)?;
        if da != db {
            return Err(Error::DimensionMismatch {
                a: la.to_string(),
                b: lb.to_string(),
                da,
                db,
            });
        }
    }
    let paired_a: Vec<&str> = pairs.iter().map(|p| p.0).collect();
    let paired_b: Vec<&str> = pairs.iter().map(|p| p.1).collect();
    let free_a: Vec<&str> = a
        .legs
        .iter()
        .map(String::as_str)
        .filter(|l| !paired_a.contains(l))
        .collect();
    let free_b: Vec<&str> = b
        .legs
        .iter()
        .map(String::as_str)
        .filter(|l| !paired_b.contains(l))
        .collect();
    for l in &free_b {
        if free_a.contains(l) {
            return Err(Error::InvalidShape(format!(
                "free leg `{l}` appears in both operands"
            )));
        }
    }
    let ma = a.to_matrix(&free_a)?;
    let mb = b.to_matrix(&paired_b)?;
    let prod = ma * mb;
    let mut shape = Vec::new();
    let mut legs = Vec::new();
    for l in &free_a {
        shape.push(a.dim(l)?);
        legs.push(l.to_string());
    }
    for l in &free_b {
        shape.push(b.dim(l)?);
        legs.push(l.to_string());
    }
    let data = row_major(&prod);
    if shape.is_empty() {
        return Tensor::new(vec![1], data, vec!["scalar"]);
    }
    Tensor::new(shape, data, legs)
}

pub(crate) fn row_major(m: &CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Row legs followed by the new `svd` leg; columns orthonormal.
    pub u: Tensor,
    /// Descending, non-negative.
    pub s: Vec<f64>,
    /// The `svd` leg followed by the column legs; rows orthonormal.
    pub vh: Tensor,
    pub discarded_weight: f64,
}

impl SvdResult {
    pub fn kept(&self) -> usize {
        self.s.len()
    }
}

/// Matrix-level outcome of [`svd_matrix`].
#[derive(Clone, Debug)]
pub struct MatrixSvd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub vh: CMatrix,
    pub rank: usize,
    pub discarded_weight: f64,
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// `log2(n)` for a power of two, `None` otherwise.
pub fn exact_log2(n: usize) -> Option<usize> {
    is_power_of_two(n).then(|| n.trailing_zeros() as usize)
}

/// Thin SVD `m = u diag(s) vh` with `s` descending. Backed by faer, whose
/// bidiagonal solver stays accurate on rank-deficient inputs.
pub fn thin_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (CMatrix::zeros(rows, 0), Vec::new(), CMatrix::zeros(0, cols));
    }
    let a = faer::Mat::<faer::c64>::from_fn(rows, cols, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let svd = a.thin_svd().expect("SVD converges for finite input");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let uu = CMatrix::from_fn(rows, k, |i, j| {
        let z = u[(i, j)];
        C64::new(z.re, z.im)
    });
    let vh = CMatrix::from_fn(k, cols, |i, j| {
        let z = v[(j, i)];
        C64::new(z.re, -z.im)
    });
    let sv = (0..k).map(|j| s[j].re).collect();
    (uu, sv, vh)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    thin_svd(m).1
}

/// SVD of a matrix keeping `min(max_keep, 2^ceil(log2 rank))` components.
///
/// When the power-of-two rounding exceeds the numerical rank the extra
/// components are the (orthonormal) singular vectors of the numerically zero
/// singular values, so nothing is lost. If the rounded size exceeds
/// `min(rows, cols)` (only possible for non-power-of-two shapes) the
/// remainder is zero-padded.
pub fn svd_matrix(m: &CMatrix, max_keep: Option<usize>) -> Result<MatrixSvd> {
    if let Some(k) = max_keep {
        if !is_power_of_two(k) {
            return Err(Error::InvalidArgument(format!(
                "max_keep {k} is not a power of two"
            )));
        }
    }
    let (rows, cols) = m.shape();
    let (u, sv, vt) = thin_svd(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv
        .iter()
        .filter(|&&x| x > RANK_TOLERANCE * smax && x > 0.0)
        .count();
    let mut keep = rank.max(1).next_power_of_two();
    if let Some(cap) = max_keep {
        keep = keep.min(cap);
    }
    // numerically zero singular values count as exactly zero
    let weight = |x: &f64| {
        if *x > RANK_TOLERANCE * smax {
            x * x
        } else {
            0.0
        }
    };
    let total: f64 = sv.iter().map(weight).sum();
    let discarded: f64 = sv.iter().skip(keep).map(weight).sum();
    let discarded_weight = if total > 0.0 { discarded / total } else { 0.0 };

    let avail = sv.len();
    let mut uk = CMatrix::zeros(rows, keep);
    let mut vk = CMatrix::zeros(keep, cols);
    let mut s = vec![0.0; keep];
    for j in 0..keep.min(avail) {
        uk.set_column(j, &u.column(j));
        vk.set_row(j, &vt.row(j));
        s[j] = sv[j];
    }
    Ok(MatrixSvd {
        u: uk,
        s,
        vh: vk,
        rank,
        discarded_weight,
    })
}

/// SVD with `row_legs` as the row space. The new bond leg is labelled [`SVD_LEG`].
pub fn truncated_svd(t: &Tensor, row_legs: &[&str], max_keep: Option<usize>) -> Result<SvdResult> {
    if row_legs.is_empty() || row_legs.len() >= t.rank() {
        return Err(Error::InvalidArgument(
            "row legs must be a non-empty proper subset of the tensor legs".into(),
        ));
    }
    let m = t.to_matrix(row_legs)?;
    let res = svd_matrix(&m, max_keep)?;
    let k = res.s.len();
    let mut row_spec = Vec::new();
    for l in row_legs {
        row_spec.push((*l, t.dim(l)?));
    }
    let mut col_spec = Vec::new();
    for l in t.legs() {
        if !row_legs.contains(&l.as_str()) {
            col_spec.push((l.as_str(), t.dim(l)?));
        }
    }
    let u = Tensor::from_matrix(&res.u, &row_spec, &[(SVD_LEG, k)])?;
    let vh = Tensor::from_matrix(&res.vh, &[(SVD_LEG, k)], &col_spec)?;
    Ok(SvdResult {
        u,
        s: res.s,
        vh,
        discarded_weight: res.discarded_weight,
    })
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|v†v - I|`.
pub fn isometry_deviation(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Extends an isometry (orthonormal columns) to a square unitary.
///
/// The first columns are copied verbatim; the rest come from Gram-Schmidt over
/// the canonical basis vectors in index order, skipping candidates that are
/// numerically dependent on the columns already present.
pub fn complete_isometry(v: &CMatrix) -> Result<CMatrix> {
    let (m, c) = v.shape();
    if c > m {
        return Err(Error::InvalidArgument(format!(
            "{c} columns cannot be orthonormal in dimension {m}"
        )));
    }
    let dev = isometry_deviation(v);
    if dev > 1e-10 {
        return Err(Error::NotIsometric(dev));
    }
    let mut out = CMatrix::zeros(m, m);
    for j in 0..c {
        out.set_column(j, &v.column(j));
    }
    let mut filled = c;
    let mut cand = vec![C64::new(0.0, 0.0); m];
    for e in 0..m {
        if filled == m {
            break;
        }
        cand.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        cand[e] = C64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for j in 0..filled {
                let col = out.column(j);
                let mut dot = C64::new(0.0, 0.0);
                for r in 0..m {
                    dot += col[r].conj() * cand[r];
                }
                for r in 0..m {
                    cand[r] -= col[r] * dot;
                }
            }
        }
        let norm = cand.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for r in 0..m {
            out[(r, filled)] = cand[r] / norm;
        }
        filled += 1;
    }
    if filled < m {
        return Err(Error::Internal(format!(
            "orthonormal completion stalled at {filled} of {m} columns"
        )));
    }
    Ok(out)
}

/// Thin QR: `m = q * r` with `q` having orthonormal columns.
pub fn qr_thin(m: &CMatrix) -> (CMatrix, CMatrix) {
    let qr = m.clone().qr();
    (qr.q(), qr.r())
}

/// Thin LQ: `m = l * q` with `q` having orthonormal rows.
pub fn lq_thin(m: &CMatrix) -> (CMatrix, CMatrix) {
    let (q, r) = qr_thin(&m.adjoint());
    (r.adjoint(), q.adjoint())
}

/// Haar-random `d x d` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal folded into `Q`.
pub fn random_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let a = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_tensor(shape: &[usize], legs: &[&str], seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Tensor::new(shape.to_vec(), data, legs.to_vec()).unwrap()
    }

    fn random_isometry(m: usize, k: usize, seed: u64) -> CMatrix {
        let t = random_tensor(&[m, k], &["r", "c"], seed);
        qr_thin(&t.to_matrix(&["r"]).unwrap()).0
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Tensor::new(vec![2, 2], vec![c(0.0); 3], vec!["a", "b"]).is_err());
        assert!(Tensor::new(vec![2, 2], vec![c(0.0); 4], vec!["a", "a"]).is_err());
        assert!(Tensor::new(vec![2], vec![c(0.0); 2], vec!["a", "b"]).is_err());
    }

    #[test]
    fn identity_contraction_returns_vector() {
        let id = Tensor::new(
            vec![2, 2],
            vec![c(1.0), c(0.0), c(0.0), c(1.0)],
            vec!["i", "j"],
        )
        .unwrap();
        let v = Tensor::new(vec![2], vec![C64::new(0.3, 0.1), c(-2.0)], vec!["k"]).unwrap();
        let out = contract(&id, &v, &[("j", "k")]).unwrap();
        assert_eq!(out.legs(), &["i".to_string()]);
        assert_eq!(out.data(), v.data());
    }

    #[test]
    fn contraction_matches_triple_loop() {
        let a = random_tensor(&[2, 3], &["i", "k"], 1);
        let b = random_tensor(&[3, 4], &["k2", "j"], 2);
        let out = contract(&a, &b, &[("k", "k2")]).unwrap();
        assert_eq!(out.shape(), &[2, 4]);
        for i in 0..2 {
            for j in 0..4 {
                let mut acc = c(0.0);
                for k in 0..3 {
                    acc += a.data()[i * 3 + k] * b.data()[k * 4 + j];
                }
                assert!((out.data()[i * 4 + j] - acc).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn normalised_self_overlap_is_one() {
        let x = random_tensor(&[2], &["p"], 3);
        let x = x.scale(c(1.0 / x.frobenius_norm()));
        let out = contract(&x, &x.conj(), &[("p", "p")]).unwrap();
        assert!((out.data()[0] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn contract_errors() {
        let a = random_tensor(&[2, 3], &["i", "k"], 1);
        let b = random_tensor(&[2, 4], &["k", "j"], 2);
        assert!(matches!(
            contract(&a, &b, &[("k", "k")]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            contract(&a, &b, &[("zz", "k")]),
            Err(Error::UnknownLeg(_))
        ));
    }

    #[test]
    fn reshape_round_trip_and_transpose() {
        let t = random_tensor(&[2, 2], &["a", "b"], 4);
        let merged = t.permute_reshape(&["a", "b"], &[&["a", "b"]]).unwrap();
        assert_eq!(merged.shape(), &[4]);
        let back = merged.split_leg("a*b", &[("a", 2), ("b", 2)]).unwrap();
        assert_eq!(back, t);

        let m = random_tensor(&[2, 3], &["r", "c"], 5);
        let tr = m.permute(&["c", "r"]).unwrap();
        assert_eq!(tr.shape(), &[3, 2]);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(tr.data()[j * 2 + i], m.data()[i * 3 + j]);
            }
        }
    }

    #[test]
    fn merge_matches_index_arithmetic() {
        let t = random_tensor(&[2, 2, 4], &["p0", "p1", "x"], 6);
        let m = t
            .permute_reshape(&["p0", "p1", "x"], &[&["p0", "p1"], &["x"]])
            .unwrap();
        assert_eq!(m.shape(), &[4, 4]);
        for p0 in 0..2 {
            for p1 in 0..2 {
                for x in 0..4 {
                    let merged = p0 * 2 + p1;
                    assert_eq!(m.data()[merged * 4 + x], t.data()[(p0 * 2 + p1) * 4 + x]);
                }
            }
        }
    }

    #[test]
    fn permute_reshape_errors() {
        let t = random_tensor(&[2, 3], &["a", "b"], 7);
        assert!(t.permute(&["a", "a"]).is_err());
        assert!(t.permute(&["a"]).is_err());
        assert!(t.permute_reshape(&["a", "b"], &[&["b"], &["a"]]).is_err());
    }

    #[test]
    fn rank_one_svd() {
        let u = [C64::new(1.0, 1.0), c(2.0)];
        let v = [c(3.0), C64::new(0.0, -1.0), c(0.5)];
        let data: Vec<C64> = u
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
        let t = Tensor::new(vec![2, 3], data, vec!["r", "c"]).unwrap();
        let res = truncated_svd(&t, &["r"], None).unwrap();
        let nu = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert_eq!(res.s.len(), 1);
        assert!((res.s[0] - nu * nv).abs() < 1e-12);
        assert_eq!(res.discarded_weight, 0.0);
    }

    #[test]
    fn capped_svd_discarded_weight_matches_full_spectrum() {
        let t = random_tensor(&[4, 4], &["r", "c"], 8);
        let full = singular_values(&t.to_matrix(&["r"]).unwrap());
        let res = truncated_svd(&t, &["r"], Some(2)).unwrap();
        let total: f64 = full.iter().map(|s| s * s).sum();
        let expected = (full[2] * full[2] + full[3] * full[3]) / total;
        assert_eq!(res.s.len(), 2);
        assert!((res.discarded_weight - expected).abs() < 1e-12);
    }

    #[test]
    fn scaled_identity_svd_keeps_everything() {
        let mut m = CMatrix::identity(8, 8);
        m /= c(8f64.sqrt());
        let t = Tensor::from_matrix(&m, &[("r", 8)], &[("c", 8)]).unwrap();
        let res = truncated_svd(&t, &["r"], None).unwrap();
        assert_eq!(res.s.len(), 8);
        for s in &res.s {
            assert!((s - 1.0 / 8f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_three_pads_to_four() {
        // rank-3 4x4 matrix
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(3.0);
        m[(1, 1)] = c(2.0);
        m[(2, 2)] = c(1.0);
        let t = Tensor::from_matrix(&m, &[("r", 4)], &[("c", 4)]).unwrap();
        let res = truncated_svd(&t, &["r"], None).unwrap();
        assert_eq!(res.s.len(), 4);
        assert!(res.s[3].abs() < 1e-14);
        let u = res.u.to_matrix(&["r"]).unwrap();
        assert!(isometry_deviation(&u) < 1e-12);
        let vh = res.vh.to_matrix(&[SVD_LEG]).unwrap();
        assert!(isometry_deviation(&vh.adjoint()) < 1e-12);
    }

    #[test]
    fn svd_argument_errors() {
        let t = random_tensor(&[2, 2], &["a", "b"], 9);
        assert!(truncated_svd(&t, &[], None).is_err());
        assert!(truncated_svd(&t, &["a", "b"], None).is_err());
        assert!(truncated_svd(&t, &["a"], Some(3)).is_err());
    }

    #[test]
    fn completion_of_unitary_and_basis_column() {
        let id = CMatrix::identity(4, 4);
        assert_eq!(complete_isometry(&id).unwrap(), id);
        let col = CMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let u = complete_isometry(&col).unwrap();
        assert!((u - CMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn completion_extends_random_isometry() {
        let v = random_isometry(4, 2, 10);
        let u = complete_isometry(&v).unwrap();
        assert!(isometry_deviation(&u) < 1e-10);
        for j in 0..2 {
            assert_eq!(u.column(j), v.column(j));
        }
    }

    #[test]
    fn completion_rejects_non_isometry() {
        let v = CMatrix::from_column_slice(2, 1, &[c(1.0), c(1.0)]);
        assert!(matches!(complete_isometry(&v), Err(Error::NotIsometric(_))));
    }

    #[test]
    fn frobenius_norms() {
        let z = Tensor::zeros(vec![3, 2], vec!["a", "b"]).unwrap();
        assert_eq!(frobenius_norm(&z), 0.0);
        let id = CMatrix::identity(8, 8);
        let t = Tensor::from_matrix(&id, &[("o", 8)], &[("i", 8)]).unwrap();
        assert!((frobenius_norm(&t) - 8f64.sqrt()).abs() < 1e-14);
        let r = random_tensor(&[3, 5], &["a", "b"], 11);
        let direct: f64 = r
            .data()
            .iter()
            .map(|x| x.re * x.re + x.im * x.im)
            .sum::<f64>()
            .sqrt();
        assert!((frobenius_norm(&r) - direct).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn untruncated_svd_reconstructs(r in 1usize..7, c_ in 1usize..7, seed in 0u64..10_000) {
                let t = random_tensor(&[r, c_], &["r", "c"], seed);
                let res = truncated_svd(&t, &["r"], None).unwrap();
                let u = res.u.to_matrix(&["r"]).unwrap();
                let vh = res.vh.to_matrix(&[SVD_LEG]).unwrap();
                let s = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    res.s.len(), res.s.iter().map(|&x| C64::new(x, 0.0))));
                let rec = u * s * vh;
                let m = t.to_matrix(&["r"]).unwrap();
                prop_assert!((rec - &m).norm() <= 1e-10 * m.norm());
                prop_assert!(res.s.windows(2).all(|w| w[0] >= w[1]));
            }

            #[test]
            fn eckart_young_consistency(r in 2usize..7, c_ in 2usize..7, seed in 0u64..10_000) {
                let t = random_tensor(&[r, c_], &["r", "c"], seed);
                let res = truncated_svd(&t, &["r"], Some(1)).unwrap();
                let u = res.u.to_matrix(&["r"]).unwrap();
                let vh = res.vh.to_matrix(&[SVD_LEG]).unwrap();
                let approx = u * C64::new(res.s[0], 0.0) * vh;
                let m = t.to_matrix(&["r"]).unwrap();
                let ratio = approx.norm_squared() / m.norm_squared();
                prop_assert!((1.0 - res.discarded_weight - ratio).abs() < 1e-10);
            }

        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn completion_is_unitary_extension(m in 1usize..17, frac in 0.0f64..1.0, seed in 0u64..10_000) {
                let k = ((m as f64 * frac) as usize).clamp(1, m.min(8));
                let v = random_isometry(m, k, seed);
                let u = complete_isometry(&v).unwrap();
                prop_assert!(isometry_deviation(&u) < 1e-10);
                for j in 0..k {
                    prop_assert_eq!(u.column(j), v.column(j));
                }
            }

            #[test]
            fn contraction_is_bilinear(re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0u64..10_000) {
                let a = random_tensor(&[2, 3], &["i", "k"], seed);
                let b = random_tensor(&[3, 2], &["k", "j"], seed + 1);
                let alpha = C64::new(re, im);
                let lhs = contract(&a.scale(alpha), &b, &[("k", "k")]).unwrap();
                let rhs = contract(&a, &b, &[("k", "k")]).unwrap().scale(alpha);
                for (x, y) in lhs.data().iter().zip(rhs.data()) {
                    prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
                }
            }
        }
    }
}
