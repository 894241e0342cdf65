//! Matrix product states and operators.
//!
//! Site `i` of an [`Mps`] has legs `(b{i}, p{i}, b{i+1})`; an [`Mpo`] site has
//! `(b{i}, i{i}, o{i}, b{i+1})`. Bond labels are shared between neighbours so
//! chains contract by label. Site 0 is qubit 0, the most significant bit of a
//! statevector index.

mod io;
mod mpo;
mod statevector;

pub use io::{ChainFile, SiteRecord};
pub use mpo::{mcz_mpo, pauli_exp_mpo, vectorize_mpo, Mpo, VectorizedMpo, MAX_DENSE_MPO_QUBITS};
pub use statevector::{fidelity, Statevector, MAX_STATEVECTOR_QUBITS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{is_power_of_two, lq_thin, qr_thin, row_major, CMatrix, Tensor, C64};

pub const PHYS_DIM: usize = 2;

/// Tolerance for the left/right isometry checks on canonical sites.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;

pub(crate) fn bond_label(i: usize) -> String {
    format!("b{i}")
}

fn phys_label(i: usize) -> String {
    format!("p{i}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    sites: Vec<Tensor>,
    ortho_center: Option<usize>,
}

/// Entry distribution for [`random_mps_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Real and imaginary parts i.i.d. normal with variance 1/2.
    ComplexGaussian,
    /// Real entries i.i.d. uniform on `[0, 1)`.
    #[default]
    UniformReal,
    /// Real and imaginary parts i.i.d. uniform on `[0, 1)`.
    UniformComplex,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [
        Ensemble::ComplexGaussian,
        Ensemble::UniformReal,
        Ensemble::UniformComplex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::ComplexGaussian => "complex_gaussian",
            Ensemble::UniformReal => "uniform_real",
            Ensemble::UniformComplex => "uniform_complex",
        }
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown ensemble `{s}`")))
    }
}

impl Mps {
    /// Validates and relabels a chain of rank-3 `(left, phys, right)` tensors.
    pub fn new(sites: Vec<Tensor>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidShape("an MPS needs at least one site".into()));
        }
        let n = sites.len();
        let mut out = Vec::with_capacity(n);
        for (i, t) in sites.into_iter().enumerate() {
            if t.rank() != 3 {
                return Err(Error::InvalidShape(format!(
                    "site {i} has rank {}",
                    t.rank()
                )));
            }
            let s = t.shape();
            if s[1] != PHYS_DIM {
                return Err(Error::InvalidShape(format!(
                    "site {i} has physical dimension {}",
                    s[1]
                )));
            }
            if (i == 0 && s[0] != 1) || (i == n - 1 && s[2] != 1) {
                return Err(Error::InvalidShape(
                    "boundary bonds must have dimension 1".into(),
                ));
            }
            if let Some(prev) = out.last() {
                let prev: &Tensor = prev;
                if prev.shape()[2] != s[0] {
                    return Err(Error::InvalidShape(format!(
                        "bond {i} mismatch: {} vs {}",
                        prev.shape()[2],
                        s[0]
                    )));
                }
            }
            out.push(site_tensor(i, s[0], s[2], t.into_data())?);
        }
        Ok(Self {
            sites: out,
            ortho_center: None,
        })
    }

    /// Builds from `(left, right, row-major data)` triples.
    pub fn from_arrays(sites: Vec<(usize, usize, Vec<C64>)>) -> Result<Self> {
        let tensors = sites
            .into_iter()
            .enumerate()
            .map(|(i, (l, r, d))| site_tensor(i, l, r, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(tensors)
    }

    /// Computational basis product state; `bits[i]` is qubit `i`.
    pub fn product_state(bits: &[u8]) -> Result<Self> {
        let sites = bits
            .iter()
            .map(|&b| {
                let mut d = vec![C64::new(0.0, 0.0); 2];
                d[(b & 1) as usize] = C64::new(1.0, 0.0);
                (1, 1, d)
            })
            .collect();
        let mut m = Self::from_arrays(sites)?;
        m.ortho_center = Some(0);
        Ok(m)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` with bond dimension 2.
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "GHZ needs at least two qubits".into(),
            ));
        }
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut sites = Vec::with_capacity(n);
        // first: [1, 2, 2] with A[0,p,r] = delta(p,r)/sqrt2
        sites.push((1, 2, vec![h, zero, zero, h]));
        for _ in 1..n - 1 {
            // A[l,p,r] = delta(l,p) delta(p,r)
            let mut d = vec![zero; 8];
            d[0] = one; // l=0,p=0,r=0
            d[7] = one; // l=1,p=1,r=1
            sites.push((2, 2, d));
        }
        sites.push((2, 1, vec![one, zero, zero, one]));
        Self::from_arrays(sites)
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Tensor] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &Tensor {
        &self.sites[i]
    }

    pub fn ortho_center(&self) -> Option<usize> {
        self.ortho_center
    }

    /// `N + 1` bond dimensions including the two unit boundaries.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.sites.len() + 1);
        dims.push(self.sites[0].shape()[0]);
        dims.extend(self.sites.iter().map(|s| s.shape()[2]));
        dims
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn left_matrix(&self, i: usize) -> CMatrix {
        let s = self.sites[i].shape();
        CMatrix::from_row_slice(s[0] * s[1], s[2], self.sites[i].data())
    }

    fn right_matrix(&self, i: usize) -> CMatrix {
        let s = self.sites[i].shape();
        CMatrix::from_row_slice(s[0], s[1] * s[2], self.sites[i].data())
    }

    fn set_site(&mut self, i: usize, l: usize, r: usize, m: &CMatrix) {
        self.sites[i] = site_tensor(i, l, r, row_major(m)).expect("consistent site shape");
    }

    /// Moves the orthogonality centre to `center` by QR sweeps from both ends.
    pub fn canonicalize(&self, center: usize) -> Result<Mps> {
        let n = self.sites.len();
        if center >= n {
            return Err(Error::InvalidArgument(format!(
                "centre {center} out of range for {n} sites"
            )));
        }
        let mut m = self.clone();
        for i in 0..center {
            let l = m.sites[i].shape()[0];
            let (q, r) = qr_thin(&m.left_matrix(i));
            let k = q.ncols();
            m.set_site(i, l, k, &q);
            let next = r * m.right_matrix(i + 1);
            let nr = m.sites[i + 1].shape()[2];
            m.set_site(i + 1, k, nr, &next);
        }
        for i in (center + 1..n).rev() {
            let r = m.sites[i].shape()[2];
            let (lf, q) = lq_thin(&m.right_matrix(i));
            let k = q.nrows();
            m.set_site(i, k, r, &q);
            let prev = m.left_matrix(i - 1) * lf;
            let pl = m.sites[i - 1].shape()[0];
            m.set_site(i - 1, pl, k, &prev);
        }
        m.ortho_center = Some(center);
        Ok(m)
    }

    /// `<self|other>` by transfer-matrix contraction.
    pub fn overlap(&self, other: &Mps) -> Result<C64> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SizeMismatch {
                expected: self.n_sites(),
                got: other.n_sites(),
            });
        }
        // env[a, b]: a indexes self's bond (conjugated), b other's
        let mut env = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for (a, b) in self.sites.iter().zip(&other.sites) {
            let (la, ra) = (a.shape()[0], a.shape()[2]);
            let (lb, rb) = (b.shape()[0], b.shape()[2]);
            let mut next = CMatrix::zeros(ra, rb);
            for p in 0..PHYS_DIM {
                let ap = CMatrix::from_fn(la, ra, |l, r| a.data()[(l * PHYS_DIM + p) * ra + r]);
                let bp = CMatrix::from_fn(lb, rb, |l, r| b.data()[(l * PHYS_DIM + p) * rb + r]);
                next += ap.adjoint() * &env * bp;
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    pub fn norm(&self) -> f64 {
        self.overlap(self)
            .map(|x| x.re.max(0.0).sqrt())
            .unwrap_or(0.0)
    }

    /// Returns the normalised state (centre moved to `N-1`) and the original norm.
    pub fn normalized(&self) -> Result<(Mps, f64)> {
        let center = self.ortho_center.unwrap_or(self.sites.len() - 1);
        let mut m = self.canonicalize(center)?;
        let nrm = m.sites[center].frobenius_norm();
        if nrm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        m.sites[center] = m.sites[center].scale(C64::new(1.0 / nrm, 0.0));
        Ok((m, nrm))
    }

    /// Largest deviation of site `i` from the left-isometry condition.
    pub fn left_isometry_deviation(&self, i: usize) -> f64 {
        crate::tensor::isometry_deviation(&self.left_matrix(i))
    }

    pub fn right_isometry_deviation(&self, i: usize) -> f64 {
        crate::tensor::isometry_deviation(&self.right_matrix(i).adjoint())
    }

    /// Checks the gauge implied by `ortho_center`.
    pub fn is_canonical(&self, tol: f64) -> bool {
        match self.ortho_center {
            None => false,
            Some(c) => {
                (0..c).all(|i| self.left_isometry_deviation(i) <= tol)
                    && (c + 1..self.n_sites()).all(|i| self.right_isometry_deviation(i) <= tol)
            }
        }
    }

    /// Zero-pads every bond up to the next power of two.
    pub fn pad_bonds_pow2(&self) -> Mps {
        let dims = self.bond_dims();
        if dims.iter().all(|&d| is_power_of_two(d)) {
            return self.clone();
        }
        let padded: Vec<usize> = dims.iter().map(|d| d.next_power_of_two()).collect();
        let sites = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (l, r) = (dims[i], dims[i + 1]);
                let (nl, nr) = (padded[i], padded[i + 1]);
                let mut d = vec![C64::new(0.0, 0.0); nl * PHYS_DIM * nr];
                for a in 0..l {
                    for p in 0..PHYS_DIM {
                        for b in 0..r {
                            d[(a * PHYS_DIM + p) * nr + b] = t.data()[(a * PHYS_DIM + p) * r + b];
                        }
                    }
                }
                site_tensor(i, nl, nr, d).expect("padded shape")
            })
            .collect();
        // zero padding leaves isometries isometric only on the original subspace
        Mps {
            sites,
            ortho_center: None,
        }
    }

    /// Dense amplitudes in the site-0-most-significant convention.
    pub fn to_statevector(&self) -> Result<Statevector> {
        let n = self.n_sites();
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Capacity(format!(
                "{n} sites exceeds the {MAX_STATEVECTOR_QUBITS}-qubit statevector limit"
            )));
        }
        // acc[prefix * bond + b]
        let mut acc = vec![C64::new(1.0, 0.0)];
        let mut bond = 1;
        for t in &self.sites {
            let r = t.shape()[2];
            let prefixes = acc.len() / bond;
            let mut next = vec![C64::new(0.0, 0.0); prefixes * PHYS_DIM * r];
            for x in 0..prefixes {
                for l in 0..bond {
                    let a = acc[x * bond + l];
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for p in 0..PHYS_DIM {
                        let row = &t.data()[(l * PHYS_DIM + p) * r..(l * PHYS_DIM + p + 1) * r];
                        let out = &mut next[(x * PHYS_DIM + p) * r..(x * PHYS_DIM + p + 1) * r];
                        for (o, w) in out.iter_mut().zip(row) {
                            *o += a * w;
                        }
                    }
                }
            }
            acc = next;
            bond = r;
        }
        Statevector::new(n, acc)
    }
}

pub(crate) fn site_tensor(i: usize, l: usize, r: usize, data: Vec<C64>) -> Result<Tensor> {
    Tensor::new(
        vec![l, PHYS_DIM, r],
        data,
        vec![bond_label(i), phys_label(i), bond_label(i + 1)],
    )
}

/// Bond dimension at cut `i` of an `n`-site chain capped at `chi`.
pub(crate) fn capped_bond(i: usize, n: usize, chi: usize) -> usize {
    let e = i.min(n - i).min(62);
    chi.min(1usize << e)
}

/// Random normalised MPS with centre at `N-1`; see [`random_mps_with`].
pub fn random_mps(n: usize, chi: usize, seed: u64) -> Result<Mps> {
    random_mps_with(n, chi, seed, Ensemble::default())
}

/// Random MPS with bond dimensions `min(chi, 2^i, 2^(N-i))`, entries drawn from
/// `ensemble`, canonicalised to site `N-1` and normalised.
pub fn random_mps_with(n: usize, chi: usize, seed: u64, ensemble: Ensemble) -> Result<Mps> {
    if n < 2 {
        return Err(Error::InvalidArgument("random_mps needs n >= 2".into()));
    }
    if chi == 0 {
        return Err(Error::InvalidArgument("chi must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let sites = (0..n)
        .map(|i| {
            let l = capped_bond(i, n, chi);
            let r = capped_bond(i + 1, n, chi);
            let data = (0..l * PHYS_DIM * r)
                .map(|_| match ensemble {
                    Ensemble::ComplexGaussian => {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        C64::new(re * scale, im * scale)
                    }
                    Ensemble::UniformReal => C64::new(rng.random::<f64>(), 0.0),
                    Ensemble::UniformComplex => C64::new(rng.random::<f64>(), rng.random::<f64>()),
                })
                .collect();
            (l, r, data)
        })
        .collect();
    let m = Mps::from_arrays(sites)?;
    let mut m = m.canonicalize(n - 1)?;
    let nrm = m.sites[n - 1].frobenius_norm();
    m.sites[n - 1] = m.sites[n - 1].scale(C64::new(1.0 / nrm, 0.0));
    Ok(m)
}
