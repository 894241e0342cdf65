use serde::{Deserialize, Serialize};

use super::Mps;
use crate::error::{Error, Result};
use crate::tensor::C64;

/// One site of a serialised chain: shape plus flat row-major real/imag parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteRecord {
    pub shape: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// On-disk MPS: `{"n_sites": N, "sites": [{"shape": [l, 2, r], "re": [...], "im": [...]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub n_sites: usize,
    pub sites: Vec<SiteRecord>,
}

impl Mps {
    pub fn to_chain_file(&self) -> ChainFile {
        ChainFile {
            n_sites: self.n_sites(),
            sites: self
                .sites()
                .iter()
                .map(|t| SiteRecord {
                    shape: t.shape().to_vec(),
                    re: t.data().iter().map(|z| z.re).collect(),
                    im: t.data().iter().map(|z| z.im).collect(),
                })
                .collect(),
        }
    }

    pub fn from_chain_file(f: &ChainFile) -> Result<Mps> {
        if f.n_sites != f.sites.len() {
            return Err(Error::SizeMismatch {
                expected: f.n_sites,
                got: f.sites.len(),
            });
        }
        let sites = f
            .sites
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.shape.len() != 3 {
                    return Err(Error::InvalidShape(format!(
                        "site {i} shape must have 3 entries"
                    )));
                }
                if s.re.len() != s.im.len() {
                    return Err(Error::InvalidShape(format!(
                        "site {i} re/im lengths differ"
                    )));
                }
                let data =
                    s.re.iter()
                        .zip(&s.im)
                        .map(|(&a, &b)| C64::new(a, b))
                        .collect();
                if s.shape[1] != super::PHYS_DIM {
                    return Err(Error::InvalidShape(format!(
                        "site {i} physical dimension must be 2"
                    )));
                }
                Ok((s.shape[0], s.shape[2], data))
            })
            .collect::<Result<Vec<_>>>()?;
        Mps::from_arrays(sites)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(&self.to_chain_file())
    }

    pub fn from_json(text: &str) -> Result<Mps> {
        let f: ChainFile = serde_json::from_str(text)?;
        Mps::from_chain_file(&f)
    }
}
