//! Experiment configuration.

use std::collections::BTreeMap;

use ncprob_core::io::Num;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Model {
    /// `UᵢAᵢUᵢ* + Fᵢ`
    WeakBprime,
    /// `UᵢAᵢUᵢ* + VᵢFᵢVᵢ*`
    Bprime,
    /// `P UᵢAᵢUᵢ* P`; the letter `q` is `Q = I − P` and `p` is `P`.
    Minor,
}

/// Limiting spectrum of a deterministic main matrix. The `N × N` matrix is
/// diagonal: eigenvalue lists are repeated in equal consecutive blocks,
/// the semicircle (of the given variance) is discretized at its quantiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spectrum {
    Eigenvalues(Vec<Num>),
    Semicircle(Num),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainSpec {
    pub name: String,
    pub group: String,
    pub spectrum: Spectrum,
}

/// `diag(f₁, …, f_r, 0, …, 0)`, of rank independent of `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PertSpec {
    pub name: String,
    pub group: String,
    pub eigenvalues: Vec<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub model: Model,
    pub mains: Vec<MainSpec>,
    #[serde(default)]
    pub perts: Vec<PertSpec>,
    pub seed: u64,
    pub samples: usize,
    /// Check `U*U = I` on every sampled unitary.
    #[serde(default = "yes")]
    pub check_unitary: bool,
}

fn yes() -> bool {
    true
}

fn version() -> u32 {
    ncprob_core::io::SCHEMA_VERSION
}

/// An ensemble over a grid of sizes plus the words to measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    #[serde(default = "version")]
    pub version: u32,
    pub model: Model,
    pub sizes: Vec<usize>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub mains: Vec<MainSpec>,
    #[serde(default)]
    pub perts: Vec<PertSpec>,
    pub words: Vec<String>,
    #[serde(default = "yes")]
    pub check_unitary: bool,
}

impl Experiment {
    pub fn parse(json: &str) -> Result<Self> {
        let e: Experiment = serde_json::from_str(json)?;
        if e.sizes.is_empty() || e.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be non-empty and strictly increasing".into()));
        }
        if e.words.is_empty() {
            return Err(Error::Config("no words to measure".into()));
        }
        for &n in &e.sizes {
            e.ensemble(n).validate()?;
        }
        Ok(e)
    }

    pub fn ensemble(&self, n: usize) -> EnsembleSpec {
        EnsembleSpec {
            n,
            model: self.model,
            mains: self.mains.clone(),
            perts: self.perts.clone(),
            seed: self.seed,
            samples: self.samples,
            check_unitary: self.check_unitary,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("N = {} is too small", self.n));
        }
        if self.samples < 2 {
            return bad("at least two samples are needed for a standard error".into());
        }
        if self.mains.is_empty() {
            return bad("no main matrices".into());
        }
        if self.model == Model::Minor && !self.perts.is_empty() {
            return bad("the minor model has no perturbations besides q".into());
        }
        let mut seen = BTreeMap::new();
        for name in self.mains.iter().map(|m| &m.name).chain(self.perts.iter().map(|p| &p.name)) {
            if name.is_empty() || name.contains(char::is_whitespace) {
                return bad(format!("bad generator name `{name}`"));
            }
            if self.model == Model::Minor && (name == "p" || name == "q") {
                return bad(format!("`{name}` is reserved in the minor model"));
            }
            if seen.insert(name.clone(), ()).is_some() {
                return bad(format!("generator `{name}` declared twice"));
            }
        }
        for m in &self.mains {
            match &m.spectrum {
                Spectrum::Eigenvalues(v) if v.is_empty() => return bad(format!("`{}` has no eigenvalues", m.name)),
                Spectrum::Semicircle(v) => {
                    if v.to_q()? < ncprob_core::scalars::q(0, 1) {
                        return bad(format!("`{}` has negative variance", m.name));
                    }
                    if self.mains.iter().filter(|o| o.group == m.group).count() > 1 {
                        return bad(format!("semicircle `{}` must be alone in group `{}`", m.name, m.group));
                    }
                }
                _ => {}
            }
        }
        for p in &self.perts {
            if p.eigenvalues.is_empty() || p.eigenvalues.len() > self.n {
                return bad(format!("`{}` needs rank between 1 and N", p.name));
            }
        }
        Ok(())
    }
}
