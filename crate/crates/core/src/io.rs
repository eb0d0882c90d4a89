//! JSON encodings: moment sequences and scenarios.
//!
//! Rationals are written as `"p/q"` strings; on input plain numbers are
//! accepted too and read through their decimal form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conv::{Dist, InfDist};
use crate::error::{Error, Result};
use crate::indep::{Group, Law, Role, Scenario};
use crate::moments::{Alphabet, Functional, GenKind, MomentTable, Poly, PowerFunctional};
use crate::scalars::{parse_q, Q};

pub const SCHEMA_VERSION: u32 = 1;

fn version() -> u32 {
    SCHEMA_VERSION
}

/// A JSON scalar: `"p/q"`, an integer or a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Str(String),
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            Num::Str(s) => parse_q(s),
            Num::Int(i) => Ok(Q::from_integer((*i).into())),
            Num::Float(f) if f.is_finite() => parse_q(&format!("{f:?}")),
            Num::Float(f) => Err(Error::Parse(format!("not a finite number: {f}"))),
        }
    }

    pub fn from_q(v: &Q) -> Self {
        Num::Str(v.to_string())
    }
}

fn to_qs(v: &[Num]) -> Result<Vec<Q>> {
    v.iter().map(Num::to_q).collect()
}

/// `{"order": K, "moments": [m₀, …, m_K]}`, with an optional `"inf"` layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFile {
    #[serde(default = "version")]
    pub version: u32,
    pub order: usize,
    pub moments: Vec<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inf: Option<Vec<Num>>,
}

impl MomentFile {
    pub fn parse(json: &str) -> Result<Self> {
        let f: MomentFile = serde_json::from_str(json)?;
        if f.moments.len() != f.order + 1 {
            return Err(Error::Malformed(format!("order {} needs {} moments, found {}", f.order, f.order + 1, f.moments.len())));
        }
        if let Some(inf) = &f.inf {
            if inf.len() != f.order + 1 {
                return Err(Error::Malformed(format!("order {} needs {} infinitesimal moments, found {}", f.order, f.order + 1, inf.len())));
            }
        }
        Ok(f)
    }

    pub fn dist(&self) -> Result<Dist<Q>> {
        Dist::new(to_qs(&self.moments)?)
    }

    /// The raw sequence, without requiring `m₀ = 1`.
    pub fn sequence(&self) -> Result<Vec<Q>> {
        to_qs(&self.moments)
    }

    pub fn inf_dist(&self) -> Result<InfDist<Q>> {
        let inf = self.inf.as_ref().ok_or_else(|| Error::MissingData("`inf` moments".into()))?;
        InfDist::new(self.dist()?, to_qs(inf)?)
    }

    pub fn from_dist(d: &Dist<Q>) -> Self {
        MomentFile { version: SCHEMA_VERSION, order: d.order(), moments: d.moments().iter().map(Num::from_q).collect(), inf: None }
    }

    pub fn from_sequence(v: &[Q]) -> Self {
        MomentFile { version: SCHEMA_VERSION, order: v.len().saturating_sub(1), moments: v.iter().map(Num::from_q).collect(), inf: None }
    }

    pub fn from_inf_dist(d: &InfDist<Q>) -> Self {
        MomentFile { inf: Some(d.inf.iter().map(Num::from_q).collect()), ..Self::from_dist(&d.std) }
    }
}

/// A marginal: power moments of one generator, or a word → value table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginalSpec {
    Power { generator: String, moments: Vec<Num> },
    Table(BTreeMap<String, Num>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default)]
    pub projection: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub label: String,
    pub role: Role,
    pub generators: Vec<GeneratorSpec>,
    pub phi: MarginalSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<MarginalSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(default = "version")]
    pub version: u32,
    pub law: Law,
    pub groups: Vec<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub traced: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pert_joint: Option<MarginalSpec>,
    /// Perturbation polynomial for `φ_P`, as `{"word": coefficient}`.
    #[serde(default, rename = "P", skip_serializing_if = "Option::is_none")]
    pub p: Option<BTreeMap<String, Num>>,
}

pub struct LoadedScenario {
    pub scenario: Scenario<Q>,
    pub alphabet: Arc<Alphabet>,
    pub p: Option<Poly<Q>>,
}

fn marginal(spec: &MarginalSpec, a: &Alphabet) -> Result<Arc<dyn Functional<Q>>> {
    Ok(match spec {
        MarginalSpec::Power { generator, moments } => Arc::new(PowerFunctional::new(a.letter(generator)?, to_qs(moments)?)),
        MarginalSpec::Table(t) => {
            let mut m = MomentTable::unital();
            for (w, v) in t {
                m.insert(a.parse_word(w)?, v.to_q()?);
            }
            Arc::new(m)
        }
    })
}

impl ScenarioSpec {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn load(&self) -> Result<LoadedScenario> {
        let mut a = Alphabet::new();
        let mut letters = Vec::new();
        for g in &self.groups {
            let mut ls = Vec::new();
            for gen in &g.generators {
                let kind = match (gen.projection, g.role) {
                    (true, _) => GenKind::Projection,
                    (false, Role::Main) => GenKind::Main,
                    (false, Role::Perturbation) => GenKind::Perturbation,
                };
                ls.push(a.add(&gen.name, &g.label, kind)?);
            }
            letters.push(ls);
        }
        let mut groups = Vec::new();
        for (g, ls) in self.groups.iter().zip(letters) {
            let mut grp = Group::new(&g.label, ls, g.role, marginal(&g.phi, &a)?);
            if let Some(psi) = &g.psi {
                grp = grp.with_psi(marginal(psi, &a)?);
            }
            groups.push(grp);
        }
        let mut s = Scenario::new(self.law, groups)?.with_traced(self.traced);
        if let Some(n) = self.max_len {
            s = s.with_max_len(n);
        }
        if let Some(j) = &self.pert_joint {
            s = s.with_pert_joint(marginal(j, &a)?);
        }
        let p = match &self.p {
            None => None,
            Some(t) => {
                let mut poly = Poly::zero();
                for (w, c) in t {
                    poly = poly.add(&Poly::term(a.parse_word(w)?, c.to_q()?));
                }
                Some(poly)
            }
        };
        let alphabet = Arc::new(a);
        Ok(LoadedScenario { scenario: s.with_alphabet(alphabet.clone()), alphabet, p })
    }
}

/// A partition as a list of 1-based blocks.
pub fn partition_json(p: &crate::ncpart::NcPartition) -> serde_json::Value {
    serde_json::json!(p.blocks())
}

pub fn parse_partition(json: &str) -> Result<crate::ncpart::NcPartition> {
    let blocks: Vec<Vec<usize>> = serde_json::from_str(json)?;
    let n = blocks.iter().flatten().copied().max().unwrap_or(0);
    crate::ncpart::NcPartition::new(n, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    #[test]
    fn moment_file_round_trip() {
        let f = MomentFile::parse(r#"{"order": 4, "moments": ["1", "0", "1", 0, 2.5]}"#).unwrap();
        let d = f.dist().unwrap();
        assert_eq!(d.moments()[4], q(5, 2));
        let back = serde_json::to_string(&MomentFile::from_dist(&d)).unwrap();
        assert_eq!(back, r#"{"version":1,"order":4,"moments":["1","0","1","0","5/2"]}"#);
        assert!(MomentFile::parse(r#"{"order": 3, "moments": ["1"]}"#).is_err());
        assert!(MomentFile::parse(r#"{"order": 0, "moments": ["2"]}"#).unwrap().dist().is_err());
    }

    #[test]
    fn scenario_loads() {
        let json = r#"{
            "law": "BPRIME",
            "groups": [
                {"label": "A", "role": "main", "generators": [{"name": "a"}],
                 "phi": {"power": {"generator": "a", "moments": ["1", "0", "1"]}}},
                {"label": "F", "role": "perturbation", "generators": [{"name": "f"}, {"name": "q", "projection": true}],
                 "phi": {"table": {"f": "2", "q": "1", "f q": "1/2", "q f": "1/2", "f f": "3", "q f q": "1"}}}
            ],
            "P": {"q": "1"}
        }"#;
        let l = ScenarioSpec::parse(json).unwrap().load().unwrap();
        let w = l.alphabet.parse_word("a f a").unwrap();
        assert_eq!(l.scenario.engine().unwrap().eval(&w).unwrap(), q(2, 1));
        let w = l.alphabet.parse_word("a f").unwrap();
        assert_eq!(l.scenario.engine().unwrap().eval(&w).unwrap(), q(0, 1));
        let w = l.alphabet.parse_word("a a f").unwrap();
        assert_eq!(l.scenario.engine().unwrap().eval(&w).unwrap(), q(2, 1));
        assert_eq!(l.p.unwrap().len(), 1);
        assert!(ScenarioSpec::parse(r#"{"law": "NOPE", "groups": []}"#).is_err());
    }

    #[test]
    fn partitions() {
        let p = parse_partition("[[1,2],[3]]").unwrap();
        assert_eq!(partition_json(&p).to_string(), "[[1,2],[3]]");
        assert!(parse_partition("[[1,3],[2,4]]").is_err());
    }
}
