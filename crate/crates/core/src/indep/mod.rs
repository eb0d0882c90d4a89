//! Mixed-moment engines for the independence notions, and checkers that
//! test a joint functional against each defining rule.

mod engines;
mod verify;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use engines::{
    if_closed_form, BPrimeEngine, BooleanEngine, CFreeEngine, CyclicEngine, FreeEngine, MonotoneEngine,
    TrivialEngine,
};
pub use verify::{verify_independence, Joint};

use crate::error::{Error, Result};
use crate::moments::{Alphabet, Functional, Letter, Word};
use crate::scalars::{Dual, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Law {
    Free,
    Boolean,
    /// Ordered pair; the first group plays the `x` role of rule (M).
    Monotone,
    /// Ordered pair; `(𝒜₁, 𝒜₂)` antimonotone iff `(𝒜₂, 𝒜₁)` monotone.
    Antimonotone,
    Trivial,
    CyclicAntimonotone,
    InfFree,
    CFree,
    WeakBprime,
    Bprime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Main,
    Perturbation,
}

/// A subalgebra generated by `letters`, with its marginal.
#[derive(Clone)]
pub struct Group<S> {
    pub label: String,
    pub letters: Vec<Letter>,
    pub role: Role,
    /// `φ` on the group's words; for perturbation groups this is `Φ`.
    pub phi: Arc<dyn Functional<S>>,
    /// Second marginal `ψ` for conditional freeness.
    pub psi: Option<Arc<dyn Functional<S>>>,
}

impl<S> Group<S> {
    pub fn new(label: &str, letters: Vec<Letter>, role: Role, phi: Arc<dyn Functional<S>>) -> Self {
        Group { label: label.into(), letters, role, phi, psi: None }
    }

    pub fn with_psi(mut self, psi: Arc<dyn Functional<S>>) -> Self {
        self.psi = Some(psi);
        self
    }
}

/// Groups, a law, and a word-length budget.
pub struct Scenario<S> {
    pub law: Law,
    pub groups: Vec<Group<S>>,
    pub max_len: usize,
    /// Joint `Φ` on the algebra generated by all perturbation groups.
    pub pert_joint: Option<Arc<dyn Functional<S>>>,
    /// Use `φ(aₙa₀)` in the cyclic factorization instead of `φ(a₀aₙ)`.
    pub traced: bool,
    pub alphabet: Option<Arc<Alphabet>>,
    group_of: HashMap<Letter, usize>,
    engines: Mutex<HashMap<Law, Arc<dyn Functional<S>>>>,
}

impl<S: Scalar> Scenario<S> {
    pub fn new(law: Law, groups: Vec<Group<S>>) -> Result<Self> {
        let mut group_of = HashMap::new();
        for (i, g) in groups.iter().enumerate() {
            if groups[..i].iter().any(|h| h.label == g.label) {
                return Err(Error::Malformed(format!("group label `{}` repeated", g.label)));
            }
            if g.letters.is_empty() {
                return Err(Error::Malformed(format!("group `{}` has no generators", g.label)));
            }
            for &l in &g.letters {
                if group_of.insert(l, i).is_some() {
                    return Err(Error::Malformed(format!("generator #{} in two groups", l.id)));
                }
            }
        }
        let s = Scenario {
            law,
            groups,
            max_len: 6,
            pert_joint: None,
            traced: false,
            alphabet: None,
            group_of,
            engines: Mutex::new(HashMap::new()),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let count = |r: Role| self.groups.iter().filter(|g| g.role == r).count();
        match self.law {
            Law::Monotone | Law::Antimonotone if self.groups.len() != 2 => {
                Err(Error::Malformed(format!("{:?} needs exactly two groups", self.law)))
            }
            Law::CyclicAntimonotone if count(Role::Main) == 0 || count(Role::Perturbation) == 0 => {
                Err(Error::Malformed(format!("{:?} needs main and perturbation groups", self.law)))
            }
            Law::WeakBprime | Law::Bprime if count(Role::Main) == 0 => {
                Err(Error::Malformed(format!("{:?} needs a main group", self.law)))
            }
            Law::CFree => match self.groups.iter().find(|g| g.psi.is_none()) {
                Some(g) => Err(Error::Malformed(format!("group `{}` lacks a ψ marginal", g.label))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn with_pert_joint(mut self, f: Arc<dyn Functional<S>>) -> Self {
        self.pert_joint = Some(f);
        self
    }

    pub fn with_traced(mut self, traced: bool) -> Self {
        self.traced = traced;
        self
    }

    pub fn with_alphabet(mut self, a: Arc<Alphabet>) -> Self {
        self.alphabet = Some(a);
        self
    }

    pub fn group_of(&self, l: Letter) -> Result<usize> {
        self.group_of
            .get(&l)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(self.letter_name(l)))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match &self.alphabet {
            Some(a) => a.name(l).to_string(),
            None => format!("#{}", l.id),
        }
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        match &self.alphabet {
            Some(a) => a.format_word(w),
            None if w.is_empty() => "1".into(),
            None => w.iter().map(|&l| format!("#{}", l.id)).collect::<Vec<_>>().join(" "),
        }
    }

    pub fn is_pert(&self, l: Letter) -> Result<bool> {
        Ok(self.groups[self.group_of(l)?].role == Role::Perturbation)
    }

    pub fn letters(&self, role: Option<Role>) -> Vec<Letter> {
        self.groups
            .iter()
            .filter(|g| role.is_none_or(|r| g.role == r))
            .flat_map(|g| g.letters.iter().copied())
            .collect()
    }

    /// Maximal same-group runs as `(group, start, end)`.
    pub fn runs(&self, w: &[Letter]) -> Result<Vec<(usize, usize, usize)>> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (i, &l) in w.iter().enumerate() {
            let g = self.group_of(l)?;
            match out.last_mut() {
                Some(r) if r.0 == g => r.2 = i + 1,
                _ => out.push((g, i, i + 1)),
            }
        }
        Ok(out)
    }

    fn marginals(&self, role: Option<Role>) -> (Vec<Vec<Letter>>, Vec<Arc<dyn Functional<S>>>) {
        self.groups
            .iter()
            .filter(|g| role.is_none_or(|r| g.role == r))
            .map(|g| (g.letters.clone(), g.phi.clone()))
            .unzip()
    }

    fn main_engine(&self) -> Result<Arc<dyn Functional<S>>> {
        let (ls, fs) = self.marginals(Some(Role::Main));
        Ok(Arc::new(FreeEngine::new(&ls, fs)?))
    }

    fn pert_functional(&self, law: Law) -> Result<Arc<dyn Functional<S>>> {
        let (ls, fs) = self.marginals(Some(Role::Perturbation));
        match (law, &self.pert_joint) {
            (Law::Bprime, _) => Ok(Arc::new(TrivialEngine::new(&ls, fs)?)),
            (_, None) if fs.is_empty() => Ok(Arc::new(TrivialEngine::new(&ls, fs)?)),
            (_, Some(j)) => Ok(j.clone()),
            (_, None) if fs.len() == 1 => Ok(fs[0].clone()),
            _ => Err(Error::MissingData("joint Φ on the perturbation groups".into())),
        }
    }

    /// The cyclic-antimonotone side: `Φ` on words containing a perturbation letter.
    pub fn cyclic_engine(&self, law: Law) -> Result<CyclicEngine<S>> {
        let perts = self.letters(Some(Role::Perturbation));
        Ok(CyclicEngine::new(self.main_engine()?, self.pert_functional(law)?, &perts, self.traced))
    }

    /// The `(φ, φ′)` engine for weak-B′ and B′ scenarios.
    pub fn bprime_engine(&self) -> Result<BPrimeEngine<S>> {
        let law = match self.law {
            Law::Bprime => Law::Bprime,
            Law::WeakBprime => Law::WeakBprime,
            other => return Err(Error::WrongEngine(format!("{other:?} is not a type-B′ law"))),
        };
        Ok(BPrimeEngine::new(self.main_engine()?, self.cyclic_engine(law)?))
    }

    /// Memoizing engine for `law` over this scenario's groups. For the type-B′
    /// laws it evaluates `φ` on main words and `Φ` on words with a perturbation letter.
    pub fn engine_for(&self, law: Law) -> Result<Arc<dyn Functional<S>>> {
        if let Some(e) = self.engines.lock().unwrap().get(&law) {
            return Ok(e.clone());
        }
        let (ls, fs) = self.marginals(None);
        let e: Arc<dyn Functional<S>> = match law {
            Law::Free | Law::InfFree => Arc::new(FreeEngine::new(&ls, fs)?),
            Law::Boolean => Arc::new(BooleanEngine::new(&ls, fs)?),
            Law::Monotone | Law::Antimonotone => {
                if self.groups.len() != 2 {
                    return Err(Error::Malformed(format!("{law:?} needs exactly two groups")));
                }
                let x = if law == Law::Monotone { 0 } else { 1 };
                Arc::new(MonotoneEngine::new(&ls, fs, x)?)
            }
            Law::Trivial => Arc::new(TrivialEngine::new(&ls, fs)?),
            Law::CyclicAntimonotone => Arc::new(self.cyclic_engine(law)?),
            Law::CFree => {
                let psis = self
                    .groups
                    .iter()
                    .map(|g| g.psi.clone().ok_or_else(|| Error::MissingData(format!("ψ marginal of `{}`", g.label))))
                    .collect::<Result<Vec<_>>>()?;
                Arc::new(CFreeEngine::new(&ls, fs, psis)?)
            }
            Law::WeakBprime | Law::Bprime => {
                let main = self.main_engine()?;
                let cyc = Arc::new(self.cyclic_engine(law)?);
                let perts = self.letters(Some(Role::Perturbation));
                Arc::new(crate::moments::FnFunctional::new(move |w: &[Letter]| {
                    if w.iter().any(|l| perts.contains(l)) {
                        cyc.eval(w)
                    } else {
                        main.eval(w)
                    }
                }))
            }
        };
        self.engines.lock().unwrap().insert(law, e.clone());
        Ok(e)
    }

    /// The engine for the scenario's own law.
    pub fn engine(&self) -> Result<Arc<dyn Functional<S>>> {
        self.engine_for(self.law)
    }
}

fn canonical(w: &[Letter]) -> Word {
    let mut v = w.to_vec();
    crate::moments::canonicalize(&mut v);
    v
}

pub fn mm_free<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    s.engine_for(Law::Free)?.eval(&canonical(w))
}

pub fn mm_boolean<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    s.engine_for(Law::Boolean)?.eval(&canonical(w))
}

/// Uses the scenario's own orientation when it is `Antimonotone`, else rule (M).
pub fn mm_monotone<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    let law = if s.law == Law::Antimonotone { Law::Antimonotone } else { Law::Monotone };
    s.engine_for(law)?.eval(&canonical(w))
}

pub fn mm_trivial<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    s.engine_for(Law::Trivial)?.eval(&canonical(w))
}

pub fn mm_cyclic_antimonotone<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    let law = match s.law {
        Law::Bprime | Law::WeakBprime => s.law,
        _ => Law::CyclicAntimonotone,
    };
    s.cyclic_engine(law)?.eval(&canonical(w))
}

pub fn mm_cfree<S: Scalar>(s: &Scenario<S>, w: &[Letter]) -> Result<S> {
    s.engine_for(Law::CFree)?.eval(&canonical(w))
}

pub fn mm_inf_free<S: Scalar>(s: &Scenario<Dual<S>>, w: &[Letter]) -> Result<Dual<S>> {
    s.engine_for(Law::InfFree)?.eval(&canonical(w))
}

/// Checks the scenario's own engine against the defining rules of its law.
pub fn self_check<S: Scalar>(s: &Scenario<S>, max_len: usize) -> Result<crate::report::Report> {
    let e = s.engine()?;
    let mut r = match s.law {
        Law::CFree => {
            let free = s.engine_for(Law::Free)?;
            verify_independence(&Joint::new(&*free).with_second(&*e), s, max_len)?
        }
        Law::CyclicAntimonotone | Law::WeakBprime | Law::Bprime => {
            let main = s.engine_for(Law::Free)?;
            let cyc: Arc<dyn Functional<S>> = Arc::new(s.cyclic_engine(s.law)?);
            verify_independence(&Joint::new(&*main).with_second(&*cyc), s, max_len)?
        }
        _ => verify_independence(&Joint::new(&*e), s, max_len)?,
    };
    r.name = format!("{:?} engine closure", s.law);
    Ok(r)
}
