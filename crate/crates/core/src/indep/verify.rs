use super::{Law, Role, Scenario};
use crate::error::{Error, Result};
use crate::moments::{all_words, canonicalize, eval_poly, Functional, Letter, Poly, Word};
use crate::report::Report;
use crate::scalars::Scalar;

/// A joint functional under test. `second` is `ψ` for conditional
/// freeness and `Φ` for the cyclic-antimonotone and type-B′ laws.
pub struct Joint<'a, S> {
    pub phi: &'a dyn Functional<S>,
    pub second: Option<&'a dyn Functional<S>>,
}

impl<'a, S> Joint<'a, S> {
    pub fn new(phi: &'a dyn Functional<S>) -> Self {
        Joint { phi, second: None }
    }

    pub fn with_second(mut self, f: &'a dyn Functional<S>) -> Self {
        self.second = Some(f);
        self
    }

    fn second(&self) -> Result<&'a dyn Functional<S>> {
        self.second.ok_or_else(|| Error::MissingData("second functional of the joint".into()))
    }
}

type Tuple = Vec<(usize, Word)>;

fn tuples<S: Scalar>(s: &Scenario<S>, letters: &[Letter], max_len: usize, min_runs: usize) -> Result<Vec<Tuple>> {
    let mut out = Vec::new();
    for w in all_words(letters, max_len) {
        let t: Tuple = s.runs(&w)?.into_iter().map(|(g, a, b)| (g, w[a..b].to_vec())).collect();
        if t.len() >= min_runs {
            out.push(t);
        }
    }
    Ok(out)
}

fn show<S: Scalar>(s: &Scenario<S>, t: &[(usize, Word)]) -> String {
    t.iter().map(|(_, w)| s.format_word(w)).collect::<Vec<_>>().join(" | ")
}

fn join(ws: &[&Word]) -> Word {
    let mut w: Word = ws.iter().flat_map(|w| w.iter().copied()).collect();
    canonicalize(&mut w);
    w
}

fn centered<S: Scalar>(f: &dyn Functional<S>, w: &Word, std_only: bool) -> Result<Poly<S>> {
    let c = f.eval(w)?;
    let c = if std_only { c.std_part() } else { c };
    Ok(Poly::word(w.clone()).sub(&Poly::constant(c)))
}

fn product<S: Scalar>(ps: &[Poly<S>]) -> Poly<S> {
    ps.iter().fold(Poly::one(), |acc, p| acc.mul(p))
}

/// Centered alternating products: zero for freeness, rule (IF) when
/// `infinitesimal`, and additionally rule (CF) on `psi` when given.
fn check_centered<S: Scalar>(
    r: &mut Report,
    s: &Scenario<S>,
    phi: &dyn Functional<S>,
    psi: Option<&dyn Functional<S>>,
    letters: &[Letter],
    max_len: usize,
    infinitesimal: bool,
) -> Result<()> {
    for t in tuples(s, letters, max_len, 2)? {
        let b: Vec<Poly<S>> = t.iter().map(|(_, w)| centered(phi, w, infinitesimal)).collect::<Result<_>>()?;
        let got = eval_poly(phi, &product(&b))?;
        let n = t.len();
        let palindromic = n % 2 == 1 && (0..n / 2).all(|j| t[j].0 == t[n - 1 - j].0);
        let expected = if infinitesimal && palindromic {
            let mut v = eval_poly(phi, &b[n / 2])?;
            for j in 0..n / 2 {
                v = v * eval_poly(phi, &b[j].mul(&b[n - 1 - j]))?.std_part();
            }
            v
        } else {
            S::zero()
        };
        let cond = if infinitesimal { "rule (IF)" } else { "centered alternating product vanishes" };
        r.check(cond, || show(s, &t), &expected, &got);
        if let Some(psi) = psi {
            let got = eval_poly(psi, &product(&b))?;
            let mut expected = S::one();
            for p in &b {
                expected = expected * eval_poly(psi, p)?;
            }
            r.check("rule (CF)", || show(s, &t), &expected, &got);
        }
    }
    Ok(())
}

fn check_boolean<S: Scalar>(r: &mut Report, s: &Scenario<S>, phi: &dyn Functional<S>, letters: &[Letter], max_len: usize) -> Result<()> {
    for t in tuples(s, letters, max_len, 2)? {
        let got = phi.eval(&join(&t.iter().map(|(_, w)| w).collect::<Vec<_>>()))?;
        let mut expected = S::one();
        for (_, w) in &t {
            expected = expected * phi.eval(w)?;
        }
        r.check("rule (B)", || show(s, &t), &expected, &got);
    }
    Ok(())
}

fn check_trivial<S: Scalar>(r: &mut Report, s: &Scenario<S>, phi: &dyn Functional<S>, letters: &[Letter], max_len: usize) -> Result<()> {
    for t in tuples(s, letters, max_len, 2)? {
        let got = phi.eval(&join(&t.iter().map(|(_, w)| w).collect::<Vec<_>>()))?;
        r.check("trivial independence", || show(s, &t), &S::zero(), &got);
    }
    Ok(())
}

fn check_monotone<S: Scalar>(r: &mut Report, s: &Scenario<S>, phi: &dyn Functional<S>, x: usize, max_len: usize) -> Result<()> {
    for t in tuples(s, &s.letters(None), max_len, 2)? {
        let got = phi.eval(&join(&t.iter().map(|(_, w)| w).collect::<Vec<_>>()))?;
        let xs = join(&t.iter().filter(|(g, _)| *g == x).map(|(_, w)| w).collect::<Vec<_>>());
        let mut expected = phi.eval(&xs)?;
        for (g, w) in &t {
            if *g != x {
                expected = expected * phi.eval(w)?;
            }
        }
        r.check("rule (M)", || show(s, &t), &expected, &got);
    }
    Ok(())
}

fn check_cyclic<S: Scalar>(
    r: &mut Report,
    s: &Scenario<S>,
    phi: &dyn Functional<S>,
    big_phi: &dyn Functional<S>,
    max_len: usize,
) -> Result<()> {
    for w in all_words(&s.letters(None), max_len) {
        let pert: Vec<bool> = w.iter().map(|&l| s.is_pert(l)).collect::<Result<_>>()?;
        let Some(first) = pert.iter().position(|&p| p) else { continue };
        let last = pert.iter().rposition(|&p| p).unwrap();
        let outer: Word = if s.traced {
            join(&[&w[last + 1..].to_vec(), &w[..first].to_vec()])
        } else {
            join(&[&w[..first].to_vec(), &w[last + 1..].to_vec()])
        };
        let mut expected = phi.eval(&outer)?;
        let mut fs = Vec::new();
        let mut run = Vec::new();
        for k in first..=last {
            if pert[k] {
                if !run.is_empty() {
                    expected = expected * phi.eval(&join(&[&std::mem::take(&mut run)]))?;
                }
                fs.push(w[k]);
            } else {
                run.push(w[k]);
            }
        }
        expected = expected * big_phi.eval(&join(&[&fs]))?;
        let got = big_phi.eval(&w)?;
        r.check("cyclic-antimonotone factorization", || s.format_word(&w), &expected, &got);
    }
    Ok(())
}

/// Enumerates the defining conditions of `s.law` on all words up to
/// `max_len` and reports every violation.
pub fn verify_independence<S: Scalar>(joint: &Joint<S>, s: &Scenario<S>, max_len: usize) -> Result<Report> {
    let mut r = Report::new(format!("{:?}", s.law));
    let all = s.letters(None);
    match s.law {
        Law::Free => check_centered(&mut r, s, joint.phi, None, &all, max_len, false)?,
        Law::InfFree => check_centered(&mut r, s, joint.phi, None, &all, max_len, true)?,
        Law::CFree => check_centered(&mut r, s, joint.phi, Some(joint.second()?), &all, max_len, false)?,
        Law::Boolean => check_boolean(&mut r, s, joint.phi, &all, max_len)?,
        Law::Trivial => check_trivial(&mut r, s, joint.phi, &all, max_len)?,
        Law::Monotone => check_monotone(&mut r, s, joint.phi, 0, max_len)?,
        Law::Antimonotone => check_monotone(&mut r, s, joint.phi, 1, max_len)?,
        Law::CyclicAntimonotone => check_cyclic(&mut r, s, joint.phi, joint.second()?, max_len)?,
        Law::WeakBprime | Law::Bprime => {
            let mains = s.letters(Some(Role::Main));
            check_centered(&mut r, s, joint.phi, None, &mains, max_len, false)?;
            check_cyclic(&mut r, s, joint.phi, joint.second()?, max_len)?;
            if s.law == Law::Bprime {
                let perts = s.letters(Some(Role::Perturbation));
                check_trivial(&mut r, s, joint.second()?, &perts, max_len)?;
            }
        }
    }
    Ok(r)
}
