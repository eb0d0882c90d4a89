//! The ten acceptance criteria at their stated sizes and tolerances, one
//! line each. Exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use ncprob_core::report::Report;
use ncprob_core::suites;
use ncprob_rmt::{convergence_study, tolerance_report, Experiment, Model};

type Outcome = Result<Report, String>;

fn merged(name: &str, parts: Vec<Result<Report, ncprob_core::Error>>) -> Outcome {
    let mut r = Report::new(name);
    for p in parts {
        r.absorb(p.map_err(|e| e.to_string())?);
    }
    Ok(r)
}

fn lattice() -> Outcome {
    merged("lattice", vec![suites::lattice(10, 6)])
}

fn cumulants() -> Outcome {
    merged("cumulants", vec![suites::cumulants(200, 6, 1)])
}

fn projection_lemma() -> Outcome {
    merged("projection lemma", vec![suites::projection_lemma(7)])
}

fn theorem_main() -> Outcome {
    merged("compressed φ′", vec![suites::theorem_main(6, 2)])
}

fn core_lemma() -> Outcome {
    merged("core lemma", vec![suites::core_lemma(4, 2)])
}

fn anticommutator() -> Outcome {
    merged("anti-commutator", vec![suites::anticommutator_suite()])
}

fn markov_krein() -> Outcome {
    merged("Markov–Krein", vec![suites::markov_krein(10)])
}

fn convolution() -> Outcome {
    merged("convolutions", vec![suites::convolution(8, 10, 3)])
}

fn engines() -> Outcome {
    merged("engines", vec![suites::engines(6), suites::bprime(5)])
}

fn random_matrices() -> Outcome {
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../rmt/configs");
    let mut r = Report::new("random matrices");
    for name in ["weak_bprime", "bprime", "minor"] {
        let text = std::fs::read_to_string(configs.join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        let exp = Experiment::parse(&text).map_err(|e| e.to_string())?;
        if exp.sizes != [64, 128, 256] || exp.samples < 200 {
            return Err(format!("{name}: sizes {:?}, {} samples", exp.sizes, exp.samples));
        }
        let table = convergence_study(&exp).map_err(|e| e.to_string())?;
        if exp.model == Model::Minor {
            let powers: Vec<_> = table.rows.iter().filter(|w| w.word.split_whitespace().all(|t| t == "q")).collect();
            if powers.is_empty() {
                return Err("no qⁿ words in the minor config".into());
            }
            for w in powers {
                let exact = w.emp_trdiff_mean == 1.0 && w.emp_trdiff_stderr == 0.0 && w.pred_phi_prime == 1.0;
                r.check("Tr_N(Qⁿ) = 1 exactly", || format!("{} at N={}", w.word, w.n), &true, &exact);
            }
        }
        let mut t = tolerance_report(&table, 5.0, 4, 3);
        t.name = name.into();
        r.absorb(t);
    }
    Ok(r)
}

struct Criterion {
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { title: "lattice: Catalan counts, Kreweras identities, interval isomorphism", budget: secs(30), run: lattice },
        Criterion { title: "cumulants: round trips, Möbius vs recursion, κ′ by dual numbers vs Leibniz", budget: secs(60), run: cumulants },
        Criterion { title: "Σ_{π≤σ} κ′_π[p…p] = −|σ|, n ≤ 7", budget: None, run: projection_lemma },
        Criterion { title: "compressed φ′ = −Σ|Kr(π)|κ_π three ways, n ≤ 6", budget: None, run: theorem_main },
        Criterion { title: "core lemma, n ≤ 4", budget: secs(60), run: core_lemma },
        Criterion { title: "anti-commutator values (4, 6)", budget: None, run: anticommutator },
        Criterion { title: "Markov–Krein: semicircle τ₂ = 2, τ₄ = 6; univariate = diagonal to order 10", budget: None, run: markov_krein },
        Criterion { title: "convolution identities to order 8, degenerations, ⊞ two ways to order 10", budget: None, run: convolution },
        Criterion { title: "engine closure to length 6; B′ ⇔ IF and c-free theorem to length 5", budget: None, run: engines },
        Criterion { title: "random matrices: N ∈ {64, 128, 256}, 200 samples", budget: secs(600), run: random_matrices },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = (c.run)();
        let took = t.elapsed();
        let over = c.budget.is_some_and(|b| took > b);
        let (ok, detail) = match &outcome {
            Ok(r) if r.ok() && r.checked > 0 && !over => (true, format!("{} checks", r.checked)),
            Ok(r) if over => (false, format!("over the {:?} budget; {r}", c.budget.unwrap())),
            Ok(r) => (false, r.to_string()),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {} ({detail}, {:.1?})", i + 1, if ok { "PASS" } else { "FAIL" }, c.title, took);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
