use nalgebra::DMatrix;
use ncprob_rmt::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn experiment(name: &str) -> Experiment {
    let path = format!("{}/configs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Experiment::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn small(mut e: Experiment, sizes: &[usize], samples: usize) -> Experiment {
    e.sizes = sizes.to_vec();
    e.samples = samples;
    e
}

fn row<'a>(r: &'a SimResult, w: &str) -> &'a WordResult {
    r.words.iter().find(|x| x.word == w).unwrap()
}

#[test]
fn haar_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = sample_haar(256, &mut rng);
    let err = (u.adjoint() * &u - DMatrix::identity(256, 256)).map(|z| z.norm()).max();
    assert!(err < 1e-10, "{err}");
    let v = haar_columns(100, 3, &mut rng);
    assert!((v.adjoint() * &v - DMatrix::identity(3, 3)).map(|z| z.norm()).max() < 1e-12);
}

#[test]
fn haar_one_by_one_is_a_uniform_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let zs: Vec<_> = (0..4000).map(|_| sample_haar(1, &mut rng)[(0, 0)]).collect();
    assert!(zs.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    let mean = zs.iter().sum::<nalgebra::Complex<f64>>() / zs.len() as f64;
    // |E z| has standard error 1/√(2·4000) per component
    assert!(mean.norm() < 0.05, "{mean}");
    let upper = zs.iter().filter(|z| z.im > 0.0).count() as f64 / zs.len() as f64;
    assert!((upper - 0.5).abs() < 0.03);
}

#[test]
fn haar_first_moment() {
    let n = 64;
    let a: Vec<f64> = (0..n).map(|k| (k % 4) as f64 - 1.0).collect();
    let tr = a.iter().sum::<f64>() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let entries = [(0, 0), (0, 1), (17, 5), (n - 1, n - 1), (40, 41)];
    let mut stats = vec![(Stats::default(), Stats::default()); entries.len()];
    for _ in 0..500 {
        let u = sample_haar(n, &mut rng);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(a.iter().map(|&x| nalgebra::Complex::new(x, 0.0)).collect()));
        let m = &u * d * u.adjoint();
        for (s, &(i, j)) in stats.iter_mut().zip(&entries) {
            s.0.push(m[(i, j)].re);
            s.1.push(m[(i, j)].im);
        }
    }
    for (s, &(i, j)) in stats.iter().zip(&entries) {
        let want = if i == j { tr } else { 0.0 };
        assert!((s.0.mean - want).abs() <= 3.0 * s.0.stderr(), "re ({i},{j}): {} vs {want}", s.0.mean);
        assert!(s.1.mean.abs() <= 3.0 * s.1.stderr() + 1e-15, "im ({i},{j}): {}", s.1.mean);
    }
}

#[test]
fn single_main_trace_is_exact() {
    let e = small(experiment("weak_bprime"), &[64], 4);
    let r = run(&e.ensemble(64), &["x2".into(), "x2 x2".into()]).unwrap();
    for w in ["x2", "x2 x2"] {
        let x = row(&r, w);
        assert!(x.abs_err_phi < 1e-12 && x.emp_tr_stderr < 1e-12, "{x:?}");
    }
    assert_eq!(row(&r, "x2").pred_phi, 0.5);
}

#[test]
fn minor_projection_traces_are_exact() {
    let e = small(experiment("minor"), &[32], 20);
    let r = run(&e.ensemble(32), &e.words).unwrap();
    for w in ["q", "q q", "q q q", "q q q q"] {
        let x = row(&r, w);
        assert_eq!((x.emp_trdiff_mean, x.emp_trdiff_stderr, x.pred_phi_prime), (1.0, 0.0, 1.0), "{w}");
    }
    // E Tr(Q U A U* Q) = tr_N(A) and the compression p x p has φ′ = −φ(x)
    for (w, want) in [("q x2 q", 0.5), ("p x2 p", -0.5)] {
        let x = row(&r, w);
        assert_eq!(x.pred_phi_prime, want);
        assert!(x.abs_err_phi_prime <= 3.0 * x.emp_trdiff_stderr + 1e-12, "{x:?}");
    }
}

#[test]
fn bprime_cross_perturbations_vanish() {
    let e = small(experiment("bprime"), &[128], 40);
    let r = run(&e.ensemble(128), &["g1 g2".into(), "g1 g1".into()]).unwrap();
    let x = row(&r, "g1 g2");
    assert_eq!(x.pred_phi_prime, 0.0);
    assert!(x.emp_trdiff_mean.abs() <= 3.0 * x.emp_trdiff_stderr + 5.0 / 128.0, "{x:?}");
    // g1² = V F² V* has trace exactly 5
    let y = row(&r, "g1 g1");
    assert!((y.emp_trdiff_mean - 5.0).abs() < 1e-10 && y.pred_phi_prime == 5.0);
}

#[test]
fn weak_cross_perturbations_are_deterministic() {
    let e = small(experiment("weak_bprime"), &[64], 6);
    let r = run(&e.ensemble(64), &["g1 g2".into()]).unwrap();
    let x = row(&r, "g1 g2");
    assert_eq!((x.pred_phi_prime, x.emp_trdiff_mean), (1.5, 1.5));
}

#[test]
fn reproducible_and_schedule_independent() {
    let e = small(experiment("weak_bprime"), &[32], 10);
    let spec = e.ensemble(32);
    let a = run(&spec, &e.words).unwrap();
    let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| run(&spec, &e.words).unwrap());
    assert_eq!(a, b);
    let mut other = spec.clone();
    other.seed += 1;
    assert_ne!(run(&other, &e.words).unwrap(), a);
}

#[test]
fn small_convergence_study_within_tolerance() {
    for name in ["weak_bprime", "bprime", "minor"] {
        let e = small(experiment(name), &[16, 32, 64], 60);
        let t = convergence_study(&e).unwrap();
        assert_eq!(t.rows.len(), 3 * e.words.len());
        let r = tolerance_report(&t, 5.0, 4, 3);
        assert!(r.ok(), "{name}: {r}");
    }
}

#[test]
fn csv_has_the_documented_columns() {
    let e = small(experiment("minor"), &[16], 3);
    let r = run(&e.ensemble(16), &["q x1 q".into()]).unwrap();
    let mut out = Vec::new();
    write_csv(&r.words, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "word,N,samples,emp_tr_mean,emp_tr_stderr,pred_phi,emp_Trdiff_mean,emp_Trdiff_stderr,pred_phi_prime,abs_err_phi,abs_err_phi_prime"
    );
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bad_configs_are_rejected() {
    let e = experiment("minor");
    let mut bad = e.ensemble(16);
    bad.mains[0].name = "q".into();
    assert!(bad.validate().is_err());
    assert!(matches!(run(&e.ensemble(16), &["x1 y".into()]), Err(Error::UnknownLetter(_))));
    let mut unsorted = serde_json::to_value(&e).unwrap();
    unsorted["sizes"] = serde_json::json!([128, 64]);
    assert!(Experiment::parse(&unsorted.to_string()).is_err());
    let mut spec = experiment("weak_bprime").ensemble(16);
    spec.perts[0].eigenvalues = vec![];
    assert!(spec.validate().is_err());
}

#[test]
#[ignore]
fn full_size_studies() {
    for name in ["weak_bprime", "bprime", "minor"] {
        let t0 = std::time::Instant::now();
        let t = convergence_study(&experiment(name)).unwrap();
        let r = tolerance_report(&t, 5.0, 4, 3);
        println!("{name}: {r} in {:?}", t0.elapsed());
        for row in &t.rows {
            println!("  {:>18} N={:<4} tr {:+.4}±{:.1e} φ {:+.4} | Tr {:+.4}±{:.1e} φ′ {:+.4}", row.word, row.n, row.emp_tr_mean, row.emp_tr_stderr, row.pred_phi, row.emp_trdiff_mean, row.emp_trdiff_stderr, row.pred_phi_prime);
        }
    }
}
