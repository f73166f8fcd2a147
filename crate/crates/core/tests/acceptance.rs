//! Acceptance run: one PASS/FAIL line per criterion, timings included.
//! Exits with status 1 if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use elliptic_rmatrix::averaging::{
    average_rmatrix_elliptic, elliptic_n_for, rational_to_trig_target, rmatrix_c_residual, vp_ctg_sum, vp_glambda_sum,
    vp_rational_to_trig, AveragingConfig, LambdaSign, TailMode,
};
use elliptic_rmatrix::degenerate::{
    default_samples, degeneration_ladder, is_monotone_decreasing, CaseId, LadderBase, LimitKernel, TrigParams,
};
use elliptic_rmatrix::green::{g0, g_lambda};
use elliptic_rmatrix::rmatrix::{build_r, cdybe_residual_masked};
use elliptic_rmatrix::verify::{run_suite, Suite, SuiteConfig, VerificationReport};
use elliptic_rmatrix::{c, C64, EllipticParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(id: u32, title: &str, limit_s: Option<f64>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let secs = start.elapsed().as_secs_f64();
    let in_time = limit_s.is_none_or(|l| secs < l);
    let ok = o.ok && in_time;
    let timing = match limit_s {
        Some(l) => format!("{secs:.2}s, limit {l}s"),
        None => format!("{secs:.2}s"),
    };
    println!("criterion {id:>2} {} {title}: {} ({timing})", if ok { "PASS" } else { "FAIL" }, o.detail);
    ok
}

fn suite(s: Suite, samples: usize, seed: u64, tol: f64) -> VerificationReport {
    let cfg = SuiteConfig::new(s, samples, seed).with_tol(tol);
    run_suite(s, &cfg).expect("suite configuration is valid")
}

fn summary(r: &VerificationReport) -> String {
    format!("{} max {:.2e} over {} samples (tol {:e})", r.suite, r.max_residual, r.samples, r.tolerance)
}

fn theta_axioms() -> Outcome {
    let r = suite(Suite::QuasiPeriodicity, 100, 1, 1e-10);
    // θ(0) and θ′(0) are folded into the same residual; check them at 1e-12 too
    let mut worst0 = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let p = EllipticParams::from_parts(rng.random_range(-0.5..0.5), rng.random_range(0.3..2.0)).unwrap();
        let d = elliptic_rmatrix::theta_derivs(C64::new(0.0, 0.0), &p).unwrap();
        worst0 = worst0.max(d.d0.norm()).max((d.d1 - 1.0).norm());
    }
    outcome(r.passed && worst0 < 1e-12, format!("{}; theta(0), theta'(0)-1 max {worst0:.2e}", summary(&r)))
}

fn fay() -> Outcome {
    let r = suite(Suite::Fay, 100, 2, 1e-9);
    outcome(r.passed, summary(&r))
}

fn duality() -> Outcome {
    // sample 0 is the λ = 0 table, the other ten are random (λ, τ)
    let r = suite(Suite::Duality, 11, 3, 1e-9);
    outcome(r.passed, summary(&r))
}

fn projections() -> Outcome {
    let conv = suite(Suite::ConvolutionK0, 25, 4, 1e-8);
    let proj = suite(Suite::Projections, 20, 4, 1e-10);
    outcome(conv.passed && proj.passed, format!("{}; {}", summary(&conv), summary(&proj)))
}

fn cylinder() -> Outcome {
    let r = suite(Suite::ConvolutionCyl, 25, 5, 1e-8);
    outcome(r.passed, summary(&r))
}

fn shift_heat() -> Outcome {
    let s = suite(Suite::Shift, 50, 6, 1e-9);
    let h = suite(Suite::Heat, 50, 6, 1e-8);
    outcome(s.passed && h.passed, format!("{}; {}", summary(&s), summary(&h)))
}

fn cdybe() -> Outcome {
    let r = suite(Suite::Cdybe, 30, 7, 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut weakest = f64::INFINITY;
    for _ in 0..30 {
        let p = EllipticParams::from_parts(rng.random_range(-0.5..0.5), rng.random_range(0.6..1.4)).unwrap();
        let t = p.im_tau();
        let mut pt = || c(rng.random_range(-0.5..0.5), rng.random_range(-0.4 * t..0.4 * t));
        let (u1, u2, u3) = (pt(), pt(), pt());
        let l = c(rng.random_range(-0.5..0.5), rng.random_range(-0.9 * t..-0.1 * t));
        if let Ok(x) = cdybe_residual_masked(u1, u2, u3, l, &p, [false; 3]) {
            weakest = weakest.min(x);
        }
    }
    outcome(
        r.passed && weakest > 1e-3,
        format!("{}; without dynamical terms min residual {weakest:.2e} (must exceed 1e-3)", summary(&r)),
    )
}

fn rll() -> Outcome {
    let r = suite(Suite::Rll, 20, 8, 1e-8);
    let h = suite(Suite::Hhl, 20, 8, 1e-12);
    outcome(r.passed && h.max_residual == 0.0, format!("{}; hhl max {:e} (exact zero required)", summary(&r), h.max_residual))
}

fn ladders() -> Outcome {
    let a = degeneration_ladder(CaseId::A, &[10.0, 20.0, 40.0, 80.0], LimitKernel::G0, &default_samples(CaseId::A), LadderBase::default())
        .unwrap();
    let b = degeneration_ladder(CaseId::B, &[1.5, 2.0, 2.5, 3.0], LimitKernel::G0, &default_samples(CaseId::B), LadderBase::default())
        .unwrap();
    let trig = TrigParams::new(c(0.5, 0.0), c(1.0, 0.0)).unwrap();
    let base = LadderBase { trig: Some(trig), ..LadderBase::default() };
    let cc = degeneration_ladder(CaseId::C, &[25.0, 50.0, 100.0], LimitKernel::G0, &default_samples(CaseId::C), base).unwrap();
    let slope = a[0].fitted_rate;
    let rate = b[0].fitted_rate;
    let a_ok = (slope + 2.0).abs() <= 0.4;
    let b_ok = rate < 0.0 && (rate / (-2.0 * PI) - 1.0).abs() <= 0.5;
    let c_ok = is_monotone_decreasing(&cc, 0.0) && cc.iter().all(|r| r.modular);
    let errs: Vec<String> = cc.iter().map(|r| format!("{:.2e}", r.max_error)).collect();
    outcome(
        a_ok && b_ok && c_ok,
        format!("case a slope {slope:.3}; case b rate {rate:.3} (-2pi = {:.3}); case c errors [{}] modular path", -2.0 * PI, errs.join(", ")),
    )
}

fn cybe() -> Outcome {
    let rs: Vec<VerificationReport> = [Suite::CybeA, Suite::CybeB, Suite::CybeC].iter().map(|&s| suite(s, 20, 10, 1e-8)).collect();
    outcome(rs.iter().all(|r| r.passed), rs.iter().map(summary).collect::<Vec<_>>().join("; "))
}

fn averaging() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = EllipticParams::from_parts(rng.random_range(-0.5..0.5), rng.random_range(0.6..1.4)).unwrap();
        let t = p.im_tau();
        let u = c(rng.random_range(-0.5..0.5), rng.random_range(-0.4 * t..0.4 * t));
        let n = elliptic_n_for(1e-12, t, u.im).unwrap();
        let cfg = AveragingConfig::new(n, TailMode::Paired);
        worst = worst.max((vp_ctg_sum(u, &p, &cfg).unwrap() - g0(u, &p).unwrap()).norm());
    }
    ok &= worst < 1e-9;
    notes.push(format!("ctg sum max {worst:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = EllipticParams::from_parts(rng.random_range(-0.5..0.5), rng.random_range(0.6..1.4)).unwrap();
        let t = p.im_tau();
        let l = c(rng.random_range(-0.5..0.5), rng.random_range(-0.7 * t..-0.1 * t));
        let u = c(rng.random_range(-0.5..0.5), rng.random_range(-0.4 * t..0.4 * t));
        let margin = l.im.abs().min(t - l.im.abs());
        let n = elliptic_n_for(1e-12, margin, u.im).unwrap();
        let cfg = AveragingConfig::new(n, TailMode::Plain);
        let plus = vp_glambda_sum(u, l, LambdaSign::Plus, &p, &cfg).unwrap() - g_lambda(u, l, &p).unwrap();
        let minus = vp_glambda_sum(u, l, LambdaSign::Minus, &p, &cfg).unwrap() - g_lambda(u, -l, &p).unwrap();
        worst = worst.max(plus.norm()).max(minus.norm());
    }
    ok &= worst < 1e-9;
    notes.push(format!("twisted sums max {worst:.2e}"));

    let u = c(0.3, -0.2);
    let corrected = AveragingConfig::new(400, TailMode::Paired).with_tail_correction(true);
    let raw = AveragingConfig::new(400, TailMode::Paired);
    let mut cases = vec![TrigParams::new(c(0.5, 0.0), c(1.0, 0.0)).unwrap()];
    for _ in 0..5 {
        let mu = c(rng.random_range(0.15..0.85), 0.0);
        let eta = c(rng.random_range(0.6..1.5), rng.random_range(-0.5..0.5));
        cases.push(TrigParams::new(mu, eta).unwrap());
    }
    let (mut worst, mut worst_raw) = (0.0f64, 0.0f64);
    for t in &cases {
        let target = rational_to_trig_target(u, t.mu(), t.eta());
        worst = worst.max((vp_rational_to_trig(u, t, &corrected).unwrap() - target).norm());
        worst_raw = worst_raw.max((vp_rational_to_trig(u, t, &raw).unwrap() - target).norm());
    }
    let rc = rmatrix_c_residual(u, &cases[0], &corrected).unwrap();
    ok &= worst < 1e-6 && rc < 1e-6;
    notes.push(format!("rational->trig at N=400 max {worst:.2e} with tail term (bare partial sum {worst_raw:.2e}), matrix {rc:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = EllipticParams::from_parts(rng.random_range(-0.5..0.5), rng.random_range(0.8..1.2)).unwrap();
        let t = p.im_tau();
        let l = c(rng.random_range(-0.5..0.5), rng.random_range(-0.7 * t..-0.25 * t));
        let u = c(rng.random_range(-0.5..0.5), rng.random_range(-0.8 * t..-0.2 * t));
        let cfg = AveragingConfig::new(30, TailMode::Paired);
        let avg = average_rmatrix_elliptic(u, l, &p, &cfg).unwrap();
        let exact = build_r(u, C64::new(0.0, 0.0), l, &p).unwrap();
        worst = worst.max((avg.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    ok &= worst < 1e-8;
    notes.push(format!("matrix average at N=30 max {worst:.2e}"));

    let p = EllipticParams::from_parts(0.0, 0.9).unwrap();
    let u = c(0.3, 0.2);
    let exact = g0(u, &p).unwrap();
    let one_sided: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| (vp_ctg_sum(u, &p, &AveragingConfig::new(n, TailMode::OneSided)).unwrap() - exact).norm())
        .collect();
    let diverges = one_sided.windows(2).all(|w| w[1] >= w[0]) && one_sided[0] > 1e-2;
    ok &= diverges;
    notes.push(format!(
        "one-sided sum errors at N=10,20,40: {:.2}, {:.2}, {:.2} (non-convergent)",
        one_sided[0], one_sided[1], one_sided[2]
    ));
    outcome(ok, notes.join("; "))
}

fn determinism() -> Outcome {
    let mut ok = true;
    let mut compared = 0;
    for s in [Suite::Fay, Suite::Cdybe, Suite::ConvolutionK0] {
        let cfg = SuiteConfig::new(s, 12, 42);
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| run_suite(s, &cfg)).unwrap().to_json();
        let b = wide.install(|| run_suite(s, &cfg)).unwrap().to_json();
        let again = run_suite(s, &cfg).unwrap().to_json();
        ok &= a == b && b == again;
        compared += 3;
    }
    outcome(ok, format!("{compared} JSON reports compared byte for byte across runs and thread counts"))
}

fn main() {
    let results = [
        run(1, "theta axioms", Some(1.0), theta_axioms),
        run(2, "degenerate Fay identity", Some(2.0), fay),
        run(3, "dual-basis duality", Some(5.0), duality),
        run(4, "residue-side convolutions and projection algebra", Some(30.0), projections),
        run(5, "cylinder convolutions", Some(30.0), cylinder),
        run(6, "shift and heat identities", Some(5.0), shift_heat),
        run(7, "CDYBE with sensitivity guard", Some(5.0), cdybe),
        run(8, "rLL at c = 0 and weight-zero relation", Some(5.0), rll),
        run(9, "degeneration ladders", Some(60.0), ladders),
        run(10, "non-dynamical CYBE", Some(5.0), cybe),
        run(11, "averaging sums", Some(60.0), averaging),
        run(12, "report determinism", None, determinism),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
