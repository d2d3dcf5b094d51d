use std::f64::consts::PI;

use ehrelay_core::analytics::{
    analyze, delta_decode, guard_zone_prob, harvest_levy_closed_form, laplace_k, p_h_gil_pelaez,
    psi4_far_field,
};
use ehrelay_core::simulator::{run_realization, simulate, Flag};
use ehrelay_core::stochgeom::empirical_laplace;
use ehrelay_core::{Config, Method, Quad, RngStream, SchemeId, Validated};

const TRIALS: u64 = 30_000;

fn cfg_with(f: impl FnOnce(&mut Config)) -> Validated {
    let mut c = Config::baseline();
    f(&mut c);
    c.validate().unwrap()
}

/// |p̂ − p| within `k` binomial standard errors of `p`.
fn within(p_hat: f64, p: f64, n: u64, k: f64) -> bool {
    let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
    (p_hat - p).abs() <= k * se
}

#[test]
fn harvest_frequency_matches_gil_pelaez() {
    let q = Quad::default();
    for lp in [1e-3, 1e-2, 1e-1] {
        let cfg = cfg_with(|c| c.lambda_p = lp);
        let p_h = p_h_gil_pelaez(&cfg, &q).unwrap();
        let levy = harvest_levy_closed_form(&cfg).unwrap();
        assert!((p_h - levy).abs() < 1e-6);
        let e = simulate(&cfg, SchemeId::Bcc, TRIALS, 11, None).flag(Flag::HarvestOk);
        assert!(within(e.p_hat, p_h, TRIALS, 3.0), "lambda_p={lp}: {} vs {p_h}", e.p_hat);
    }
}

#[test]
fn harvest_frequency_matches_gil_pelaez_off_four() {
    let q = Quad::default();
    let cfg = cfg_with(|c| {
        c.alpha = 3.0;
        c.r_max = 200.0;
    });
    let p_h = p_h_gil_pelaez(&cfg, &q).unwrap();
    let e = simulate(&cfg, SchemeId::Bcc, 10_000, 12, None).flag(Flag::HarvestOk);
    assert!(within(e.p_hat, p_h, 10_000, 3.0), "{} vs {p_h}", e.p_hat);
}

#[test]
fn simulated_k_has_the_analytic_laplace_transform() {
    let cfg = cfg_with(|_| {});
    let ks: Vec<f64> = (0..TRIALS)
        .map(|i| run_realization(&cfg, SchemeId::Bcc, RngStream::new(13, i)).k_value)
        .collect();
    for s in [1.0, 10.0, 100.0] {
        let emp = empirical_laplace(&ks, s).unwrap();
        let exact = laplace_k(s, &cfg).unwrap();
        let second = laplace_k(2.0 * s, &cfg).unwrap();
        let se = ((second - exact * exact) / TRIALS as f64).sqrt();
        assert!((emp - exact).abs() <= 3.0 * se, "s={s}: {emp} vs {exact}");
    }
}

#[test]
fn guard_and_void_frequencies() {
    let cfg = cfg_with(|_| {});
    let sum = simulate(&cfg, SchemeId::Bsir, TRIALS, 14, None);
    let g = guard_zone_prob(cfg.lambda_p, cfg.r_gz);
    let st = sum.flag(Flag::StClear).p_hat;
    assert!(within(st, g, TRIALS, 3.0), "{st} vs {g}");
    let p_ne = 1.0 - (-PI * cfg.lambda_sr).exp();
    let ne = sum.flag(Flag::Nonempty).p_hat;
    assert!(within(ne, p_ne, TRIALS, 3.0), "{ne} vs {p_ne}");
}

#[test]
fn direct_link_frequency_matches_far_field() {
    let q = Quad::default();
    let cfg = cfg_with(|_| {});
    let p = psi4_far_field(&cfg, cfg.p_st_mw, &q, Method::Auto).unwrap();
    let e = simulate(&cfg, SchemeId::Bcc, TRIALS, 15, None).flag(Flag::DirectDecodeOk);
    assert!(within(e.p_hat, p, TRIALS, 3.0), "{} vs {p}", e.p_hat);
}

#[test]
fn decode_set_is_a_thinned_field() {
    let q = Quad::default();
    let cfg = cfg_with(|_| {});
    let delta = delta_decode(&cfg, &q, Method::Auto).unwrap();
    let expect = delta * cfg.lambda_sr * PI * cfg.r_disc * cfg.r_disc;
    let (mean, se) = simulate(&cfg, SchemeId::Bstd, TRIALS, 16, None).decode_set_mean();
    assert!((mean - expect).abs() <= 3.0 * se, "{mean} ± {se} vs {expect}");
}

#[test]
fn best_sir_beats_random_pick() {
    let cfg = cfg_with(|_| {});
    let bsir = simulate(&cfg, SchemeId::Bsir, TRIALS, 17, None).success();
    let rnd = simulate(&cfg, SchemeId::RandomBaseline, TRIALS, 17, None).success();
    assert!(bsir.p_hat >= rnd.p_hat - 3.0 * (bsir.std_err() + rnd.std_err()));
}

#[test]
fn direct_link_never_hurts_on_paired_streams() {
    let off = cfg_with(|_| {});
    let on = cfg_with(|c| c.direct_link = true);
    for s in SchemeId::ALL {
        let mut worse = 0;
        for i in 0..5_000 {
            let a = run_realization(&off, s, RngStream::new(18, i)).success;
            let b = run_realization(&on, s, RngStream::new(18, i)).success;
            worse += usize::from(a && !b);
        }
        assert_eq!(worse, 0, "{s}");
    }
}

#[test]
fn bcc_and_bsir_track_their_analysis() {
    let q = Quad::default();
    let cfg = cfg_with(|_| {});
    for s in [SchemeId::Bcc, SchemeId::Bsir] {
        let a = analyze(&cfg, s, &q, Method::Auto).unwrap().p_succ;
        let e = simulate(&cfg, s, TRIALS, 19, None).success();
        assert!((e.p_hat - a).abs() <= 0.05, "{s}: sim {} vs analytic {a}", e.p_hat);
    }
}
