//! Acceptance gate: one test per criterion, each printing a single
//! [PASS]/[FAIL] line with the measured numbers before asserting. Tolerances
//! are pinned here, not read from config.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::time::Instant;
use twistpar::cutoffs::{partition_check, partition_sample, vartheta};
use twistpar::decompose::Decomposition;
use twistpar::grid::{
    forward_transform, inverse_transform, lp_norm, sample, Field, Generator, Geometry,
};
use twistpar::grid::Axes;
use twistpar::harness::config::{AmplitudeCfg, EnsembleCfg, ExponentTuple, LeibnizCfg, RecoveryCfg};
use twistpar::harness::experiments::{
    leibniz_check, prop1_probe, ratio_sweep, recover_symbol, unit_paraproduct, RatioOperator,
};
use twistpar::harness::expr::parse_symbol_expression;
use twistpar::harness::report::csv_string;
use twistpar::operators::{
    apply_paraproduct, apply_twisted_multiplier, twisted_multiplier_brute, TwistedSymbol,
};

fn verdict(ok: bool, label: &str, detail: String) -> bool {
    println!("[{}] {}: {}", if ok { "PASS" } else { "FAIL" }, label, detail);
    ok
}

fn rel_l2(a: &Field, b: &Field) -> f64 {
    lp_norm(&a.sub(b), 2.0) / lp_norm(b, 2.0)
}

fn noise_field(geo: Geometry, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Field::zeros(geo);
    for v in f.values.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(re, im);
    }
    f
}

fn band_field(geo: Geometry, x: &[i64], y: &[i64], seed: u64) -> Field {
    sample(
        &Generator::BandLimitedRandom {
            x_indices: x.to_vec(),
            y_indices: y.to_vec(),
            seed,
        },
        geo,
    )
    .unwrap()
}

/// Sum of a few complex Gaussian bumps in (tau1, tau2); smooth, bounded, no
/// support structure.
fn random_symbol(seed: u64) -> TwistedSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::new();
    for _ in 0..3 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let mu = (rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        let w: f64 = rng.gen_range(0.15..0.5);
        parts.push((Complex64::new(re, im), mu, w));
    }
    TwistedSymbol::new(format!("random({})", seed), None, false, move |t1, t2| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, mu, w) in &parts {
            let d = ((t1 - mu.0).powi(2) + (t2 - mu.1).powi(2)) / (2.0 * w * w);
            acc += a * (-d).exp();
        }
        acc
    })
}

#[test]
fn criterion_1_spectral_core() {
    let t0 = Instant::now();
    let mut worst_rt: f64 = 0.0;
    let mut worst_pl: f64 = 0.0;
    for (i, &n) in [16usize, 64, 128].iter().enumerate() {
        let geo = Geometry::new(n, 16.0).unwrap();
        let f = noise_field(geo, 100 + i as u64);
        let spec = forward_transform(&f, Axes::Both);
        let back = inverse_transform(&spec, Axes::Both);
        worst_rt = worst_rt.max(rel_l2(&back, &f));
        let spatial = lp_norm(&f, 2.0).powi(2);
        let spectral = spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / (geo.l * geo.l);
        worst_pl = worst_pl.max((spatial - spectral).abs() / spatial);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst_rt <= 1e-12 && worst_pl <= 1e-12 && elapsed < 1.0;
    let line = format!(
        "round-trip {:.2e}, Plancherel {:.2e} (tol 1e-12), {:.2}s",
        worst_rt, worst_pl, elapsed
    );
    assert!(verdict(ok, "criterion 1", line));
}

#[test]
fn criterion_2_cutoff_calculus() {
    let t0 = Instant::now();
    let taus = partition_sample(-4, 3, 10_000);
    let dev = partition_check(-4, 3, &taus);
    // annulus leakage: vartheta vanishes outside [1/2, 2] in rescaled units
    let mut leak: f64 = 0.0;
    for i in 0..1000 {
        let inner = 0.5 * (i as f64 + 0.5) / 1000.0;
        let outer = 2.0 + 98.0 * (i as f64 + 0.5) / 1000.0;
        for u in [inner, outer, -inner, -outer] {
            leak = leak.max(vartheta(u).abs());
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = dev <= 1e-12 && leak <= 1e-14 && elapsed < 1.0;
    let line = format!(
        "partition deviation {:.2e} (tol 1e-12), annulus leakage {:.2e} (tol 1e-14), {:.2}s",
        dev, leak, elapsed
    );
    assert!(verdict(ok, "criterion 2", line));
}

#[test]
fn criterion_3_oracle_equivalence() {
    let t0 = Instant::now();
    let geo16 = Geometry::new(16, 16.0).unwrap();
    let idx: Vec<i64> = (-3..=3).collect();
    let mut worst_brute: f64 = 0.0;
    for t in 0..10u64 {
        let m = random_symbol(200 + t);
        let f = band_field(geo16, &idx, &idx, 300 + 2 * t);
        let g = band_field(geo16, &idx, &idx, 301 + 2 * t);
        let fast = apply_twisted_multiplier(&m, &f, &g);
        let brute = twisted_multiplier_brute(&m, &f, &g);
        worst_brute = worst_brute.max(rel_l2(&fast, &brute));
    }
    let geo = Geometry::default_desk();
    let spec = unit_paraproduct(geo);
    let induced = spec.induced_symbol();
    let ens = EnsembleCfg::default();
    let y = ens.y_indices();
    let mut worst_para: f64 = 0.0;
    for t in 0..3u64 {
        let f = band_field(geo, &ens.x_indices, &y, 400 + 2 * t);
        let g = band_field(geo, &ens.x_indices, &y, 401 + 2 * t);
        let (via_para, _) = apply_paraproduct(&spec, &f, &g);
        let via_mult = apply_twisted_multiplier(&induced, &f, &g);
        worst_para = worst_para.max(rel_l2(&via_para, &via_mult));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst_brute <= 1e-10 && worst_para <= 1e-10 && elapsed < 30.0;
    let line = format!(
        "brute-force gap {:.2e}, paraproduct/induced-symbol gap {:.2e} (tol 1e-10), {:.2}s",
        worst_brute, worst_para, elapsed
    );
    assert!(verdict(ok, "criterion 3", line));
}

#[test]
fn criterion_4_decomposition_fidelity() {
    let t0 = Instant::now();
    let geo = Geometry::default_desk();
    let m = parse_symbol_expression("cone(1)", geo).unwrap();
    let mut errors = Vec::new();
    let mut report = None;
    for &n_max in &[2usize, 4, 8, 16] {
        let d = Decomposition::build(&m, geo, n_max, None).unwrap();
        errors.push(d.error_budget);
        if n_max == 8 {
            report = Some(d.decay_report());
        }
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let hundredfold = errors[3] <= errors[1] / 100.0;
    let report = report.unwrap();
    let span = report.rows.iter().map(|&(_, v)| v).fold(0.0f64, f64::max) / report.median;
    let within_2x = !report.flagged;
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = decreasing && hundredfold && within_2x && elapsed < 120.0;
    let line = format!(
        "errors {:?} strictly decreasing: {}; error(16) <= error(4)/100: {} ({:.3} vs {:.5}); weighted decay within 2x of median: {} (span {:.2e}); {:.1}s",
        errors.iter().map(|e| (e * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
        decreasing,
        hundredfold,
        errors[3],
        errors[1] / 100.0,
        within_2x,
        span,
        elapsed
    );
    assert!(verdict(ok, "criterion 4", line));
}

#[test]
fn criterion_5_operator_level_synthesis() {
    let t0 = Instant::now();
    let geo = Geometry::new(64, 16.0).unwrap();
    let m = parse_symbol_expression("cone(1)", geo).unwrap();
    let d = Decomposition::build(&m, geo, 8, None).unwrap();
    let x: Vec<i64> = vec![-8, -4, 0, 4, 8];
    let y: Vec<i64> = (5..=12).collect();
    let mut worst: f64 = 0.0;
    for t in 0..5u64 {
        let f = band_field(geo, &x, &y, 500 + 2 * t);
        let g = band_field(geo, &x, &y, 501 + 2 * t);
        let synthesized = d.apply_decomposed(&f, &g);
        let generic = apply_twisted_multiplier(&m, &f, &g);
        worst = worst.max(rel_l2(&synthesized, &generic));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst <= 1e-3 && elapsed < 120.0;
    let line = format!(
        "synthesized vs generic relative L2 {:.3e} (tol 1e-3) at n_max=8, N=64; {:.1}s",
        worst, elapsed
    );
    assert!(verdict(ok, "criterion 5", line));
}

#[test]
fn criterion_6_packet_recovery() {
    let t0 = Instant::now();
    let cfg = RecoveryCfg::default();
    let gc = cfg.grid.unwrap();
    let geo = Geometry::new(gc.n, gc.l).unwrap();
    let m = parse_symbol_expression(cfg.symbol.as_deref().unwrap(), geo).unwrap();
    let cone = recover_symbol(&m, geo, cfg.xi0, cfg.eta0, &cfg.eps).unwrap();
    let final_rel = cone.rows.last().unwrap().error / cone.target.norm();
    let one = parse_symbol_expression("1", geo).unwrap();
    let flat = recover_symbol(&one, geo, cfg.xi0, cfg.eta0, &cfg.eps).unwrap();
    let flat_worst = flat.rows.iter().map(|r| r.error).fold(0.0f64, f64::max);
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = cone.converged && final_rel <= 0.05 && flat_worst <= 1e-6 && elapsed < 60.0;
    let line = format!(
        "cone errors {:?} decreasing: {}, final {:.2e} (tol 5e-2); constant-symbol worst {:.2e} (tol 1e-6); {:.1}s",
        cone.rows.iter().map(|r| (r.error * 1e4).round() / 1e4).collect::<Vec<_>>(),
        cone.converged,
        final_rel,
        flat_worst,
        elapsed
    );
    assert!(verdict(ok, "criterion 6", line));
}

#[test]
fn criterion_7_growth_probe() {
    let t0 = Instant::now();
    let geo = Geometry::new(256, 1.0).unwrap();
    let exps = ExponentTuple::default();
    let lambdas = [4.0, 8.0, 16.0];
    let free = parse_symbol_expression("1", geo).unwrap();
    let unrestricted = prop1_probe(&free, geo, &exps, &lambdas, (0.0, 3.0), false, 2.0).unwrap();
    let grow = unrestricted.fitted_exponent.unwrap();
    let cone = parse_symbol_expression("cone(1)", geo).unwrap();
    let restricted = prop1_probe(&cone, geo, &exps, &lambdas, (0.0, 3.0), true, 2.0).unwrap();
    let flat = restricted.fitted_exponent.unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = grow >= 0.8 && flat <= 0.1 && elapsed < 180.0;
    let line = format!(
        "unrestricted symbol exponent {:.3} (>= 0.8), cone(1) exponent {:.3} (<= 0.1); {:.1}s",
        grow, flat, elapsed
    );
    assert!(verdict(ok, "criterion 7", line));
}

#[test]
fn criterion_8_leibniz_identity() {
    let t0 = Instant::now();
    let geo = Geometry::default_desk();
    let spec = unit_paraproduct(geo);
    let cfg = LeibnizCfg::default();
    let y: Vec<i64> = (cfg.y_band.0 + 1..=cfg.y_band.1).collect();
    let mut worst: f64 = 0.0;
    for s in [1usize, 2] {
        for t in 0..cfg.trials as u64 {
            let f = band_field(geo, &cfg.x_indices, &y, 600 + 2 * t);
            let g = band_field(geo, &cfg.x_indices, &y, 601 + 2 * t);
            worst = worst.max(leibniz_check(&spec, &f, &g, s));
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst <= 1e-8 && elapsed < 30.0;
    let line = format!(
        "derivative identity relative L2 {:.2e} (tol 1e-8) for s in {{1,2}}; {:.1}s",
        worst, elapsed
    );
    assert!(verdict(ok, "criterion 8", line));
}

#[test]
fn criterion_9_ratio_sweep_consistency() {
    let t0 = Instant::now();
    let geo = Geometry::default_desk();
    let m = parse_symbol_expression("cone(1)", geo).unwrap();
    let exps = ExponentTuple::default();
    let ens = EnsembleCfg::default();
    let dil = [-2, -1, 0, 1, 2];
    let op = RatioOperator::Twisted(m);
    let a = ratio_sweep(&op, geo, &exps, &ens, &dil, 42, false).unwrap();
    let b = ratio_sweep(&op, geo, &exps, &ens, &dil, 42, false).unwrap();
    let bit_exact = csv_string(&a.rows) == csv_string(&b.rows);
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = a.all_finite && a.max_over_min <= 10.0 && bit_exact && elapsed < 300.0;
    let line = format!(
        "ratios finite: {}, max/min {:.3} (<= 10), rerun bit-exact: {}; {:.1}s",
        a.all_finite, a.max_over_min, bit_exact, elapsed
    );
    assert!(verdict(ok, "criterion 9", line));
}

#[test]
fn criterion_10_spatial_symbol_consistency() {
    let t0 = Instant::now();
    let geo = Geometry::new(64, 16.0).unwrap();
    let base = parse_symbol_expression("cone(1)", geo).unwrap();
    let amp = AmplitudeCfg::SinusoidalX { depth: 0.5 };
    let op = RatioOperator::Spatial(amp.spatial_symbol(geo, base));
    let ens = EnsembleCfg {
        trials: 10,
        y_band: (4, 12),
        ..EnsembleCfg::default()
    };
    let exps = ExponentTuple::default();
    let out = ratio_sweep(&op, geo, &exps, &ens, &[0], 42, false).unwrap();
    let sigma_defect = out.translation_defect.unwrap();
    let base_defect = out.translation_defect_twisted.unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = out.all_finite
        && out.max_over_min <= 10.0
        && base_defect <= 1e-12
        && sigma_defect > 1e-3
        && elapsed < 180.0;
    let line = format!(
        "ratios finite: {}, max/min {:.3} (<= 10); translation defect: T_m {:.2e} (<= 1e-12), T_sigma {:.2e} (> 1e-3); {:.1}s",
        out.all_finite, out.max_over_min, base_defect, sigma_defect, elapsed
    );
    assert!(verdict(ok, "criterion 10", line));
}
