//! The four numerical experiments: Sobolev ratio sweeps for T_m and T_sigma,
//! the symbol-recovery limit, the necessity probe for unrestricted symbols,
//! and the Leibniz identity for paraproduct derivatives.

use crate::error::CoreError;
use crate::grid::{
    dilate_generator, lp_norm, mixed_sobolev_norm, partial_derivative, sample, sobolev_norm,
    translate, Axes, Field, Generator, Geometry,
};
use crate::harness::config::{EnsembleCfg, ExponentTuple};
use crate::harness::report::CsvRow;
use crate::operators::{
    apply_paraproduct, apply_spatial_multiplier, apply_twisted_multiplier, partial_convolution,
    ParaproductSpec, SpatialSymbol, TwistedSymbol,
};
use num_complex::Complex64;
use serde::Serialize;

/// Both the Hoelder identity 1/p + 1/q = 1/r and the strict 1/r > 1/2.
pub fn exponent_gate(t: &ExponentTuple) -> Result<(), String> {
    for (name, v) in [("p", t.p), ("q", t.q), ("r", t.r)] {
        if !v.is_finite() || v <= 1.0 {
            return Err(format!("{} = {} is not in (1, inf)", name, v));
        }
    }
    if !(t.s >= 0.0) {
        return Err(format!("s = {} is not >= 0", t.s));
    }
    let lhs = 1.0 / t.p + 1.0 / t.q;
    let rhs = 1.0 / t.r;
    if (lhs - rhs).abs() > 1e-12 {
        return Err(format!("1/p + 1/q = {} does not equal 1/r = {}", lhs, rhs));
    }
    if !(rhs > 0.5) {
        return Err(format!("1/r = {} is not > 1/2", rhs));
    }
    Ok(())
}

#[derive(Clone)]
pub enum RatioOperator {
    Twisted(TwistedSymbol),
    Spatial(SpatialSymbol),
}

impl RatioOperator {
    pub fn apply(&self, f: &Field, g: &Field) -> Field {
        match self {
            RatioOperator::Twisted(m) => apply_twisted_multiplier(m, f, g),
            RatioOperator::Spatial(s) => apply_spatial_multiplier(s, f, g),
        }
    }

    fn base_twisted(&self) -> Option<&TwistedSymbol> {
        match self {
            RatioOperator::Twisted(m) => Some(m),
            RatioOperator::Spatial(SpatialSymbol::Separable { base, .. }) => Some(base),
            RatioOperator::Spatial(SpatialSymbol::General { .. }) => None,
        }
    }

    fn declared_support(&self) -> Option<f64> {
        match self {
            RatioOperator::Twisted(m) => m.support_constant,
            RatioOperator::Spatial(SpatialSymbol::Separable { base, .. }) => base.support_constant,
            RatioOperator::Spatial(SpatialSymbol::General {
                support_constant, ..
            }) => *support_constant,
        }
    }
}

/// Relative L2 defect of commuting the operator with the translation by v.
pub fn translation_defect<F: Fn(&Field, &Field) -> Field>(
    op: F,
    f: &Field,
    g: &Field,
    v: (f64, f64),
) -> f64 {
    let base = op(f, g);
    let shifted = op(&translate(f, v), &translate(g, v));
    let moved = translate(&base, v);
    let denom = lp_norm(&base, 2.0);
    if denom == 0.0 {
        // Zero operator: report the absolute defect.
        return lp_norm(&shifted.sub(&moved), 2.0);
    }
    lp_norm(&shifted.sub(&moved), 2.0) / denom
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<CsvRow>,
    pub sup_ratio: f64,
    pub min_ratio: f64,
    pub max_over_min: f64,
    pub all_finite: bool,
    /// Translation-equivariance defect of this operator on the first pair.
    pub translation_defect: Option<f64>,
    /// Same defect for the underlying twisted operator (None for a general
    /// spatial symbol with no separable base).
    pub translation_defect_twisted: Option<f64>,
}

/// Ratio table over the random ensemble times the dilation sweep:
/// ratio = |T(f,g)|_{mixed W^{s,r}} / (|f|_p |g|_{W^{s,q}}), with D_a applied
/// to both generators.
pub fn ratio_sweep(
    op: &RatioOperator,
    geo: Geometry,
    exps: &ExponentTuple,
    ens: &EnsembleCfg,
    dilations: &[i32],
    seed: u64,
    probe_mode: bool,
) -> Result<SweepOutcome, CoreError> {
    if !probe_mode {
        exponent_gate(exps).map_err(|r| CoreError::Config(format!("exponent gate: {}", r)))?;
        if op.declared_support().is_none() {
            return Err(CoreError::SupportViolation(
                "operator declares no support constant; in-range sweeps need one \
                 (run in probe mode to bypass)"
                    .into(),
            ));
        }
        // A general spatial symbol cannot be audited cheaply; the declared
        // constant is taken on faith there.
        if let Some(m) = op.base_twisted() {
            m.check_support(geo)?;
        }
    }
    let y_indices = ens.y_indices();
    let mut rows = Vec::new();
    let mut sup: f64 = 0.0;
    let mut min = f64::INFINITY;
    let mut all_finite = true;
    let mut first_pair: Option<(Field, Field)> = None;
    for t in 0..ens.trials {
        let gen_f = Generator::BandLimitedRandom {
            x_indices: ens.x_indices.clone(),
            y_indices: y_indices.clone(),
            seed: seed.wrapping_add(2 * t as u64),
        };
        let gen_g = Generator::BandLimitedRandom {
            x_indices: ens.x_indices.clone(),
            y_indices: y_indices.clone(),
            seed: seed.wrapping_add(2 * t as u64 + 1),
        };
        for &a in dilations {
            let f = sample(&dilate_generator(&gen_f, a)?, geo)?;
            let g = sample(&dilate_generator(&gen_g, a)?, geo)?;
            let out = op.apply(&f, &g);
            let norm_out = mixed_sobolev_norm(&out, exps.s, exps.r);
            let norm_f = lp_norm(&f, exps.p);
            let norm_g = sobolev_norm(&g, exps.s, exps.q);
            let ratio = norm_out / (norm_f * norm_g);
            let finite = ratio.is_finite();
            all_finite &= finite;
            if finite {
                sup = sup.max(ratio);
                min = min.min(ratio);
            }
            rows.push(CsvRow {
                trial_id: t,
                a_dilation: a,
                ratio,
                norm_out,
                norm_f,
                norm_g,
                flags: if finite { String::new() } else { "nonfinite".into() },
            });
            if first_pair.is_none() {
                first_pair = Some((f, g));
            }
        }
    }
    let (td, tdb) = match &first_pair {
        Some((f, g)) => {
            let v = (8.0 * geo.l / geo.n as f64, 0.0);
            let d = translation_defect(|a, b| op.apply(a, b), f, g, v);
            let db = op
                .base_twisted()
                .map(|m| translation_defect(|a, b| apply_twisted_multiplier(m, a, b), f, g, v));
            (Some(d), db)
        }
        None => (None, None),
    };
    Ok(SweepOutcome {
        rows,
        sup_ratio: sup,
        min_ratio: min,
        max_over_min: sup / min,
        all_finite,
        translation_defect: td,
        translation_defect_twisted: tdb,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryRow {
    pub eps: f64,
    pub value: Complex64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryOutcome {
    pub rows: Vec<RecoveryRow>,
    pub target: Complex64,
    pub converged: bool,
}

/// Pair T_m against shrinking wave packets around (xi0, eta0) and watch the
/// pairings approach m(xi0_1, eta0_2). Packet carriers must clear Nyquist;
/// the wide test function h is spectrally truncated by construction.
pub fn recover_symbol(
    m: &TwistedSymbol,
    geo: Geometry,
    xi0: (f64, f64),
    eta0: (f64, f64),
    eps_schedule: &[f64],
) -> Result<RecoveryOutcome, CoreError> {
    if eps_schedule.is_empty() {
        return Err(CoreError::Config("empty eps schedule".into()));
    }
    let nyq = geo.nyquist();
    for &eps in eps_schedule {
        if !(eps > 0.0) {
            return Err(CoreError::Config(format!("eps = {} is not positive", eps)));
        }
        for c in [xi0.0, xi0.1, eta0.0, eta0.1] {
            if c.abs() + eps > nyq + 1e-9 {
                return Err(CoreError::Geometry(format!(
                    "carrier {} with packet width eps = {} exceeds Nyquist {}",
                    c, eps, nyq
                )));
            }
        }
    }
    let target = m.eval(xi0.0, eta0.1);
    let zeta0 = (xi0.0 + eta0.0, xi0.1 + eta0.1);
    let weight = (geo.l / geo.n as f64).powi(2);
    let mut rows = Vec::new();
    for &eps in eps_schedule {
        let f = sample(&Generator::LemmaPhi { carrier: xi0, eps }, geo)?;
        let g = sample(&Generator::LemmaPhi { carrier: eta0, eps }, geo)?;
        let h = sample(&Generator::LemmaPsi { carrier: zeta0, eps }, geo)?;
        let u = apply_twisted_multiplier(m, &f, &g);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in u.values.iter().zip(&h.values) {
            acc += a * b.conj();
        }
        let value = acc * weight;
        rows.push(RecoveryRow { eps, value, error: (value - target).norm() });
    }
    let converged = rows.windows(2).all(|w| w[1].error < w[0].error);
    Ok(RecoveryOutcome { rows, target, converged })
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Row {
    pub lambda: f64,
    pub ratio: f64,
    pub norm_out: f64,
    pub norm_f: f64,
    pub norm_g: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Outcome {
    pub rows: Vec<Prop1Row>,
    /// Least-squares slope of log ratio against log lambda; None for a
    /// single-point sweep.
    pub fitted_exponent: Option<f64>,
}

fn theta_packet(geo: Geometry, carrier: (f64, f64), width: f64) -> Field {
    Field::from_spectrum_fn(geo, |x1, x2| {
        Complex64::new(
            crate::cutoffs::theta((x1 - carrier.0) / width)
                * crate::cutoffs::theta((x2 - carrier.1) / width),
            0.0,
        )
    })
}

/// Sweep the f carrier along (lambda, 0) and track the Sobolev ratio. For a
/// symbol violating the support condition the ratio grows with lambda.
pub fn prop1_probe(
    m: &TwistedSymbol,
    geo: Geometry,
    exps: &ExponentTuple,
    lambdas: &[f64],
    g_carrier: (f64, f64),
    g_tracks: bool,
    width: f64,
) -> Result<Prop1Outcome, CoreError> {
    if lambdas.is_empty() {
        return Err(CoreError::Config("empty lambda sweep".into()));
    }
    let nyq = geo.nyquist();
    let mut rows = Vec::new();
    for &lam in lambdas {
        let gc = if g_tracks { (g_carrier.0, g_carrier.1 * lam) } else { g_carrier };
        for c in [lam, 0.0, gc.0, gc.1] {
            if c.abs() + width > nyq + 1e-9 {
                return Err(CoreError::Config(format!(
                    "Nyquist ceiling: carrier {} + width {} exceeds {}",
                    c, width, nyq
                )));
            }
        }
        let f = theta_packet(geo, (lam, 0.0), width);
        let g = theta_packet(geo, gc, width);
        let out = apply_twisted_multiplier(m, &f, &g);
        let norm_out = mixed_sobolev_norm(&out, exps.s, exps.r);
        let norm_f = lp_norm(&f, exps.p);
        let norm_g = sobolev_norm(&g, exps.s, exps.q);
        rows.push(Prop1Row { lambda: lam, ratio: norm_out / (norm_f * norm_g), norm_out, norm_f, norm_g });
    }
    let fitted_exponent = if rows.len() >= 2 && rows.iter().all(|r| r.ratio > 0.0 && r.ratio.is_finite())
    {
        let xs: Vec<f64> = rows.iter().map(|r| r.lambda.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        Some(num / den)
    } else {
        None
    };
    Ok(Prop1Outcome { rows, fitted_exponent })
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut c = 1u64;
    for i in 0..k {
        c = c * (n - i) as u64 / (i + 1) as u64;
    }
    c
}

/// Max relative L2 gap in
/// d^s_x Pi(f,g) = sum_beta C(s,beta) sum_k lambda_k d^beta P^phi_k f * P^psi_k d^(s-beta) g.
pub fn leibniz_check(spec: &ParaproductSpec, f: &Field, g: &Field, s: usize) -> f64 {
    assert!((1..=3).contains(&s));
    let (pi, _) = apply_paraproduct(spec, f, g);
    let lhs = partial_derivative(&pi, Axes::X, s);
    let mut rhs = Field::zeros(f.geo);
    for beta in 0..=s {
        let cb = binomial(s, beta) as f64;
        let df = partial_derivative(f, Axes::X, beta);
        let dg = partial_derivative(g, Axes::X, s - beta);
        for &(k, lam) in &spec.lambda {
            if lam.norm() == 0.0 {
                continue;
            }
            let (pf, _) = partial_convolution(&df, Axes::X, &spec.phi, k);
            let (pg, _) = partial_convolution(&dg, Axes::Y, &spec.psi, k);
            for (o, (a, b)) in rhs.values.iter_mut().zip(pf.values.iter().zip(&pg.values)) {
                *o += lam * cb * a * b;
            }
        }
    }
    let denom = lp_norm(&lhs, 2.0);
    if denom == 0.0 {
        // Degenerate spec (all weights zero): report the absolute defect.
        return lp_norm(&lhs.sub(&rhs), 2.0);
    }
    lp_norm(&lhs.sub(&rhs), 2.0) / denom
}

/// The plain paraproduct with lambda identically 1 over the grid's scale
/// range: phi = theta, psi = vartheta.
pub fn unit_paraproduct(geo: Geometry) -> ParaproductSpec {
    let (k0, k1) = geo.scale_range();
    ParaproductSpec::new(
        crate::cutoffs::SchwartzProfile::theta(),
        crate::cutoffs::SchwartzProfile::vartheta(),
        (k0..=k1).map(|k| (k, Complex64::new(1.0, 0.0))).collect(),
    )
}
