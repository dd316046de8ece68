//! Constructive symbol decomposition: slice a cone-supported symbol into
//! dyadic pieces, expand each piece in a Fourier series on its box, check the
//! coefficient decay, and resynthesize the symbol as a finite sum of
//! modulated paraproducts.

use crate::cutoffs::{make_modulated, theta, vartheta, ModulationSide};
use crate::error::CoreError;
use crate::grid::{forward_transform, Axes, Field, Geometry};
use crate::operators::{ParaproductSpec, TwistedSymbol};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Smallest nonnegative integer a with c <= 2^a.
pub fn shift_exponent(c: f64) -> u32 {
    assert!(c >= 0.0 && c.is_finite());
    let mut a = 0u32;
    while c > 2f64.powi(a as i32) {
        a += 1;
    }
    a
}

/// One dyadic piece m_k(tau) = m(tau) theta(2^-k-a-3 tau1) vartheta(2^-k tau2),
/// supported in {|tau1| <= 2^(k+a+3), 2^(k-1) <= |tau2| <= 2^(k+1)}.
#[derive(Clone)]
pub struct DyadicSlice {
    pub k: i32,
    pub a: u32,
    symbol: TwistedSymbol,
}

impl DyadicSlice {
    pub fn eval(&self, t1: f64, t2: f64) -> Complex64 {
        let w1 = theta(2f64.powi(-self.k - self.a as i32 - 3) * t1);
        let w2 = vartheta(2f64.powi(-self.k) * t2);
        if w1 == 0.0 || w2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.symbol.eval(t1, t2) * w1 * w2
    }

    /// Half-length of the Fourier series box [-H, H]^2, H = 2^(k+a+4).
    pub fn box_half(&self) -> f64 {
        2f64.powi(self.k + self.a as i32 + 4)
    }
}

pub fn slice_symbol(m: &TwistedSymbol, k: i32, a: u32) -> DyadicSlice {
    DyadicSlice { k, a, symbol: m.clone() }
}

/// Fourier coefficients of one slice on its box, square truncation
/// |n1|, |n2| <= n_max. m_quad = 0 marks a table re-imported from JSON.
#[derive(Clone, Debug)]
pub struct FourierSeriesCoeffs {
    pub k: i32,
    pub a: u32,
    pub n_max: usize,
    pub m_quad: usize,
    table: Vec<Complex64>,
}

impl FourierSeriesCoeffs {
    fn side(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn kappa(&self, n1: i64, n2: i64) -> Complex64 {
        let nm = self.n_max as i64;
        if n1.abs() > nm || n2.abs() > nm {
            return Complex64::new(0.0, 0.0);
        }
        self.table[((n1 + nm) as usize) * self.side() + (n2 + nm) as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.table.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Default quadrature resolution for a given truncation radius.
pub fn default_quadrature(n_max: usize) -> usize {
    // the nominal 8 samples per retained mode is far too coarse for the
    // wide-box slices; 1024 holds every kappa stable to ~1e-9 under doubling
    (8 * (2 * n_max + 1)).max(1024)
}

/// kappa^(k)_n = box mean of m_k(tau) e^{-i pi (n1 tau1 + n2 tau2)/H} via an
/// M x M FFT over uniform samples on [-H, H)^2.
pub fn fourier_coefficients(
    slice: &DyadicSlice,
    n_max: usize,
    m_quad: usize,
) -> Result<FourierSeriesCoeffs, CoreError> {
    if m_quad < 4 * (2 * n_max + 1) {
        return Err(CoreError::Config(format!(
            "quadrature M = {} below 4(2 n_max + 1) = {}",
            m_quad,
            4 * (2 * n_max + 1)
        )));
    }
    let m = m_quad;
    let h = slice.box_half();
    let step = 2.0 * h / m as f64;
    let mut samples = vec![Complex64::new(0.0, 0.0); m * m];
    for i1 in 0..m {
        let t1 = -h + i1 as f64 * step;
        if theta(2f64.powi(-slice.k - slice.a as i32 - 3) * t1) == 0.0 {
            continue; // whole row outside the tau1 window
        }
        for i2 in 0..m {
            let t2 = -h + i2 as f64 * step;
            samples[i1 * m + i2] = slice.eval(t1, t2);
        }
    }
    // 2D forward FFT, rows then columns
    let plan = crate::grid::fft_plan(m, false);
    for row in samples.chunks_exact_mut(m) {
        plan.process(row);
    }
    let mut lane = vec![Complex64::new(0.0, 0.0); m];
    for col in 0..m {
        for row in 0..m {
            lane[row] = samples[row * m + col];
        }
        plan.process(&mut lane);
        for row in 0..m {
            samples[row * m + col] = lane[row];
        }
    }
    // sampling at tau = -H + i step makes the DFT kernel pick up (-1)^(n1+n2)
    let side = 2 * n_max + 1;
    let nm = n_max as i64;
    let norm = 1.0 / (m * m) as f64;
    let mut table = vec![Complex64::new(0.0, 0.0); side * side];
    for n1 in -nm..=nm {
        let b1 = n1.rem_euclid(m as i64) as usize;
        for n2 in -nm..=nm {
            let b2 = n2.rem_euclid(m as i64) as usize;
            let sign = if (n1 + n2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            table[((n1 + nm) as usize) * side + (n2 + nm) as usize] =
                samples[b1 * m + b2] * (sign * norm);
        }
    }
    Ok(FourierSeriesCoeffs { k: slice.k, a: slice.a, n_max, m_quad: m, table })
}

/// fourier_coefficients plus the doubling check: errors if any kappa moves by
/// more than 1e-8 when M doubles.
pub fn fourier_coefficients_verified(
    slice: &DyadicSlice,
    n_max: usize,
    m_quad: usize,
) -> Result<FourierSeriesCoeffs, CoreError> {
    let coarse = fourier_coefficients(slice, n_max, m_quad)?;
    let fine = fourier_coefficients(slice, n_max, 2 * m_quad)?;
    let shift = coeff_shift(&coarse, &fine);
    if shift > 1e-8 {
        return Err(CoreError::NonConvergence(format!(
            "doubling quadrature M = {} moves a coefficient by {:.3e} (> 1e-8)",
            m_quad, shift
        )));
    }
    Ok(fine)
}

pub fn coeff_shift(a: &FourierSeriesCoeffs, b: &FourierSeriesCoeffs) -> f64 {
    let nm = a.n_max.min(b.n_max) as i64;
    let mut worst: f64 = 0.0;
    for n1 in -nm..=nm {
        for n2 in -nm..=nm {
            worst = worst.max((a.kappa(n1, n2) - b.kappa(n1, n2)).norm());
        }
    }
    worst
}

pub const ANNULUS_INDICES: [i32; 3] = [-1, 0, 1];

/// The assembled decomposition: per-scale coefficient tables plus the
/// measured sup-norm reconstruction error over the covered region.
#[derive(Clone)]
pub struct Decomposition {
    pub a: u32,
    pub k_range: (i32, i32),
    pub n_max: usize,
    pub coeffs: Vec<FourierSeriesCoeffs>,
    pub error_budget: f64,
    source: Option<TwistedSymbol>,
}

impl Decomposition {
    /// Slice, expand, and measure. The symbol must carry a support constant;
    /// its support invariant is checked on the grid sample first.
    pub fn build(
        m: &TwistedSymbol,
        geo: Geometry,
        n_max: usize,
        m_quad: Option<usize>,
    ) -> Result<Self, CoreError> {
        let c = m.support_constant.ok_or_else(|| {
            CoreError::SupportViolation(format!(
                "symbol {} carries no support constant; decomposition requires |tau1| <= c|tau2|",
                m.name
            ))
        })?;
        m.check_support(geo)?;
        let a = shift_exponent(c);
        let k_range = geo.scale_range();
        let mq = m_quad.unwrap_or_else(|| default_quadrature(n_max));
        let mut coeffs = Vec::new();
        for k in k_range.0..=k_range.1 {
            coeffs.push(fourier_coefficients(&slice_symbol(m, k, a), n_max, mq)?);
        }
        let mut d = Decomposition {
            a,
            k_range,
            n_max,
            coeffs,
            error_budget: 0.0,
            source: Some(m.clone()),
        };
        d.error_budget = d.reconstruction_error(m);
        Ok(d)
    }

    /// Like build, but every slice's coefficient table is cross-checked
    /// against a doubled quadrature; disagreement is NonConvergence.
    pub fn build_verified(
        m: &TwistedSymbol,
        geo: Geometry,
        n_max: usize,
        m_quad: Option<usize>,
    ) -> Result<Self, CoreError> {
        let c = m.support_constant.ok_or_else(|| {
            CoreError::SupportViolation(format!(
                "symbol {} carries no support constant; decomposition requires |tau1| <= c|tau2|",
                m.name
            ))
        })?;
        m.check_support(geo)?;
        let a = shift_exponent(c);
        let k_range = geo.scale_range();
        let mq = m_quad.unwrap_or_else(|| default_quadrature(n_max));
        let mut coeffs = Vec::new();
        for k in k_range.0..=k_range.1 {
            coeffs.push(fourier_coefficients_verified(&slice_symbol(m, k, a), n_max, mq)?);
        }
        let mut d = Decomposition {
            a,
            k_range,
            n_max,
            coeffs,
            error_budget: 0.0,
            source: Some(m.clone()),
        };
        d.error_budget = d.reconstruction_error(m);
        Ok(d)
    }

    /// Evaluator of the truncated triple sum
    /// sum_i sum_n sum_k kappa^(k)_n phi_hat^(n1)(2^-k tau1) psi_hat^(n2,i)(2^-k tau2).
    /// The i-sum factors out of the n-sum, and the n-sum is a separable
    /// polynomial in the two modulation phases.
    pub fn reconstruction(&self) -> TwistedSymbol {
        let coeffs = self.coeffs.clone();
        let a = self.a as i32;
        TwistedSymbol::new(
            format!("reconstruction(n_max={})", self.n_max),
            None,
            false,
            move |t1, t2| {
                let mut total = Complex64::new(0.0, 0.0);
                for c in &coeffs {
                    let sc = 2f64.powi(-c.k - a - 4);
                    let w1 = theta(sc * t1);
                    let mut w2 = 0.0;
                    for i in ANNULUS_INDICES {
                        w2 += vartheta(2f64.powi(-c.k - i) * t2);
                    }
                    if w1 == 0.0 || w2 == 0.0 {
                        continue;
                    }
                    let nm = c.n_max as i64;
                    let z1: Vec<Complex64> = (-nm..=nm)
                        .map(|n| Complex64::from_polar(1.0, PI * sc * n as f64 * t1))
                        .collect();
                    let z2: Vec<Complex64> = (-nm..=nm)
                        .map(|n| Complex64::from_polar(1.0, PI * sc * n as f64 * t2))
                        .collect();
                    let mut s = Complex64::new(0.0, 0.0);
                    for (i1, p1) in z1.iter().enumerate() {
                        let mut row = Complex64::new(0.0, 0.0);
                        for (i2, p2) in z2.iter().enumerate() {
                            row += c.kappa(i1 as i64 - nm, i2 as i64 - nm) * p2;
                        }
                        s += p1 * row;
                    }
                    total += s * (w1 * w2);
                }
                total
            },
        )
    }

    /// Sup-norm distance between m and the reconstruction over a dense
    /// deterministic sample of the covered support region.
    pub fn reconstruction_error(&self, m: &TwistedSymbol) -> f64 {
        let c = m.support_constant.unwrap_or(1.0);
        let rec = self.reconstruction();
        let lo = 2f64.powi(self.k_range.0 - 1);
        let hi = 2f64.powi(self.k_range.1 + 1);
        let radial = 129;
        let transverse = 33;
        let mut worst: f64 = 0.0;
        for ri in 0..radial {
            let mag = lo * (hi / lo).powf(ri as f64 / (radial - 1) as f64);
            for &t2 in &[mag, -mag] {
                for ti in 0..transverse {
                    let t1 = c * t2.abs() * (2.0 * ti as f64 / (transverse - 1) as f64 - 1.0);
                    worst = worst.max((m.eval(t1, t2) - rec.eval(t1, t2)).norm());
                }
            }
        }
        worst
    }

    /// One ParaproductSpec per (i, n1, n2): lambda_k = kappa^(k)_{n1,n2},
    /// phi = phi^(n1), psi = psi^(n2,i). Length 3 (2 n_max + 1)^2.
    pub fn synthesize_paraproducts(&self) -> Vec<SynthTerm> {
        let nm = self.n_max as i64;
        let mut terms = Vec::with_capacity(3 * (2 * self.n_max + 1).pow(2));
        for i in ANNULUS_INDICES {
            for n1 in -nm..=nm {
                for n2 in -nm..=nm {
                    let lambda: Vec<(i32, Complex64)> =
                        self.coeffs.iter().map(|c| (c.k, c.kappa(n1, n2))).collect();
                    let phi = make_modulated(n1, ModulationSide::Phi, self.a).profile;
                    let psi = make_modulated(n2, ModulationSide::Psi(i), self.a).profile;
                    terms.push(SynthTerm {
                        i,
                        n1,
                        n2,
                        spec: ParaproductSpec::new(phi, psi, lambda),
                    });
                }
            }
        }
        terms
    }

    /// sum over the synthesized paraproducts, evaluated with shared
    /// projections: the i-sum folds into one y-multiplier per (k, n2), and
    /// each (k, n) projection is one windowed modulated band of f or g.
    pub fn apply_decomposed(&self, f: &Field, g: &Field) -> Field {
        assert_eq!(f.geo, g.geo);
        let geo = f.geo;
        let n = geo.n;
        let a = self.a as i32;
        let fxf = forward_transform(f, Axes::X);
        let fyg = forward_transform(g, Axes::Y);
        let nm = self.n_max as i64;
        let side = (2 * self.n_max + 1) as usize;
        let mut out = Field::zeros(geo);
        for c in &self.coeffs {
            let sc = 2f64.powi(-c.k - a - 4);
            // windowed modulated x-bands of f
            let mut pf: Vec<Field> = Vec::with_capacity(side);
            for n1 in -nm..=nm {
                let mut spec = fxf.clone();
                for b1 in 0..n {
                    let w = if b1 == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let xi = geo.freq(b1);
                        Complex64::from_polar(theta(sc * xi), PI * sc * n1 as f64 * xi)
                    };
                    for b2 in 0..n {
                        spec.values[b1 * n + b2] *= w;
                    }
                }
                pf.push(crate::grid::inverse_transform(&spec, Axes::X));
            }
            // y-bands of g with the i-sum folded into the window
            let mut pg: Vec<Field> = Vec::with_capacity(side);
            for n2 in -nm..=nm {
                let mut spec = fyg.clone();
                let mut w = vec![Complex64::new(0.0, 0.0); n];
                for (b2, slot) in w.iter_mut().enumerate() {
                    if b2 == n / 2 {
                        continue;
                    }
                    let eta = geo.freq(b2);
                    let mut win = 0.0;
                    for i in ANNULUS_INDICES {
                        win += vartheta(2f64.powi(-c.k - i) * eta);
                    }
                    *slot = Complex64::from_polar(win, PI * sc * n2 as f64 * eta);
                }
                for row in spec.values.chunks_exact_mut(n) {
                    for (b2, v) in row.iter_mut().enumerate() {
                        *v *= w[b2];
                    }
                }
                pg.push(crate::grid::inverse_transform(&spec, Axes::Y));
            }
            for (i1, pfn) in pf.iter().enumerate() {
                for (i2, pgn) in pg.iter().enumerate() {
                    let kap = c.kappa(i1 as i64 - nm, i2 as i64 - nm);
                    if kap.norm() == 0.0 {
                        continue;
                    }
                    for (o, (x, y)) in
                        out.values.iter_mut().zip(pfn.values.iter().zip(&pgn.values))
                    {
                        *o += kap * x * y;
                    }
                }
            }
        }
        out
    }

    /// max_{|n1|+|n2|=R} |kappa| (1 + R)^10 per R, across all scales, with
    /// the growth flag (any row above twice the median).
    pub fn decay_report(&self) -> DecayReport {
        let nm = self.n_max as i64;
        let mut rows = Vec::new();
        for r in 0..=(2 * nm) {
            let mut peak: f64 = 0.0;
            for c in &self.coeffs {
                for n1 in -nm..=nm {
                    let n2a = r - n1.abs();
                    if n2a > nm || n2a < 0 {
                        continue;
                    }
                    for &n2 in &[n2a, -n2a] {
                        peak = peak.max(c.kappa(n1, n2).norm());
                    }
                }
            }
            rows.push((r as usize, peak * (1.0 + r as f64).powi(10)));
        }
        let mut vals: Vec<f64> = rows.iter().map(|&(_, v)| v).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if vals.is_empty() {
            0.0
        } else if vals.len() % 2 == 1 {
            vals[vals.len() / 2]
        } else {
            0.5 * (vals[vals.len() / 2 - 1] + vals[vals.len() / 2])
        };
        let worst = vals.last().copied().unwrap_or(0.0);
        DecayReport { rows, median, flagged: worst > 2.0 * median }
    }

    pub fn source_symbol(&self) -> Option<&TwistedSymbol> {
        self.source.as_ref()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut coeffs = Vec::new();
        let nm = self.n_max as i64;
        for c in &self.coeffs {
            for n1 in -nm..=nm {
                for n2 in -nm..=nm {
                    let v = c.kappa(n1, n2);
                    coeffs.push(serde_json::json!({
                        "k": c.k, "n1": n1, "n2": n2, "re": v.re, "im": v.im,
                    }));
                }
            }
        }
        serde_json::json!({
            "a": self.a,
            "k_range": [self.k_range.0, self.k_range.1],
            "n_max": self.n_max,
            "i_list": ANNULUS_INDICES,
            "coeffs": coeffs,
            "error_budget": self.error_budget,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, CoreError> {
        let bad = |what: &str| CoreError::Config(format!("decomposition JSON: {}", what));
        let a = v["a"].as_u64().ok_or_else(|| bad("missing a"))? as u32;
        let kr = v["k_range"].as_array().ok_or_else(|| bad("missing k_range"))?;
        if kr.len() != 2 {
            return Err(bad("k_range must be [k_min, k_max]"));
        }
        let k_range = (
            kr[0].as_i64().ok_or_else(|| bad("k_range"))? as i32,
            kr[1].as_i64().ok_or_else(|| bad("k_range"))? as i32,
        );
        let n_max = v["n_max"].as_u64().ok_or_else(|| bad("missing n_max"))? as usize;
        let error_budget = v["error_budget"].as_f64().unwrap_or(f64::NAN);
        let side = 2 * n_max + 1;
        let nm = n_max as i64;
        let mut coeffs: Vec<FourierSeriesCoeffs> = (k_range.0..=k_range.1)
            .map(|k| FourierSeriesCoeffs {
                k,
                a,
                n_max,
                m_quad: 0,
                table: vec![Complex64::new(0.0, 0.0); side * side],
            })
            .collect();
        for entry in v["coeffs"].as_array().ok_or_else(|| bad("missing coeffs"))? {
            let k = entry["k"].as_i64().ok_or_else(|| bad("coeff k"))? as i32;
            let n1 = entry["n1"].as_i64().ok_or_else(|| bad("coeff n1"))?;
            let n2 = entry["n2"].as_i64().ok_or_else(|| bad("coeff n2"))?;
            let re = entry["re"].as_f64().ok_or_else(|| bad("coeff re"))?;
            let im = entry["im"].as_f64().ok_or_else(|| bad("coeff im"))?;
            if k < k_range.0 || k > k_range.1 || n1.abs() > nm || n2.abs() > nm {
                return Err(bad("coefficient index out of range"));
            }
            let c = &mut coeffs[(k - k_range.0) as usize];
            c.table[((n1 + nm) as usize) * side + (n2 + nm) as usize] = Complex64::new(re, im);
        }
        Ok(Decomposition { a, k_range, n_max, coeffs, error_budget, source: None })
    }
}

pub struct SynthTerm {
    pub i: i32,
    pub n1: i64,
    pub n2: i64,
    pub spec: ParaproductSpec,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DecayReport {
    pub rows: Vec<(usize, f64)>,
    pub median: f64,
    pub flagged: bool,
}
