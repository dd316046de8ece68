//! The three operator families: twisted paraproducts (separable fast path),
//! twisted bilinear multipliers T_m acting on the (xi1, eta2) frequency pair,
//! and spatially-dependent multipliers T_sigma. Also one-axis convolutions and
//! Littlewood-Paley projections.

use crate::cutoffs::SchwartzProfile;
use crate::error::CoreError;
use crate::grid::{forward_transform, inverse_transform, Axes, Field, Geometry};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

type GeoKey = (usize, u64);

fn geo_key(geo: Geometry) -> GeoKey {
    (geo.n, geo.l.to_bits())
}

/// A bilinear symbol m(tau1, tau2) paired with its support metadata. Cloning
/// shares the per-geometry value cache.
#[derive(Clone)]
pub struct TwistedSymbol {
    pub name: String,
    eval: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
    /// None means unrestricted; Some(c) asserts m = 0 where |tau1| > c|tau2|.
    pub support_constant: Option<f64>,
    /// Dyadic scale invariance m(2 tau) = m(tau) inside the covered range.
    pub homogeneous: bool,
    cache: Arc<RwLock<HashMap<GeoKey, Arc<Vec<Complex64>>>>>,
}

impl TwistedSymbol {
    pub fn new<F>(name: impl Into<String>, support_constant: Option<f64>, homogeneous: bool, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        TwistedSymbol {
            name: name.into(),
            eval: Arc::new(f),
            support_constant,
            homogeneous,
            cache: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    pub fn constant(gamma: Complex64) -> Self {
        Self::new(format!("const({})", gamma), None, false, move |_, _| gamma)
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::new("0", Some(0.0), false, |_, _| Complex64::new(0.0, 0.0))
    }

    /// Catalog single-cone symbol with support constant exactly c.
    pub fn cone(c: f64, k_range: (i32, i32)) -> Self {
        assert!(c > 0.0);
        Self::new(
            format!("cone({};k={}..{})", c, k_range.0, k_range.1),
            Some(c),
            true,
            move |t1, t2| Complex64::new(cone_value(c, k_range, t1, t2), 0.0),
        )
    }

    /// Evaluate with the fixed degenerate-point convention: homogeneous
    /// symbols report 0 at the origin, and non-finite values collapse to 0.
    pub fn eval(&self, t1: f64, t2: f64) -> Complex64 {
        if self.homogeneous && t1 == 0.0 && t2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let v = (self.eval)(t1, t2);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Values at grid frequency pairs (xi1 row, eta2 column), unpaired mode
    /// zeroed. Lazily built per geometry; concurrent readers share the table.
    pub fn table(&self, geo: Geometry) -> Arc<Vec<Complex64>> {
        let key = geo_key(geo);
        if let Some(t) = self.cache.read().unwrap().get(&key) {
            return t.clone();
        }
        let n = geo.n;
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for b1 in 0..n {
            if b1 == n / 2 {
                continue;
            }
            let x1 = geo.freq(b1);
            for b2 in 0..n {
                if b2 == n / 2 {
                    continue;
                }
                t[b1 * n + b2] = self.eval(x1, geo.freq(b2));
            }
        }
        let t = Arc::new(t);
        self.cache.write().unwrap().insert(key, t.clone());
        t
    }

    /// Check the support invariant on the grid frequency sample: m must
    /// vanish (relative to its peak) wherever |tau1| > c|tau2|.
    pub fn check_support(&self, geo: Geometry) -> Result<(), CoreError> {
        let c = match self.support_constant {
            Some(c) => c,
            None => return Ok(()),
        };
        let t = self.table(geo);
        let n = geo.n;
        let peak = t.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(());
        }
        for b1 in 0..n {
            let x1 = geo.freq(b1);
            for b2 in 0..n {
                let x2 = geo.freq(b2);
                let v = t[b1 * n + b2].norm();
                if x1.abs() > c * x2.abs() && v > 1e-12 * peak {
                    return Err(CoreError::SupportViolation(format!(
                        "symbol {} is {:.3e} at ({}, {}) outside |tau1| <= {}|tau2|",
                        self.name, v, x1, x2, c
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The catalog cone: sum over k in range of
/// theta(2 * 2^-k tau1 / c) * vartheta(2^-k tau2). Each term lives on the
/// dyadic annulus 2^(k-1) <= |tau2| <= 2^(k+1) and is confined to
/// |tau1| < c 2^(k-1) <= c |tau2| there, so the support constant is exactly c.
pub fn cone_value(c: f64, k_range: (i32, i32), t1: f64, t2: f64) -> f64 {
    let mut s = 0.0;
    for k in k_range.0..=k_range.1 {
        let r = 2f64.powi(-k);
        s += crate::cutoffs::theta(2.0 * r * t1 / c) * crate::cutoffs::vartheta(r * t2);
    }
    s
}

/// One paraproduct: coefficients lambda_k over a finite scale list, an x-side
/// profile phi and an annular y-side profile psi.
#[derive(Clone)]
pub struct ParaproductSpec {
    pub phi: SchwartzProfile,
    pub psi: SchwartzProfile,
    pub lambda: Vec<(i32, Complex64)>,
}

impl ParaproductSpec {
    pub fn new(phi: SchwartzProfile, psi: SchwartzProfile, lambda: Vec<(i32, Complex64)>) -> Self {
        assert!(
            lambda.iter().all(|(_, l)| l.re.is_finite() && l.im.is_finite()),
            "lambda coefficients must be finite"
        );
        assert!(
            (psi.spectrum)(0.0).norm() == 0.0,
            "psi spectrum must be annular (vanish at 0)"
        );
        ParaproductSpec { phi, psi, lambda }
    }

    /// The separable symbol this paraproduct realizes:
    /// m(tau1, tau2) = sum_k lambda_k phi_hat(2^-k tau1) psi_hat(2^-k tau2).
    pub fn induced_symbol(&self) -> TwistedSymbol {
        let phi = self.phi.clone();
        let psi = self.psi.clone();
        let lambda = self.lambda.clone();
        TwistedSymbol::new("induced-separable", None, false, move |t1, t2| {
            let mut s = Complex64::new(0.0, 0.0);
            for &(k, l) in &lambda {
                let r = 2f64.powi(-k);
                s += l * (phi.spectrum)(r * t1) * (psi.spectrum)(r * t2);
            }
            s
        })
    }
}

/// Multiply an already axis-transformed field by the rescaled profile
/// spectrum phi_hat(2^-k xi) along that axis (unpaired mode zeroed), then
/// transform back. Returns the spectral mass of the rescaled profile that
/// lies beyond Nyquist (0.0 when the support fits on the grid).
fn apply_axis_profile(spec_side: &Field, axis: Axes, profile: &SchwartzProfile, k: i32) -> (Field, f64) {
    let geo = spec_side.geo;
    let n = geo.n;
    let r = 2f64.powi(-k);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for (b, slot) in w.iter_mut().enumerate() {
        if b == n / 2 {
            continue;
        }
        *slot = (profile.spectrum)(r * geo.freq(b));
    }
    let mut out = spec_side.clone();
    match axis {
        Axes::X => {
            for b1 in 0..n {
                let wv = w[b1];
                for b2 in 0..n {
                    out.values[b1 * n + b2] *= wv;
                }
            }
        }
        Axes::Y => {
            for row in out.values.chunks_exact_mut(n) {
                for (b2, v) in row.iter_mut().enumerate() {
                    *v *= w[b2];
                }
            }
        }
        Axes::Both => unreachable!(),
    }
    let radius = 2f64.powi(k) * profile.support_radius;
    let nyq = geo.nyquist();
    let clipped = if radius <= nyq {
        0.0
    } else {
        // Riemann sum of |phi_hat(2^-k xi)| over [nyq, radius], both signs
        let steps = 512;
        let dx = (radius - nyq) / steps as f64;
        let mut s = 0.0;
        for i in 0..steps {
            let xi = nyq + (i as f64 + 0.5) * dx;
            s += (profile.spectrum)(r * xi).norm() + (profile.spectrum)(-r * xi).norm();
        }
        s * dx
    };
    (inverse_transform(&out, axis), clipped)
}

/// One-axis convolution against the rescaled profile: frequency multiplier
/// phi_hat(2^-k xi) along the chosen axis. The second return value is the
/// Nyquist-clipped spectral mass of the multiplier (a truncation warning
/// when nonzero).
pub fn partial_convolution(f: &Field, axis: Axes, profile: &SchwartzProfile, k: i32) -> (Field, f64) {
    assert!(axis != Axes::Both);
    apply_axis_profile(&forward_transform(f, axis), axis, profile, k)
}

/// Littlewood-Paley projection onto the dyadic annulus at scale k.
pub fn littlewood_paley(f: &Field, axis: Axes, k: i32) -> Field {
    partial_convolution(f, axis, &SchwartzProfile::vartheta(), k).0
}

/// Pi_{phi,psi,lambda}(f,g) = sum_k lambda_k P^{phi_k}_x f * P^{psi_k}_y g.
/// Returns the output plus the accumulated Nyquist-clipped mass over all
/// scales (propagated truncation warning).
pub fn apply_paraproduct(spec: &ParaproductSpec, f: &Field, g: &Field) -> (Field, f64) {
    assert_eq!(f.geo, g.geo);
    let fxf = forward_transform(f, Axes::X);
    let fyg = forward_transform(g, Axes::Y);
    let mut out = Field::zeros(f.geo);
    let mut clipped = 0.0;
    for &(k, lam) in &spec.lambda {
        if lam.norm() == 0.0 {
            continue;
        }
        let (pf, c1) = apply_axis_profile(&fxf, Axes::X, &spec.phi, k);
        let (pg, c2) = apply_axis_profile(&fyg, Axes::Y, &spec.psi, k);
        clipped += c1 + c2;
        for (o, (a, b)) in out.values.iter_mut().zip(pf.values.iter().zip(&pg.values)) {
            *o += lam * a * b;
        }
    }
    (out, clipped)
}

/// T_m(f,g): the 4-fold frequency sum regrouped into one-axis transforms,
/// cost O(N^3 log N). Per xi1 row: the eta2 sum is an inverse FFT of the
/// symbol row times g's y-spectrum; the xi1 phase and f's x-spectrum then
/// multiply in. All-zero symbol rows are skipped.
pub fn apply_twisted_multiplier(m: &TwistedSymbol, f: &Field, g: &Field) -> Field {
    assert_eq!(f.geo, g.geo);
    let geo = f.geo;
    let n = geo.n;
    let table = m.table(geo);
    let fxf = forward_transform(f, Axes::X);
    let fyg = forward_transform(g, Axes::Y);
    let plan = crate::grid::fft_plan(n, true);
    let mut out = Field::zeros(geo);
    let s = 1.0 / (geo.l * geo.l);
    let mut row_buf = vec![Complex64::new(0.0, 0.0); n];
    for b1 in 0..n {
        if b1 == n / 2 {
            continue;
        }
        let mrow = &table[b1 * n..(b1 + 1) * n];
        if mrow.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        let m1 = if b1 < n / 2 { b1 as i64 } else { b1 as i64 - n as i64 };
        for j in 0..n {
            for b2 in 0..n {
                row_buf[b2] = mrow[b2] * fyg.values[j * n + b2];
            }
            plan.process(&mut row_buf);
            let phase =
                Complex64::from_polar(s, 2.0 * std::f64::consts::PI * (j as i64 * m1) as f64 / n as f64);
            for l in 0..n {
                out.values[j * n + l] += phase * fxf.values[b1 * n + l] * row_buf[l];
            }
        }
    }
    out
}

/// The direct O(N^4) quadruple frequency sum, kept as an oracle for small N.
/// Output modes accumulate at (m1+n1, m2+n2) mod N, exactly as the fast
/// path's spatial products alias them.
pub fn twisted_multiplier_brute(m: &TwistedSymbol, f: &Field, g: &Field) -> Field {
    assert_eq!(f.geo, g.geo);
    let geo = f.geo;
    let n = geo.n;
    let fh = forward_transform(f, Axes::Both);
    let gh = forward_transform(g, Axes::Both);
    let mut acc = Field::zeros(geo);
    let s = 1.0 / (geo.l * geo.l);
    for m1 in 0..n {
        if m1 == n / 2 {
            continue; // unpaired xi1 never enters the symbol
        }
        let x1 = geo.freq(m1);
        for m2 in 0..n {
            let fv = fh.values[m1 * n + m2];
            if fv.norm() == 0.0 {
                continue;
            }
            for n1 in 0..n {
                for n2 in 0..n {
                    if n2 == n / 2 {
                        continue; // unpaired eta2
                    }
                    let gv = gh.values[n1 * n + n2];
                    if gv.norm() == 0.0 {
                        continue;
                    }
                    let mv = m.eval(x1, geo.freq(n2));
                    let o1 = (m1 + n1) % n;
                    let o2 = (m2 + n2) % n;
                    acc.values[o1 * n + o2] += mv * fv * gv * s;
                }
            }
        }
    }
    inverse_transform(&acc, Axes::Both)
}

/// A symbol that may depend on the output point (x, y).
#[derive(Clone)]
pub enum SpatialSymbol {
    /// sigma(x,y,tau) = amplitude(x,y) * base(tau): T_sigma is the pointwise
    /// amplitude times T_base (exact identity).
    Separable {
        amplitude: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
        base: TwistedSymbol,
    },
    /// Arbitrary sigma(x, y, tau1, tau2); evaluated by the direct double
    /// frequency sum, cost O(N^4). Intended for N <= 128.
    General {
        eval: Arc<dyn Fn(f64, f64, f64, f64) -> Complex64 + Send + Sync>,
        support_constant: Option<f64>,
    },
}

pub fn apply_spatial_multiplier(sigma: &SpatialSymbol, f: &Field, g: &Field) -> Field {
    assert_eq!(f.geo, g.geo);
    let geo = f.geo;
    let n = geo.n;
    match sigma {
        SpatialSymbol::Separable { amplitude, base } => {
            let mut out = apply_twisted_multiplier(base, f, g);
            for j in 0..n {
                let x = geo.point(j);
                for l in 0..n {
                    out.values[j * n + l] *= amplitude(x, geo.point(l));
                }
            }
            out
        }
        SpatialSymbol::General { eval, .. } => {
            let fxf = forward_transform(f, Axes::X);
            let fyg = forward_transform(g, Axes::Y);
            let s = 1.0 / (geo.l * geo.l);
            let mut out = Field::zeros(geo);
            let two_pi = 2.0 * std::f64::consts::PI;
            for j in 0..n {
                let x = geo.point(j);
                for l in 0..n {
                    let y = geo.point(l);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b1 in 0..n {
                        if b1 == n / 2 {
                            continue;
                        }
                        let x1 = geo.freq(b1);
                        let fv = fxf.values[b1 * n + l];
                        if fv.norm() == 0.0 {
                            continue;
                        }
                        for b2 in 0..n {
                            if b2 == n / 2 {
                                continue;
                            }
                            let x2 = geo.freq(b2);
                            let gv = fyg.values[j * n + b2];
                            if gv.norm() == 0.0 {
                                continue;
                            }
                            let ph = Complex64::from_polar(1.0, two_pi * (x * x1 + y * x2));
                            acc += eval(x, y, x1, x2) * fv * gv * ph;
                        }
                    }
                    out.values[j * n + l] = acc * s;
                }
            }
            out
        }
    }
}
