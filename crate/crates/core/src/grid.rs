//! Periodic-grid representation: geometry, spectral transforms with
//! Riemann-sum normalization, norms, derivatives, translations, generator
//! sampling, and the `.gfn` on-disk format.
//!
//! Conventions: box [0,L)^2 sampled at x_j = jL/N; frequencies xi_m = m/L for
//! m in {-N/2..N/2-1}; forward 1D transform (L/N) * DFT, inverse (1/L) *
//! unnormalized inverse DFT. The unpaired -N/2 mode is zeroed inside every
//! multiplier application (but not by the transforms themselves).

use crate::error::CoreError;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub n: usize,
    pub l: f64,
}

impl Geometry {
    pub fn new(n: usize, l: f64) -> Result<Self, CoreError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(CoreError::Geometry(format!(
                "N must be a power of two >= 8, got {}",
                n
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(CoreError::Geometry(format!("L must be positive, got {}", l)));
        }
        Ok(Geometry { n, l })
    }

    /// Default desk-scale geometry.
    pub fn default_desk() -> Self {
        Geometry { n: 128, l: 16.0 }
    }

    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.l)
    }

    /// Frequency of FFT bin j (bin order: 0..N/2-1 nonnegative, then negative).
    pub fn freq(&self, bin: usize) -> f64 {
        let n = self.n;
        let m = if bin < n / 2 { bin as i64 } else { bin as i64 - n as i64 };
        m as f64 / self.l
    }

    /// FFT bin of signed frequency index m in {-N/2..N/2-1}.
    pub fn bin(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.l / self.n as f64
    }

    /// Dyadic scales whose annuli fit under Nyquist with margin 2:
    /// k_min = ceil(-log2 L) + 1, k_max = floor(log2(N/(8L))).
    pub fn scale_range(&self) -> (i32, i32) {
        let k_min = (-self.l.log2()).ceil() as i32 + 1;
        let k_max = (self.n as f64 / (8.0 * self.l)).log2().floor() as i32;
        (k_min, k_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub geo: Geometry,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(geo: Geometry) -> Self {
        Field { geo, values: vec![Complex64::new(0.0, 0.0); geo.n * geo.n] }
    }

    /// Sample a function of the space point (x, y).
    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(geo: Geometry, mut f: F) -> Self {
        let n = geo.n;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            let x = geo.point(j);
            for l in 0..n {
                values.push(f(x, geo.point(l)));
            }
        }
        Field { geo, values }
    }

    /// Build a field directly from its spectrum evaluated at grid frequencies
    /// (xi1, xi2); the unpaired mode row/column is left at zero.
    pub fn from_spectrum_fn<F: FnMut(f64, f64) -> Complex64>(geo: Geometry, mut f: F) -> Self {
        let n = geo.n;
        let mut spec = Field::zeros(geo);
        for b1 in 0..n {
            if b1 == n / 2 {
                continue;
            }
            let xi1 = geo.freq(b1);
            for b2 in 0..n {
                if b2 == n / 2 {
                    continue;
                }
                spec.values[b1 * n + b2] = f(xi1, geo.freq(b2));
            }
        }
        inverse_transform(&spec, Axes::Both)
    }

    #[inline]
    pub fn at(&self, j: usize, l: usize) -> Complex64 {
        self.values[j * self.geo.n + l]
    }

    #[inline]
    pub fn at_mut(&mut self, j: usize, l: usize) -> &mut Complex64 {
        &mut self.values[j * self.geo.n + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        Field { geo: self.geo, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.geo, other.geo);
        Field {
            geo: self.geo,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.geo, other.geo);
        Field {
            geo: self.geo,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul_pointwise(&self, other: &Field) -> Field {
        assert_eq!(self.geo, other.geo);
        Field {
            geo: self.geo,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// Zero the unpaired -N/2 frequency row and column (frequency-side data).
    pub fn zero_unpaired(&mut self) {
        let n = self.geo.n;
        for b in 0..n {
            self.values[(n / 2) * n + b] = Complex64::new(0.0, 0.0);
            self.values[b * n + n / 2] = Complex64::new(0.0, 0.0);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axes {
    X,
    Y,
    Both,
}

static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
    OnceLock::new();

/// Shared FFT plan cache; `inverse` selects the conjugate (unnormalized) kernel.
pub fn fft_plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().unwrap();
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transform_axis(f: &mut Field, axis: Axes, inverse: bool, scale: f64) {
    let n = f.geo.n;
    let plan = fft_plan(n, inverse);
    match axis {
        Axes::Y => {
            for row in f.values.chunks_exact_mut(n) {
                plan.process(row);
            }
        }
        Axes::X => {
            let mut lane = vec![Complex64::new(0.0, 0.0); n];
            for l in 0..n {
                for j in 0..n {
                    lane[j] = f.values[j * n + l];
                }
                plan.process(&mut lane);
                for j in 0..n {
                    f.values[j * n + l] = lane[j];
                }
            }
        }
        Axes::Both => unreachable!(),
    }
    if scale != 1.0 {
        for v in &mut f.values {
            *v *= scale;
        }
    }
}

/// Forward transform along the chosen axes: (L/N) x DFT per axis.
pub fn forward_transform(f: &Field, axes: Axes) -> Field {
    let mut out = f.clone();
    let s = f.geo.l / f.geo.n as f64;
    match axes {
        Axes::X => transform_axis(&mut out, Axes::X, false, s),
        Axes::Y => transform_axis(&mut out, Axes::Y, false, s),
        Axes::Both => {
            transform_axis(&mut out, Axes::X, false, s);
            transform_axis(&mut out, Axes::Y, false, s);
        }
    }
    out
}

/// Inverse transform along the chosen axes: (1/L) x unnormalized inverse DFT.
pub fn inverse_transform(f: &Field, axes: Axes) -> Field {
    let mut out = f.clone();
    let s = 1.0 / f.geo.l;
    match axes {
        Axes::X => transform_axis(&mut out, Axes::X, true, s),
        Axes::Y => transform_axis(&mut out, Axes::Y, true, s),
        Axes::Both => {
            transform_axis(&mut out, Axes::X, true, s);
            transform_axis(&mut out, Axes::Y, true, s);
        }
    }
    out
}

/// ((L/N)^2 sum |f|^p)^(1/p).
pub fn lp_norm(f: &Field, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite());
    let w = (f.geo.l / f.geo.n as f64).powi(2);
    let s: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    (w * s).powf(1.0 / p)
}

fn weighted_lp(f: &Field, p: f64, weight: impl Fn(f64, f64) -> f64) -> f64 {
    let mut spec = forward_transform(f, Axes::Both);
    spec.zero_unpaired();
    let n = f.geo.n;
    for b1 in 0..n {
        let xi1 = f.geo.freq(b1);
        for b2 in 0..n {
            spec.values[b1 * n + b2] *= weight(xi1, f.geo.freq(b2));
        }
    }
    lp_norm(&inverse_transform(&spec, Axes::Both), p)
}

/// Full Sobolev norm: weight (1 + 4 pi^2 (xi1^2 + xi2^2))^(s/2), then lp_norm.
pub fn sobolev_norm(f: &Field, s: f64, p: f64) -> f64 {
    assert!(s >= 0.0);
    if s == 0.0 {
        return lp_norm(f, p);
    }
    weighted_lp(f, p, |x1, x2| (1.0 + 4.0 * PI * PI * (x1 * x1 + x2 * x2)).powf(s / 2.0))
}

/// Mixed Sobolev norm: x-only weight (1 + 4 pi^2 xi1^2)^(s/2), then lp_norm.
pub fn mixed_sobolev_norm(f: &Field, s: f64, p: f64) -> f64 {
    assert!(s >= 0.0);
    if s == 0.0 {
        return lp_norm(f, p);
    }
    weighted_lp(f, p, |x1, _| (1.0 + 4.0 * PI * PI * x1 * x1).powf(s / 2.0))
}

/// Spectral derivative of the given order along one axis: (2 pi i xi)^beta.
pub fn partial_derivative(f: &Field, axis: Axes, beta: usize) -> Field {
    assert!(beta <= 6, "order > 6 amplifies grid noise");
    assert!(axis != Axes::Both);
    if beta == 0 {
        return f.clone();
    }
    let mut spec = forward_transform(f, axis);
    let n = f.geo.n;
    // unpaired mode zeroed along the differentiated axis
    for b1 in 0..n {
        let x1 = f.geo.freq(b1);
        for b2 in 0..n {
            let xi = if axis == Axes::X { x1 } else { f.geo.freq(b2) };
            let w = if (axis == Axes::X && b1 == n / 2) || (axis == Axes::Y && b2 == n / 2) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * PI * xi).powu(beta as u32)
            };
            spec.values[b1 * n + b2] *= w;
        }
    }
    inverse_transform(&spec, axis)
}

/// translate(f, v)(x) = f(x + v). Integer-grid shifts rotate indices exactly;
/// anything else modulates the spectrum by e^{2 pi i xi . v}.
pub fn translate(f: &Field, v: (f64, f64)) -> Field {
    let n = f.geo.n;
    let step = f.geo.l / n as f64;
    let s1 = v.0 / step;
    let s2 = v.1 / step;
    let near = |s: f64| (s - s.round()).abs() < 1e-12;
    if near(s1) && near(s2) {
        let i1 = s1.round() as i64;
        let i2 = s2.round() as i64;
        let mut out = Field::zeros(f.geo);
        for j in 0..n {
            let js = (j as i64 + i1).rem_euclid(n as i64) as usize;
            for l in 0..n {
                let ls = (l as i64 + i2).rem_euclid(n as i64) as usize;
                out.values[j * n + l] = f.values[js * n + ls];
            }
        }
        return out;
    }
    let mut spec = forward_transform(f, Axes::Both);
    for b1 in 0..n {
        let x1 = f.geo.freq(b1);
        for b2 in 0..n {
            let phase = 2.0 * PI * (x1 * v.0 + f.geo.freq(b2) * v.1);
            spec.values[b1 * n + b2] *= Complex64::from_polar(1.0, phase);
        }
    }
    inverse_transform(&spec, Axes::Both)
}

/// Analytic test-function generators. Dilations act on the generator (the
/// analytic form), never by grid resampling.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// exp(-((x-cx)^2/(2 wx^2) + (y-cy)^2/(2 wy^2))), peak 1 at the center.
    Gaussian { center: (f64, f64), width: (f64, f64) },
    /// Modulated envelope e^{2 pi i (xi01 x + xi02 y)} * gaussian(eps * (x - c)).
    WavePacket { center: (f64, f64), width: (f64, f64), modulation: (f64, f64), eps: f64 },
    /// Real field: unit complex Gaussian coefficients on the listed mode
    /// indices (cross product), hermitian-symmetrized. Deterministic in seed.
    BandLimitedRandom { x_indices: Vec<i64>, y_indices: Vec<i64>, seed: u64 },
    /// Spectral placement of the recovery packet: per-axis profile
    /// theta((xi - c)/eps), discretely normalized, scaled by eps^-2.
    LemmaPhi { carrier: (f64, f64), eps: f64 },
    /// Spectrum Psi_hat((xi - c)/eps) with Psi_hat = theta(t/4) per axis
    /// (identically 1 on [-2, 2]^2 before rescaling).
    LemmaPsi { carrier: (f64, f64), eps: f64 },
}

pub const BOUNDARY_PEAK_RATIO: f64 = 1e-8;

/// Max |f| over the seam (the row and column diametrically opposite the
/// center), used by the essential-support check.
fn seam_max(f: &Field, center: (f64, f64)) -> f64 {
    let n = f.geo.n;
    let step = f.geo.l / n as f64;
    let jc = ((center.0 / step).round() as i64 + (n / 2) as i64).rem_euclid(n as i64) as usize;
    let lc = ((center.1 / step).round() as i64 + (n / 2) as i64).rem_euclid(n as i64) as usize;
    let mut m: f64 = 0.0;
    for b in 0..n {
        m = m.max(f.at(jc, b).norm()).max(f.at(b, lc).norm());
    }
    m
}

/// Per-axis lemma-phi spectrum samples: theta((xi - c)/eps) at grid
/// frequencies, normalized so mesh * sum = 1, mesh = 1/(L eps).
fn lemma_axis(geo: Geometry, c: f64, eps: f64) -> Vec<f64> {
    let n = geo.n;
    let mesh = 1.0 / (geo.l * eps);
    let mut v = vec![0.0; n];
    for (b, slot) in v.iter_mut().enumerate() {
        if b == n / 2 {
            continue;
        }
        *slot = crate::cutoffs::theta((geo.freq(b) - c) / eps);
    }
    let s: f64 = v.iter().sum::<f64>() * mesh;
    for slot in &mut v {
        *slot /= s;
    }
    v
}

/// Sample a generator on the grid. Errors when the essential support leaks
/// through the box boundary (aliasing risk).
pub fn sample(gen: &Generator, geo: Geometry) -> Result<Field, CoreError> {
    let field = match gen {
        Generator::Gaussian { center, width } => Field::from_fn(geo, |x, y| {
            let dx = per_min(x - center.0, geo.l);
            let dy = per_min(y - center.1, geo.l);
            Complex64::new(
                (-(dx * dx / (2.0 * width.0 * width.0) + dy * dy / (2.0 * width.1 * width.1)))
                    .exp(),
                0.0,
            )
        }),
        Generator::WavePacket { center, width, modulation, eps } => Field::from_fn(geo, |x, y| {
            let dx = per_min(x - center.0, geo.l) * eps;
            let dy = per_min(y - center.1, geo.l) * eps;
            let env =
                (-(dx * dx / (2.0 * width.0 * width.0) + dy * dy / (2.0 * width.1 * width.1))).exp();
            Complex64::from_polar(env, 2.0 * PI * (modulation.0 * x + modulation.1 * y))
        }),
        Generator::BandLimitedRandom { x_indices, y_indices, seed } => {
            let n = geo.n;
            let half = n as i64 / 2;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut spec = Field::zeros(geo);
            for &i1 in x_indices {
                for &i2 in y_indices {
                    if i1.abs() >= half || i2.abs() >= half {
                        return Err(CoreError::Geometry(format!(
                            "mode ({}, {}) outside the representable range",
                            i1, i2
                        )));
                    }
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    // c multiplies the plane wave e^{2 pi i (i1 x + i2 y)/L}
                    let c = Complex64::new(re, im) * geo.l * geo.l;
                    let b = geo.bin(i1) * n + geo.bin(i2);
                    let bc = geo.bin(-i1) * n + geo.bin(-i2);
                    spec.values[b] += c;
                    spec.values[bc] += c.conj();
                }
            }
            return Ok(inverse_transform(&spec, Axes::Both));
        }
        Generator::LemmaPhi { carrier, eps } => {
            let ax = lemma_axis(geo, carrier.0, *eps);
            let ay = lemma_axis(geo, carrier.1, *eps);
            let n = geo.n;
            let mut spec = Field::zeros(geo);
            let scale = eps.powi(-2);
            for b1 in 0..n {
                for b2 in 0..n {
                    spec.values[b1 * n + b2] = Complex64::new(ax[b1] * ay[b2] * scale, 0.0);
                }
            }
            inverse_transform(&spec, Axes::Both)
        }
        Generator::LemmaPsi { carrier, eps } => {
            let n = geo.n;
            let mut spec = Field::zeros(geo);
            for b1 in 0..n {
                if b1 == n / 2 {
                    continue;
                }
                let u = (geo.freq(b1) - carrier.0) / eps;
                for b2 in 0..n {
                    if b2 == n / 2 {
                        continue;
                    }
                    let v = (geo.freq(b2) - carrier.1) / eps;
                    spec.values[b1 * n + b2] = Complex64::new(
                        crate::cutoffs::theta(u / 4.0) * crate::cutoffs::theta(v / 4.0),
                        0.0,
                    );
                }
            }
            inverse_transform(&spec, Axes::Both)
        }
    };
    match gen {
        Generator::BandLimitedRandom { .. } => {}
        Generator::LemmaPhi { carrier, eps } | Generator::LemmaPsi { carrier, eps } => {
            // Spectrally placed packets have Schwartz tails in space, so the
            // seam guard would reject them at any workable box size. What
            // signals aliasing for them is spectral leakage: re-transform and
            // insist the stated support holds.
            let radius = match gen {
                Generator::LemmaPhi { .. } => 1.0,
                _ => 4.0,
            };
            let spec = forward_transform(&field, Axes::Both);
            let peak = spec.max_abs();
            let mut leak: f64 = 0.0;
            for b1 in 0..geo.n {
                let u = (geo.freq(b1) - carrier.0) / eps;
                for b2 in 0..geo.n {
                    let v = (geo.freq(b2) - carrier.1) / eps;
                    if u.abs() >= radius || v.abs() >= radius {
                        leak = leak.max(spec.values[b1 * geo.n + b2].norm());
                    }
                }
            }
            if leak > 1e-10 * peak {
                return Err(CoreError::Geometry(format!(
                    "spectral leakage {:.3e} outside the packet support exceeds 1e-10 x peak {:.3e}",
                    leak, peak
                )));
            }
        }
        _ => {
            let center = match gen {
                Generator::Gaussian { center, .. } | Generator::WavePacket { center, .. } => {
                    *center
                }
                _ => (0.0, 0.0),
            };
            let peak = field.max_abs();
            let seam = seam_max(&field, center);
            if seam > BOUNDARY_PEAK_RATIO * peak {
                return Err(CoreError::Geometry(format!(
                    "boundary magnitude {:.3e} exceeds {:.0e} x peak {:.3e}",
                    seam, BOUNDARY_PEAK_RATIO, peak
                )));
            }
        }
    }
    Ok(field)
}

/// Signed distance on the circle of circumference l.
fn per_min(d: f64, l: f64) -> f64 {
    let mut r = d % l;
    if r > l / 2.0 {
        r -= l;
    }
    if r < -l / 2.0 {
        r += l;
    }
    r
}

/// Non-isotropic dilation D_a at the generator level:
/// (D_a h)(x, y) = h(2^-a x, y).
pub fn dilate_generator(gen: &Generator, a: i32) -> Result<Generator, CoreError> {
    if a == 0 {
        return Ok(gen.clone());
    }
    let s = 2f64.powi(a);
    match gen {
        Generator::Gaussian { center, width } => Ok(Generator::Gaussian {
            center: (center.0 * s, center.1),
            width: (width.0 * s, width.1),
        }),
        Generator::WavePacket { center, width, modulation, eps } => Ok(Generator::WavePacket {
            center: (center.0 * s, center.1),
            width: (width.0 * s, width.1),
            modulation: (modulation.0 / s, modulation.1),
            eps: *eps,
        }),
        Generator::BandLimitedRandom { x_indices, y_indices, seed } => {
            let mut scaled = Vec::with_capacity(x_indices.len());
            for &i in x_indices {
                let v = i as f64 / s;
                if (v - v.round()).abs() > 1e-9 {
                    return Err(CoreError::Geometry(format!(
                        "dilation 2^{} takes x-index {} off the grid",
                        -a, i
                    )));
                }
                scaled.push(v.round() as i64);
            }
            Ok(Generator::BandLimitedRandom {
                x_indices: scaled,
                y_indices: y_indices.clone(),
                seed: *seed,
            })
        }
        Generator::LemmaPhi { .. } | Generator::LemmaPsi { .. } => Err(CoreError::Geometry(
            "recovery packets are isotropic; dilation is not defined for them".into(),
        )),
    }
}

const GFN_DTYPE: &str = "c128";
const GFN_LAYOUT: &str = "row-major";

#[derive(Serialize, Deserialize)]
struct GfnHeader {
    n: usize,
    l: f64,
    layout: String,
    dtype: String,
}

/// Write the `.gfn` format: one JSON header line, then raw little-endian
/// float64 interleaved (re, im), row-major.
pub fn write_gfn(f: &Field, w: &mut impl Write) -> Result<(), CoreError> {
    let header = GfnHeader {
        n: f.geo.n,
        l: f.geo.l,
        layout: GFN_LAYOUT.into(),
        dtype: GFN_DTYPE.into(),
    };
    let mut line = serde_json::to_string(&header).map_err(|e| CoreError::Io(e.to_string()))?;
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(|e| CoreError::Io(e.to_string()))?;
    let mut buf = Vec::with_capacity(f.values.len() * 16);
    for v in &f.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(|e| CoreError::Io(e.to_string()))
}

pub fn read_gfn(r: &mut impl Read) -> Result<Field, CoreError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| CoreError::Io(e.to_string()))?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| CoreError::Io("missing .gfn header line".into()))?;
    let header: GfnHeader = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| CoreError::Io(format!("bad .gfn header: {}", e)))?;
    if header.layout != GFN_LAYOUT || header.dtype != GFN_DTYPE {
        return Err(CoreError::Io(format!(
            "unsupported .gfn layout/dtype: {}/{}",
            header.layout, header.dtype
        )));
    }
    let geo = Geometry::new(header.n, header.l)?;
    let payload = &bytes[nl + 1..];
    let expected = header.n * header.n * 16;
    if payload.len() != expected {
        return Err(CoreError::Io(format!(
            ".gfn payload is {} bytes, expected {}",
            payload.len(),
            expected
        )));
    }
    let mut values = Vec::with_capacity(header.n * header.n);
    for chunk in payload.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    Ok(Field { geo, values })
}
