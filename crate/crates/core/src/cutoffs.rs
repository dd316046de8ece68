//! Smooth cutoff calculus: the plateau cutoff `theta`, the annular bump
//! `vartheta`, exact derivatives via truncated Taylor jets, Schwartz seminorm
//! estimation, and the modulated profile families used by the decomposition.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// exp(-1/t) for t > 0, else 0. Smooth on all of R.
pub fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Even smooth step: 1 on |tau| <= 1/2, 0 on |tau| >= 1,
/// h(1-|tau|) / (h(1-|tau|) + h(|tau|-1/2)) in between.
pub fn theta(tau: f64) -> f64 {
    let t = tau.abs();
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = h(1.0 - t);
        let b = h(t - 0.5);
        a / (a + b)
    }
}

/// Annular bump theta(tau/2) - theta(tau): supported on 1/2 <= |tau| <= 2,
/// equal to 1 only at |tau| = 1.
pub fn vartheta(tau: f64) -> f64 {
    theta(tau / 2.0) - theta(tau)
}

pub const MAX_DERIVATIVE_ORDER: usize = 6;

/// Truncated Taylor jet: coefficients f(t0), f'(t0)/1!, ..., f^(6)(t0)/6!.
#[derive(Clone, Copy)]
struct Jet([f64; 7]);

impl Jet {
    fn add(self, o: Jet) -> Jet {
        let mut r = [0.0; 7];
        for k in 0..7 {
            r[k] = self.0[k] + o.0[k];
        }
        Jet(r)
    }

    fn exp(self) -> Jet {
        // e' = u' e  =>  k e_k = sum_{j=1..k} j u_j e_{k-j}
        let mut e = [0.0; 7];
        e[0] = self.0[0].exp();
        for k in 1..7 {
            let mut s = 0.0;
            for j in 1..=k {
                s += (j as f64) * self.0[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    fn div(self, den: Jet) -> Jet {
        let mut q = [0.0; 7];
        q[0] = self.0[0] / den.0[0];
        for k in 1..7 {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= den.0[j] * q[k - j];
            }
            q[k] = s / den.0[0];
        }
        Jet(q)
    }

    /// Flip the sign of the expansion variable (composition with t -> -t).
    fn reflect(self) -> Jet {
        let mut r = self.0;
        for (k, v) in r.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        Jet(r)
    }
}

/// Jet of t -> exp(-1/t) at t0 > 0: inner jet c_k = -(-1)^k t0^{-(k+1)}, then exp.
fn h_jet(t0: f64) -> Jet {
    debug_assert!(t0 > 0.0);
    let mut c = [0.0; 7];
    let mut p = 1.0 / t0;
    for (k, v) in c.iter_mut().enumerate() {
        *v = if k % 2 == 0 { -p } else { p };
        p /= t0;
    }
    Jet(c).exp()
}

/// theta and all derivatives up to order 6 at tau, exact to roundoff.
/// Outside the open transition bands every derivative of positive order is 0
/// (the cutoff is C-infinity flat at the glue points).
fn theta_jet(tau: f64) -> Jet {
    let t = tau.abs();
    if t <= 0.5 {
        let mut r = [0.0; 7];
        r[0] = 1.0;
        return Jet(r);
    }
    if t >= 1.0 {
        return Jet([0.0; 7]);
    }
    // A = h(1-t) (inner slope -1), B = h(t-1/2) (inner slope +1)
    let a = h_jet(1.0 - t).reflect();
    let b = h_jet(t - 0.5);
    let q = a.div(a.add(b));
    if tau < 0.0 {
        q.reflect()
    } else {
        q
    }
}

/// order-th derivative of theta at tau, order <= 6.
pub fn theta_deriv(tau: f64, order: usize) -> f64 {
    assert!(order <= MAX_DERIVATIVE_ORDER, "derivative order {} > 6", order);
    let jet = theta_jet(tau);
    let mut fact = 1.0;
    for i in 1..=order {
        fact *= i as f64;
    }
    jet.0[order] * fact
}

/// order-th derivative of vartheta at tau, order <= 6.
pub fn vartheta_deriv(tau: f64, order: usize) -> f64 {
    theta_deriv(tau / 2.0, order) / 2f64.powi(order as i32) - theta_deriv(tau, order)
}

/// sup over the samples of |sum_{k=k_min..k_max} vartheta(2^-k tau) - 1|.
/// The telescoping identity makes this 0 for 2^k_min <= |tau| <= 2^k_max.
pub fn partition_check(k_min: i32, k_max: i32, taus: &[f64]) -> f64 {
    assert!(k_min < k_max);
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let mut s = 0.0;
        for k in k_min..=k_max {
            s += vartheta(tau * 2f64.powi(-k));
        }
        worst = worst.max((s - 1.0).abs());
    }
    worst
}

/// Log-spaced magnitudes covering [2^k_min, 2^k_max], both signs.
pub fn partition_sample(k_min: i32, k_max: i32, count: usize) -> Vec<f64> {
    let lo = 2f64.powi(k_min).ln();
    let hi = 2f64.powi(k_max).ln();
    (0..count)
        .map(|i| {
            let t = (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp();
            if i % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .collect()
}

/// A profile known by its frequency side: spectrum evaluator plus the radius
/// outside which the spectrum vanishes.
#[derive(Clone)]
pub struct SchwartzProfile {
    pub spectrum: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub support_radius: f64,
}

impl SchwartzProfile {
    pub fn new<F>(support_radius: f64, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        SchwartzProfile { spectrum: Arc::new(f), support_radius }
    }

    pub fn theta() -> Self {
        Self::new(1.0, |t| Complex64::new(theta(t), 0.0))
    }

    pub fn vartheta() -> Self {
        Self::new(2.0, |t| Complex64::new(vartheta(t), 0.0))
    }

    /// Space-side samples of the beta-th derivative on a uniform mesh of
    /// `mesh` points covering [-extent/2, extent/2): inverse transform of
    /// (2 pi i tau)^beta * spectrum. Returns (points, values).
    pub fn space_samples(&self, beta: usize, mesh: usize, extent: f64) -> (Vec<f64>, Vec<Complex64>) {
        assert!(mesh.is_power_of_two());
        let dt = extent / mesh as f64;
        let dtau = 1.0 / extent;
        // spectrum samples at j*dtau for |j*dtau| <= support_radius, wrapped into
        // FFT bin order; inverse unnormalized FFT then scaled by dtau gives the
        // Riemann-sum inverse transform on the t-mesh.
        let mut buf = vec![Complex64::new(0.0, 0.0); mesh];
        let jmax = (self.support_radius / dtau).ceil() as i64;
        assert!((jmax as usize) < mesh / 2, "mesh too coarse for spectrum support");
        for j in -jmax..=jmax {
            let tau = j as f64 * dtau;
            let w = Complex64::new(0.0, 2.0 * PI * tau).powu(beta as u32);
            buf[j.rem_euclid(mesh as i64) as usize] = w * (self.spectrum)(tau);
        }
        let fft = crate::grid::fft_plan(mesh, true);
        fft.process(&mut buf);
        // bin j of the inverse corresponds to t = j*dt; recentre to [-extent/2, extent/2)
        let mut points = Vec::with_capacity(mesh);
        let mut values = Vec::with_capacity(mesh);
        for j in 0..mesh {
            let js = if j < mesh / 2 { j as i64 } else { j as i64 - mesh as i64 };
            points.push(js as f64 * dt);
            values.push(buf[j] * dtau);
        }
        // sort by t for convenience
        let mut idx: Vec<usize> = (0..mesh).collect();
        idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap());
        (
            idx.iter().map(|&i| points[i]).collect(),
            idx.iter().map(|&i| values[i]).collect(),
        )
    }
}

pub const SEMINORM_MESH: usize = 1 << 14;

#[derive(Debug, thiserror::Error)]
#[error("seminorm sup has not converged: boundary tail {tail:.3e} exceeds 1% of sup {sup:.3e}")]
pub struct SeminormTailError {
    pub sup: f64,
    pub tail: f64,
}

/// Schwartz seminorm sup_t |t|^alpha |d^beta phi(t)| over a dense mesh,
/// alpha, beta <= 3. Errors if the boundary tail is above 1% of the sup.
pub fn schwartz_seminorm(
    profile: &SchwartzProfile,
    alpha: usize,
    beta: usize,
) -> Result<f64, SeminormTailError> {
    assert!(alpha <= 3 && beta <= 3);
    // extent chosen so band-limited tails are far below peak: the mesh spans
    // 1/dtau and dtau shrinks with support radius fixed by the profile
    let extent = (256.0 / profile.support_radius).max(64.0);
    let (points, values) = profile.space_samples(beta, SEMINORM_MESH, extent);
    let mut sup: f64 = 0.0;
    for (t, v) in points.iter().zip(values.iter()) {
        sup = sup.max(t.abs().powi(alpha as i32) * v.norm());
    }
    let edge = points.len() - 1;
    let tail = (points[0].abs().powi(alpha as i32) * values[0].norm())
        .max(points[edge].abs().powi(alpha as i32) * values[edge].norm());
    if tail > 0.01 * sup {
        return Err(SeminormTailError { sup, tail });
    }
    Ok(sup)
}

/// Which side of the synthesis a modulated profile lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulationSide {
    /// spectrum theta(2^-a-4 tau) e^{i pi 2^-a-4 n tau}
    Phi,
    /// spectrum vartheta(2^-i tau) e^{i pi 2^-a-4 n tau}, annulus index i
    Psi(i32),
}

#[derive(Clone)]
pub struct ModulatedProfile {
    pub n: i64,
    pub side: ModulationSide,
    pub shift_exponent: u32,
    pub profile: SchwartzProfile,
}

/// Construct phi^(n) (side = Phi) or psi^(n,i) (side = Psi(i)).
pub fn make_modulated(n: i64, side: ModulationSide, a: u32) -> ModulatedProfile {
    let scale = 2f64.powi(-(a as i32) - 4);
    let profile = match side {
        ModulationSide::Phi => SchwartzProfile::new(2f64.powi(a as i32 + 4), move |t| {
            Complex64::from_polar(1.0, PI * scale * n as f64 * t) * theta(scale * t)
        }),
        ModulationSide::Psi(i) => SchwartzProfile::new(2f64.powi(i + 1), move |t| {
            Complex64::from_polar(1.0, PI * scale * n as f64 * t) * vartheta(2f64.powi(-i) * t)
        }),
    };
    ModulatedProfile { n, side, shift_exponent: a, profile }
}
