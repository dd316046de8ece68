use num_complex::Complex64;
use proptest::prelude::*;
use twistpar::cutoffs::{theta, vartheta};
use twistpar::grid::{
    forward_transform, inverse_transform, lp_norm, partial_derivative, translate, Axes, Field,
    Geometry,
};
use twistpar::operators::{apply_twisted_multiplier, TwistedSymbol};

const N: usize = 16;

fn field_from(l: f64, cells: &[(f64, f64)]) -> Field {
    let geo = Geometry::new(N, l).unwrap();
    let mut f = Field::zeros(geo);
    for (slot, &(re, im)) in f.values.iter_mut().zip(cells) {
        *slot = Complex64::new(re, im);
    }
    f
}

fn cells() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1e3..1e3f64, -1e3..1e3f64), N * N)
}

fn box_l() -> impl Strategy<Value = f64> {
    proptest::sample::select(vec![8.0, 16.0, 32.0])
}

fn gap(a: &Field, b: &Field) -> f64 {
    lp_norm(&a.sub(b), 2.0) / (1.0 + lp_norm(a, 2.0) + lp_norm(b, 2.0))
}

proptest! {
    #[test]
    fn theta_is_an_even_monotone_plateau(tau in -1e4..1e4f64, shrink in 0.0..1.0f64) {
        let v = theta(tau);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, theta(-tau));
        // moving toward the origin never lowers the value
        prop_assert!(theta(tau * shrink) >= v);
        prop_assert!((0.0..=1.0).contains(&vartheta(tau)));
    }

    #[test]
    fn annuli_telescope_between_any_scales(
        tau in prop_oneof![-1e4..-1e-4f64, 1e-4..1e4f64],
        k_min in -8..0i32,
        span in 1..10i32,
    ) {
        let k_max = k_min + span;
        let sum: f64 = (k_min..=k_max).map(|k| vartheta(2f64.powi(-k) * tau)).sum();
        let want = theta(2f64.powi(-k_max - 1) * tau) - theta(2f64.powi(-k_min) * tau);
        prop_assert!((sum - want).abs() <= 1e-14, "tau {}: {} vs {}", tau, sum, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_round_trip_and_preserve_energy(cells in cells(), l in box_l()) {
        let f = field_from(l, &cells);
        let spec = forward_transform(&f, Axes::Both);
        let back = inverse_transform(&spec, Axes::Both);
        prop_assert!(gap(&back, &f) <= 1e-12);

        let spec_energy: f64 = spec.values.iter().map(|v| v.norm_sqr()).sum();
        let space_energy = lp_norm(&f, 2.0).powi(2);
        prop_assert!(
            (spec_energy / (l * l) - space_energy).abs() <= 1e-12 * (1.0 + space_energy)
        );
    }

    #[test]
    fn lp_norms_scale_and_obey_the_triangle_inequality(
        a in cells(),
        b in cells(),
        c in -100.0..100.0f64,
        p in 1.0..6.0f64,
    ) {
        let f = field_from(16.0, &a);
        let g = field_from(16.0, &b);
        let nf = lp_norm(&f, p);
        let scaled = lp_norm(&f.scaled(Complex64::new(c, 0.0)), p);
        prop_assert!((scaled - c.abs() * nf).abs() <= 1e-11 * (1.0 + scaled));
        let sum = lp_norm(&f.add(&g), p);
        prop_assert!(sum <= nf + lp_norm(&g, p) + 1e-11 * (1.0 + sum));
    }

    #[test]
    fn derivatives_are_linear(
        a in cells(),
        b in cells(),
        c in -10.0..10.0f64,
        beta in 1..3usize,
    ) {
        let f = field_from(16.0, &a);
        let g = field_from(16.0, &b);
        for axis in [Axes::X, Axes::Y] {
            let lhs = partial_derivative(&f.add(&g.scaled(Complex64::new(c, 0.0))), axis, beta);
            let rhs = partial_derivative(&f, axis, beta)
                .add(&partial_derivative(&g, axis, beta).scaled(Complex64::new(c, 0.0)));
            prop_assert!(gap(&lhs, &rhs) <= 1e-10);
        }
    }

    #[test]
    fn whole_pixel_translations_permute_the_grid(
        a in cells(),
        jx in -40..40i64,
        jy in -40..40i64,
    ) {
        let f = field_from(16.0, &a);
        let step = f.geo.l / N as f64;
        let shifted = translate(&f, (jx as f64 * step, jy as f64 * step));
        for j in 0..N {
            for l in 0..N {
                let sj = (j as i64 + jx).rem_euclid(N as i64) as usize;
                let sl = (l as i64 + jy).rem_euclid(N as i64) as usize;
                prop_assert_eq!(shifted.at(j, l), f.at(sj, sl));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn twisted_multipliers_are_bilinear(
        a in cells(),
        b in cells(),
        c in cells(),
        re in -10.0..10.0f64,
        im in -10.0..10.0f64,
    ) {
        let m = TwistedSymbol::new("wiggle", None, false, |t1, t2| {
            Complex64::new((0.37 * t1).cos() * (0.11 * t2).sin(), 0.3 * (t1 + t2).cos())
        });
        let alpha = Complex64::new(re, im);
        let f1 = field_from(16.0, &a);
        let f2 = field_from(16.0, &b);
        let g = field_from(16.0, &c);
        let lhs = apply_twisted_multiplier(&m, &f1.scaled(alpha).add(&f2), &g);
        let rhs = apply_twisted_multiplier(&m, &f1, &g)
            .scaled(alpha)
            .add(&apply_twisted_multiplier(&m, &f2, &g));
        prop_assert!(gap(&lhs, &rhs) <= 1e-9);

        let sym = apply_twisted_multiplier(&m, &g, &f1.scaled(alpha).add(&f2));
        let sym_rhs = apply_twisted_multiplier(&m, &g, &f1)
            .scaled(alpha)
            .add(&apply_twisted_multiplier(&m, &g, &f2));
        prop_assert!(gap(&sym, &sym_rhs) <= 1e-9);
    }
}
