mod common;

use common::{k_explicit, max_abs_diff, random_coefficients, rng, ylm_explicit};
use flaglet::flag_transform::*;
use flaglet::radial_laguerre::RadialBasis;
use flaglet::sphere_harmonics::SamplingScheme;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

fn grid(l: usize, p: usize, tau: f64) -> BallGrid {
    BallGrid::new(BandLimit::new(l, p, tau).unwrap()).unwrap()
}

#[test]
fn sample_counts() {
    let bl = BandLimit::new(8, 5, 1.0).unwrap();
    assert_eq!(sample_count(&bl, SamplingScheme::GaussLegendre), 5 * 8 * 15);
    assert_eq!(sample_count(&bl, SamplingScheme::Equiangular), 5 * (15 * 7 + 1));
    assert_eq!(grid(8, 5, 1.0).len(), 600);
    assert_eq!(bl.coefficient_count(), 320);
    let big = BandLimit::new(64, 64, 1.0).unwrap();
    assert_eq!(sample_count(&big, SamplingScheme::Equiangular), 512128);
    assert_eq!(sample_count(&big, SamplingScheme::GaussLegendre), 520192);
    let one = BandLimit::new(1, 1, 1.0).unwrap();
    assert_eq!(sample_count(&one, SamplingScheme::Equiangular), 1);
}

#[test]
fn first_basis_function_on_the_grid() {
    let g = grid(5, 4, 0.7);
    let mut c = FlagCoefficients::zeros(g.bandlimit());
    c.set(0, 0, 0, Complex64::new(1.0, 0.0));
    let f = flag_inverse(&c, &g).unwrap();
    for (v, &(r, _, _)) in f.iter().zip(&g.points()) {
        let want = k_explicit(0, r, 0.7) / (4.0 * PI).sqrt();
        assert!((v - want).norm() < 1e-15);
    }
    let off = flag_eval(&c, &[(0.4, 1.1, 2.0)])[0];
    assert!((off.re - k_explicit(0, 0.4, 0.7) / (4.0 * PI).sqrt()).abs() < 1e-15);
    let back = flag_forward(&f, &g).unwrap();
    assert!((back.get(0, 0, 0) - 1.0).norm() < 1e-12);
    assert!(back.values()[1..].iter().all(|v| v.norm() < 1e-12));
    let zero = FlagCoefficients::zeros(g.bandlimit());
    assert!(flag_inverse(&zero, &g).unwrap().iter().all(|v| v.norm() == 0.0));
    assert!(flag_eval(&zero, &g.points()[..10]).iter().all(|v| v.norm() == 0.0));
    let zs = vec![Complex64::new(0.0, 0.0); g.len()];
    assert!(flag_forward(&zs, &g).unwrap().values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn basis_is_orthonormal_on_the_grid() {
    let (l, p, tau) = (8usize, 8usize, 0.5);
    let g = grid(l, p, tau);
    let pts = g.points();
    let mut basis = Vec::new();
    for pp in 0..p {
        for ll in 0..l {
            for m in -(ll as i64)..=(ll as i64) {
                let mut c = FlagCoefficients::zeros(g.bandlimit());
                c.set(ll, m, pp, Complex64::new(1.0, 0.0));
                basis.push(flag_inverse(&c, &g).unwrap());
            }
        }
    }
    let n_theta = g.sampling().n_theta();
    let n_phi = g.sampling().n_phi();
    let weights: Vec<f64> = (0..pts.len())
        .map(|i| g.weight(i / (n_theta * n_phi), (i / n_phi) % n_theta))
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let ip: Complex64 = basis[a]
                .iter()
                .zip(&basis[b])
                .zip(&weights)
                .map(|((x, y), w)| x * y.conj() * w)
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - want).norm());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn convolution_evaluates_translated_inner_product() {
    // (f * h)(s, north pole) = int f(x) conj(T_s h)(x) d^3x on the exact grid rule.
    let (l, p, tau) = (9usize, 9usize, 0.3);
    let g = grid(l, p, tau);
    let f = random_coefficients(g.bandlimit(), 12);
    let fs = flag_inverse(&f, &g).unwrap();
    let mut r = rng(13);
    let h: Vec<Complex64> = (0..l * p)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    let conv = ball_convolve(&f, &h).unwrap();
    let basis = RadialBasis::new(p, tau).unwrap();
    let n_theta = g.sampling().n_theta();
    let n_phi = g.sampling().n_phi();
    for &s in &[0.2, 1.0, 3.5] {
        let k = basis.eval_all(s);
        let mut th = FlagCoefficients::zeros(g.bandlimit());
        for pp in 0..p {
            for ll in 0..l {
                th.set(ll, 0, pp, h[pp * l + ll] * k[pp]);
            }
        }
        let hs = flag_inverse(&th, &g).unwrap();
        let mut inner = Complex64::new(0.0, 0.0);
        for (i, (a, b)) in fs.iter().zip(&hs).enumerate() {
            inner += a * b.conj() * g.weight(i / (n_theta * n_phi), (i / n_phi) % n_theta);
        }
        let direct = flag_eval(&conv, &[(s, 0.0, 0.0)])[0];
        assert!(
            (inner - direct).norm() < 1e-9 * direct.norm().max(1.0),
            "s={s}: {inner} vs {direct}"
        );
    }
}

#[test]
fn convolutions_commute() {
    let bl = BandLimit::new(6, 5, 1.0).unwrap();
    let f = random_coefficients(bl, 30);
    let mut r = rng(31);
    let mut kernel = || -> Vec<Complex64> {
        (0..30)
            .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect()
    };
    let (h, k) = (kernel(), kernel());
    let a = ball_convolve(&ball_convolve(&f, &h).unwrap(), &k).unwrap();
    let b = ball_convolve(&ball_convolve(&f, &k).unwrap(), &h).unwrap();
    // diagonal scalings commute up to the rounding of each product
    assert!(max_abs_diff(a.values(), b.values()) < 1e-14);
    let zero = ball_convolve(&FlagCoefficients::zeros(bl), &h).unwrap();
    assert!(zero.values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn invalid_band_limits() {
    assert!(BandLimit::new(0, 4, 1.0).is_err());
    assert!(BandLimit::new(4, 0, 1.0).is_err());
    assert!(BandLimit::new(4, 4, 0.0).is_err());
    assert!(BandLimit::new(4, 4, f64::NAN).is_err());
    let g = grid(4, 4, 1.0);
    assert!(flag_forward(&[Complex64::new(0.0, 0.0); 5], &g).is_err());
    let other = FlagCoefficients::zeros(BandLimit::new(5, 4, 1.0).unwrap());
    assert!(flag_inverse(&other, &g).is_err());
}

#[test]
fn flat_layout() {
    assert_eq!(flat_index(0, 0, 0, 4), 0);
    assert_eq!(flat_index(1, -1, 0, 4), 1);
    assert_eq!(flat_index(3, 3, 0, 4), 15);
    assert_eq!(flat_index(0, 0, 2, 4), 32);
}

#[test]
fn forward_of_single_basis_product() {
    let (l, p, tau) = (6usize, 5usize, 0.6);
    let g = grid(l, p, tau);
    for &(ll, m, pp) in &[(0usize, 0i64, 0usize), (3, -2, 4), (5, 5, 1)] {
        let samples: Vec<Complex64> = g
            .points()
            .iter()
            .map(|&(r, t, ph)| ylm_explicit(ll as i64, m, t, ph) * k_explicit(pp as u64, r, tau))
            .collect();
        let c = flag_forward(&samples, &g).unwrap();
        for (i, v) in c.values().iter().enumerate() {
            let want = if i == flat_index(ll, m, pp, l) { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-11, "({ll},{m},{pp}) slot {i}: {v}");
        }
    }
}

#[test]
fn round_trip_rectangular_band_limits() {
    for &(l, p) in &[(1usize, 1usize), (1, 9), (9, 1), (16, 3), (3, 16), (32, 32)] {
        let g = grid(l, p, 0.1);
        let c = random_coefficients(g.bandlimit(), (l * 100 + p) as u64);
        let back = flag_forward(&flag_inverse(&c, &g).unwrap(), &g).unwrap();
        let err = max_abs_diff(c.values(), back.values());
        assert!(err < 1e-11, "({l},{p}): {err}");
    }
}

#[test]
fn pass_order_does_not_matter() {
    let g = grid(10, 12, 0.3);
    let c = random_coefficients(g.bandlimit(), 8);
    let f = flag_inverse(&c, &g).unwrap();
    let a = flag_forward(&f, &g).unwrap();
    let b = flag_forward_radial_first(&f, &g).unwrap();
    assert!(max_abs_diff(a.values(), b.values()) < 1e-12);
}

#[test]
fn direct_evaluation_matches_grid() {
    let g = grid(7, 6, 0.4);
    let c = random_coefficients(g.bandlimit(), 2);
    let f = flag_inverse(&c, &g).unwrap();
    let direct = flag_eval(&c, &g.points());
    assert!(max_abs_diff(&f, &direct) < 1e-11);
}

#[test]
fn identity_kernel() {
    let bl = BandLimit::new(6, 4, 1.0).unwrap();
    let c = random_coefficients(bl, 11);
    let h: Vec<Complex64> = (0..bl.p)
        .flat_map(|_| (0..bl.l).map(|l| Complex64::new(((2 * l + 1) as f64 / (4.0 * PI)).sqrt(), 0.0)))
        .collect();
    let out = ball_convolve(&c, &h).unwrap();
    assert!(max_abs_diff(c.values(), out.values()) < 1e-14);
    assert!(ball_convolve(&c, &h[1..]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval(l in 1usize..12, p in 1usize..12, seed in any::<u64>()) {
        let g = grid(l, p, 0.5);
        let c = random_coefficients(g.bandlimit(), seed);
        let f = flag_inverse(&c, &g).unwrap();
        let energy = g.integrate_norm_sqr(&f).unwrap();
        let coeff: f64 = c.values().iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((energy - coeff).abs() < 1e-10 * coeff);
    }

    #[test]
    fn linearity(l in 1usize..10, p in 1usize..10, s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0) {
        let g = grid(l, p, 1.0);
        let x = flag_inverse(&random_coefficients(g.bandlimit(), s1), &g).unwrap();
        let y = flag_inverse(&random_coefficients(g.bandlimit(), s2), &g).unwrap();
        let z: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| u * a + v).collect();
        let fx = flag_forward(&x, &g).unwrap();
        let fy = flag_forward(&y, &g).unwrap();
        let fz = flag_forward(&z, &g).unwrap();
        let combo: Vec<Complex64> = fx.values().iter().zip(fy.values()).map(|(u, v)| u * a + v).collect();
        prop_assert!(max_abs_diff(&combo, fz.values()) < 1e-11);
    }

    #[test]
    fn real_band_limited_signal_stays_real(l in 1usize..10, p in 1usize..8, seed in any::<u64>()) {
        let g = grid(l, p, 0.2);
        let c = random_coefficients(g.bandlimit(), seed);
        // symmetrise to the coefficients of a real field
        let mut sym = FlagCoefficients::zeros(g.bandlimit());
        for pp in 0..p {
            for ll in 0..l {
                for m in -(ll as i64)..=(ll as i64) {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let v = 0.5 * (c.get(ll, m, pp) + sign * c.get(ll, -m, pp).conj());
                    sym.set(ll, m, pp, v);
                }
            }
        }
        let f = flag_inverse(&sym, &g).unwrap();
        prop_assert!(f.iter().all(|v| v.im.abs() < 1e-12 * v.re.abs().max(1.0)));
    }
}
