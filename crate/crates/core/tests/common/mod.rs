#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use flaglet::flag_transform::{BandLimit, FlagCoefficients};

/// Golub-Welsch for a symmetric tridiagonal Jacobi matrix.
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Generalized Gauss-Laguerre rule for `x^alpha e^-x` on `[0, inf)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| (i as f64 * (i as f64 + alpha)).sqrt()).collect();
    golub_welsch(&diag, &off, libm_gamma(alpha + 1.0))
}

/// Gauss-Legendre rule on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|i| {
            let i = i as f64;
            i / (4.0 * i * i - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &off, 2.0)
}

/// Gamma for small positive integers and half-integers.
pub fn libm_gamma(x: f64) -> f64 {
    if x == x.floor() {
        (1..x as u64).map(|k| k as f64).product()
    } else {
        let mut v = PI.sqrt();
        let mut a = 0.5;
        while a < x - 1e-9 {
            v *= a;
            a += 1.0;
        }
        v
    }
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` split into `panels`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
        total += 0.5 * h * s;
    }
    total
}

fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `L^(alpha)_n(x)` from the explicit finite sum; fine for small `n` and `x`.
pub fn laguerre_explicit(n: u64, alpha: u64, x: f64) -> f64 {
    (0..=n)
        .map(|i| {
            let fact: f64 = (1..=i).map(|k| k as f64).product();
            (-1f64).powi(i as i32) * binom(n + alpha, n - i) * x.powi(i as i32) / fact
        })
        .sum()
}

/// `K_p(r)` straight from its definition with factorials.
pub fn k_explicit(p: u64, r: f64, tau: f64) -> f64 {
    let fp: f64 = (1..=p).map(|k| k as f64).product();
    let fp2: f64 = (1..=p + 2).map(|k| k as f64).product();
    (fp / fp2).sqrt() * (-r / (2.0 * tau)).exp() / tau.powf(1.5) * laguerre_explicit(p, 2, r / tau)
}

/// `Y_lm` from the explicit associated Legendre sum; `l <= 12`.
pub fn ylm_explicit(l: i64, m: i64, theta: f64, phi: f64) -> Complex64 {
    let fact = |n: i64| -> f64 { (1..=n).map(|k| k as f64).product() };
    let am = m.abs();
    let x = theta.cos();
    let s = theta.sin();
    // P_l^|m|(x) = (-1)^m (1 - x^2)^(m/2) d^m/dx^m P_l(x), Rodrigues coefficients.
    let mut deriv = 0.0;
    for k in 0..=(l / 2) {
        let power = l - 2 * k;
        if power < am {
            continue;
        }
        let c = (-1f64).powi(k as i32) * fact(2 * l - 2 * k)
            / (2f64.powi(l as i32) * fact(k) * fact(l - k) * fact(l - 2 * k));
        let dfac = fact(power) / fact(power - am);
        deriv += c * dfac * x.powi((power - am) as i32);
    }
    let plm = (-1f64).powi(am as i32) * s.powi(am as i32) * deriv;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - am) / fact(l + am)).sqrt();
    let y = Complex64::from_polar(norm * plm, am as f64 * phi);
    if m < 0 {
        y.conj() * (-1f64).powi(am as i32)
    } else {
        y
    }
}

/// Spherical Bessel `j_l(x)` by Miller's downward recurrence.
pub fn sph_jl(l: usize, x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let mut term = 1.0;
        for k in 1..=l {
            term *= x / (2 * k + 1) as f64;
        }
        let x2 = x * x;
        let c1 = x2 / (2.0 * (2 * l + 3) as f64);
        let c2 = x2 * x2 / (8.0 * ((2 * l + 3) * (2 * l + 5)) as f64);
        return term * (1.0 - c1 + c2);
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    if (l as f64) < x {
        let mut a = j0;
        let mut b = x.sin() / (x * x) - x.cos() / x;
        for n in 1..l {
            let c = (2 * n + 1) as f64 / x * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    let start = l + 20 + (x as usize) + ((40.0 * (l as f64)).sqrt() as usize);
    let (mut hi, mut mid) = (0.0f64, 1e-300f64);
    let mut at_l = 0.0;
    for n in (1..=start).rev() {
        let lo = (2 * n + 1) as f64 / x * mid - hi;
        hi = mid;
        mid = lo;
        if n - 1 == l {
            at_l = mid;
        }
        if mid.abs() > 1e250 {
            hi /= 1e250;
            mid /= 1e250;
            at_l /= 1e250;
        }
    }
    at_l * j0 / mid
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_coefficients(bl: BandLimit, seed: u64) -> FlagCoefficients {
    let mut r = rng(seed);
    let v = (0..bl.coefficient_count())
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    FlagCoefficients::from_values(bl, v).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
