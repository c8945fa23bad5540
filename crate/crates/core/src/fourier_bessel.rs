//! Exact Fourier-Bessel coefficients of Fourier-Laguerre band-limited signals.
//!
//! The projection of each radial basis function onto the spherical Bessel
//! functions,
//!
//! ```text
//! j_lp(k) = int r^2 K_p(r) j_l(kr) dr = sqrt(p! / (p+2)!) sum_j c^p_j mu^l_{j+2}(k),
//! ```
//!
//! is a finite sum of moments `mu^l_j` with closed forms in terms of the
//! Gauss hypergeometric function at `-4 (tau k)^2`.
//!
//! The sum over `j` alternates and cancels heavily, so moments are computed
//! in double-double arithmetic. With about 32 significant digits available,
//! results keep at least 1e-10 relative accuracy for `l, p <= 16`; the
//! cancellation grows roughly like `3^p` and accuracy degrades beyond that.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dd::Dd;
use crate::error::{invalid, Result};
use crate::flag_transform::FlagCoefficients;
use crate::sphere_harmonics::{lm_count, lm_index};

const SERIES_EPS: f64 = 1e-34;
const SERIES_MAX_TERMS: usize = 200_000;

#[inline]
fn pow2(k: i32) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((1023 + k) as u64) << 52)
    } else {
        2f64.powi(k)
    }
}

/// Double-double mantissa with a separate power-of-two exponent, so gamma
/// products far beyond the f64 range keep full precision.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: Dd,
    e: i32,
}

impl Scaled {
    const ONE: Scaled = Scaled { m: Dd::ONE, e: 0 };

    fn new(m: Dd) -> Scaled {
        Scaled { m, e: 0 }.normalized()
    }

    fn normalized(self) -> Scaled {
        if self.m.hi == 0.0 || !self.m.hi.is_finite() {
            return self;
        }
        let k = ((self.m.hi.to_bits() >> 52) & 0x7ff) as i32 - 1023;
        if k == 0 {
            return self;
        }
        let f = pow2(-k);
        Scaled {
            m: Dd {
                hi: self.m.hi * f,
                lo: self.m.lo * f,
            },
            e: self.e + k,
        }
    }

    fn mul(self, o: Scaled) -> Scaled {
        Scaled {
            m: self.m * o.m,
            e: self.e + o.e,
        }
        .normalized()
    }

    fn mul_dd(self, o: Dd) -> Scaled {
        self.mul(Scaled::new(o))
    }

    fn div(self, o: Scaled) -> Scaled {
        Scaled {
            m: self.m / o.m,
            e: self.e - o.e,
        }
        .normalized()
    }

    /// Mantissa expressed relative to `2^e_ref`.
    fn at(self, e_ref: i32) -> Dd {
        let shift = self.e - e_ref;
        if shift < -1100 || self.m.hi == 0.0 {
            return Dd::ZERO;
        }
        let f = pow2(shift);
        Dd {
            hi: self.m.hi * f,
            lo: self.m.lo * f,
        }
    }

    fn add(self, o: Scaled) -> Scaled {
        if self.m.hi == 0.0 {
            return o;
        }
        if o.m.hi == 0.0 {
            return self;
        }
        let e = self.e.max(o.e);
        Scaled {
            m: self.at(e) + o.at(e),
            e,
        }
        .normalized()
    }
}

/// `Gamma(x)` for `2x` a positive integer, as `(value, power of sqrt(pi))`.
fn gamma_half(twice: u32) -> (Scaled, u32) {
    let mut acc = Scaled::ONE;
    if twice.is_multiple_of(2) {
        for k in 1..twice / 2 {
            acc = acc.mul_dd(Dd::from_f64(k as f64));
        }
        (acc, 0)
    } else {
        for k in 1..=twice / 2 {
            acc = acc.mul_dd(Dd::from_f64(k as f64 - 0.5));
        }
        (acc, 1)
    }
}

fn sqrt_pi_ratio(num: u32, den: u32) -> Dd {
    if num >= den {
        sqrt_pi_power(num - den)
    } else {
        sqrt_pi_power(den - num).recip()
    }
}

fn sqrt_pi_power(n: u32) -> Dd {
    let mut v = Dd::PI.powi(n / 2);
    if n % 2 == 1 {
        v = v * Dd::SQRT_PI;
    }
    v
}

/// `sum_i (a)_i (b)_i / ((c)_i i!) x^i`, stopping when terms vanish or
/// become negligible. Parameters are exact multiples of one half.
fn hyp2f1_series(a: f64, b: f64, c: f64, x: Dd) -> Dd {
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for i in 0..SERIES_MAX_TERMS {
        let fi = i as f64;
        let num = Dd::from_f64(a + fi) * Dd::from_f64(b + fi);
        if num.is_zero() {
            break;
        }
        let den = Dd::from_f64(c + fi) * (fi + 1.0);
        term = term * num / den * x;
        sum = sum + term;
        if term.abs().hi <= SERIES_EPS * sum.abs().hi && fi > a.abs() + b.abs() {
            break;
        }
    }
    sum
}

/// Quantities shared by every moment at one wavenumber.
struct Wave {
    /// `1 / sqrt(1 + 4 kt^2)`
    s: Dd,
    /// `4 kt^2 / (1 + 4 kt^2)`
    w: Dd,
    /// `1 / (1 + 4 kt^2)`
    one_minus_w: Dd,
}

impl Wave {
    fn new(kt: f64) -> Wave {
        let two_kt = Dd::from_f64(2.0 * kt);
        let z = two_kt * two_kt;
        let u = Dd::ONE + z;
        let one_minus_w = u.recip();
        Wave {
            s: one_minus_w.sqrt(),
            w: z * one_minus_w,
            one_minus_w,
        }
    }
}

/// `2^j Gamma(j+l+1) / Gamma(l+3) * u^{(l+3)/2} * 2F1(a, b; c; -4kt^2)` for `j >= 2`.
///
/// Multiplying by [`common_factor`] gives the moment `mu^l_j`.
fn moment_part(l: usize, j: usize, wave: &Wave) -> Scaled {
    let mut gamma_ratio = Scaled::new(Dd::from_f64(pow2(j as i32)));
    for i in l + 3..=j + l {
        gamma_ratio = gamma_ratio.mul_dd(Dd::from_f64(i as f64));
    }
    let (lf, jf) = (l as f64, j as f64);
    let a = 0.5 * (jf + lf + 1.0);
    let b = 0.5 * (jf + lf) + 1.0;
    let c = lf + 1.5;
    let spow = |n: usize| wave.s.powi(n as u32);
    let hyp = if j > l && (j - l - 1).is_multiple_of(2) {
        // c - b is a non-positive integer: u^-a 2F1(a, c-b; c; w) terminates
        Scaled::new(spow(j - 2) * hyp2f1_series(a, c - b, c, wave.w))
    } else if j >= l + 2 {
        // c - a is a non-positive integer: u^-b 2F1(c-a, b; c; w) terminates
        Scaled::new(spow(j - 1) * hyp2f1_series(c - a, b, c, wave.w))
    } else {
        // All parameters positive: u^-a 2F1(A, B; C; w) with C - A - B = 1/2.
        let (aa, bb, cc) = (a, c - b, c);
        let f = if wave.w.hi <= 0.5 {
            Scaled::new(hyp2f1_series(aa, bb, cc, wave.w))
        } else {
            connection(aa, bb, cc, wave)
        };
        f.mul_dd(spow(j - 2))
    };
    gamma_ratio.mul(hyp)
}

/// `2F1(A, B; C; w)` via the `1 - w` connection formula when `C - A - B = 1/2`.
fn connection(a: f64, b: f64, c: f64, wave: &Wave) -> Scaled {
    let twice = |x: f64| (2.0 * x).round() as u32;
    let (gc, pc) = gamma_half(twice(c));
    let (gca, pca) = gamma_half(twice(c - a));
    let (gcb, pcb) = gamma_half(twice(c - b));
    let (ga, pa) = gamma_half(twice(a));
    let (gb, pb) = gamma_half(twice(b));
    // Gamma(1/2) = sqrt(pi), Gamma(-1/2) = -2 sqrt(pi)
    let g1 = gc.div(gca).div(gcb).mul_dd(sqrt_pi_ratio(pc + 1, pca + pcb));
    let g2 = gc.div(ga).div(gb).mul_dd(sqrt_pi_ratio(pc + 1, pa + pb) * -2.0);
    let x = wave.one_minus_w;
    let f1 = hyp2f1_series(a, b, 0.5, x);
    let f2 = hyp2f1_series(c - a, c - b, 1.5, x);
    g1.mul_dd(f1).add(g2.mul_dd(f2 * wave.s))
}

/// `sqrt(pi) kt^l tau^{3/2} Gamma(l+3) / Gamma(l+3/2) u^{-(l+3)/2}` as
/// `(rational mantissa, natural log of the remaining real factor)`.
fn common_factor(l: usize, kt: f64, tau: f64) -> (Scaled, f64) {
    // sqrt(pi) / Gamma(l + 3/2) = 1 / prod_{i=1}^{l+1} (i - 1/2)
    let mut ratio = Scaled::ONE;
    for i in 1..=l + 2 {
        ratio = ratio.mul_dd(Dd::from_f64(i as f64));
    }
    for i in 1..=l + 1 {
        ratio = ratio.div(Scaled::new(Dd::from_f64(i as f64 - 0.5)));
    }
    let ln_kt = if l == 0 { 0.0 } else { l as f64 * kt.ln() };
    let ln_rest = ln_kt + 1.5 * tau.ln() - 0.5 * (l as f64 + 3.0) * (4.0 * kt * kt).ln_1p();
    (ratio, ln_rest)
}

fn finish(value: Scaled, common: (Scaled, f64)) -> f64 {
    let total = value.mul(common.0);
    let m = total.m.to_f64();
    if m == 0.0 {
        return 0.0;
    }
    m * (total.e as f64 * std::f64::consts::LN_2 + common.1).exp()
}

fn check_k(k: f64, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("radial scale tau must be positive, got {tau}")));
    }
    if !(k >= 0.0 && k.is_finite()) {
        return Err(invalid(format!("wavenumber must be non-negative, got {k}")));
    }
    Ok(())
}

/// Coefficients `c^p_j = (-1)^j / j! binom(p+2, p-j)`, `j = 0..=p`.
pub fn c_coeffs(p: usize) -> Vec<f64> {
    c_coeffs_dd(p).into_iter().map(Dd::to_f64).collect()
}

fn c_coeffs_dd(p: usize) -> Vec<Dd> {
    let mut out = Vec::with_capacity(p + 1);
    let mut c = Dd::from_f64(((p + 2) * (p + 1) / 2) as f64);
    out.push(c);
    for j in 1..=p {
        c = -(c * ((p - j + 1) as f64)) / ((j * (j + 2)) as f64);
        out.push(c);
    }
    out
}

/// Moment `mu^l_j(k) = tau^{-(j - 1/2)} int r^j j_l(kr) exp(-r / 2tau) dr`, `j >= 2`.
pub fn moment_mu(ell: usize, j: usize, k: f64, tau: f64) -> Result<f64> {
    check_k(k, tau)?;
    if j < 2 {
        return Err(invalid(format!("moment order must be at least 2, got {j}")));
    }
    let kt = tau * k;
    if kt == 0.0 && ell > 0 {
        return Ok(0.0);
    }
    let wave = Wave::new(kt);
    Ok(finish(moment_part(ell, j, &wave), common_factor(ell, kt, tau)))
}

/// `j_lp(k)` for every `p < size` at one `(l, k)`.
fn projections_at(ell: usize, size: usize, kt: f64, tau: f64) -> Vec<f64> {
    if kt == 0.0 && ell > 0 {
        return vec![0.0; size];
    }
    let wave = Wave::new(kt);
    let parts: Vec<Scaled> = (0..size).map(|j| moment_part(ell, j + 2, &wave)).collect();
    let common = common_factor(ell, kt, tau);
    let e_ref = parts.iter().map(|s| s.e).max().unwrap_or(0);
    let mantissas: Vec<Dd> = parts.iter().map(|s| s.at(e_ref)).collect();
    (0..size)
        .map(|p| {
            let c = c_coeffs_dd(p);
            let mut sum = Dd::ZERO;
            for (cj, mj) in c.iter().zip(&mantissas) {
                sum = sum + *cj * *mj;
            }
            let norm = (1.0 / ((p + 1) * (p + 2)) as f64).sqrt();
            norm * finish(Scaled { m: sum, e: e_ref }.normalized(), common)
        })
        .collect()
}

/// Projection `j_lp(k)` of the radial basis onto the spherical Bessel function.
pub fn projection_jlp(ell: usize, p: usize, k: f64, tau: f64) -> Result<f64> {
    check_k(k, tau)?;
    Ok(projections_at(ell, p + 1, tau * k, tau)[p])
}

/// Logarithmically spaced wavenumbers from `k_min` to `k_max` inclusive.
pub fn log_k_grid(k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(k_min > 0.0 && k_max >= k_min && k_max.is_finite()) || n == 0 {
        return Err(invalid("need 0 < k_min <= k_max and at least one point"));
    }
    if n == 1 {
        return Ok(vec![k_min]);
    }
    let (a, b) = (k_min.ln(), k_max.ln());
    let mut k: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    k[0] = k_min;
    k[n - 1] = k_max;
    Ok(k)
}

/// Table of `j_lp(k)` for `l < L`, `p < P` and every wavenumber on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTable {
    band: usize,
    size: usize,
    tau: f64,
    k_grid: Vec<f64>,
    // values[(l * P + p) * K + ik]
    values: Vec<f64>,
}

impl ProjectionTable {
    pub fn new(band: usize, size: usize, tau: f64, k_grid: &[f64]) -> Result<Self> {
        if k_grid.is_empty() {
            return Err(invalid("wavenumber grid is empty"));
        }
        for &k in k_grid {
            check_k(k, tau)?;
        }
        let nk = k_grid.len();
        let rows: Vec<Vec<f64>> = (0..band)
            .into_par_iter()
            .map(|l| {
                let mut row = vec![0.0; size * nk];
                for (ik, &k) in k_grid.iter().enumerate() {
                    for (p, v) in projections_at(l, size, tau * k, tau).into_iter().enumerate() {
                        row[p * nk + ik] = v;
                    }
                }
                row
            })
            .collect();
        Ok(Self {
            band,
            size,
            tau,
            k_grid: k_grid.to_vec(),
            values: rows.concat(),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn get(&self, l: usize, p: usize, ik: usize) -> f64 {
        self.values[(l * self.size + p) * self.k_grid.len() + ik]
    }
}

/// Fourier-Bessel coefficients `f_lm(k)` on a wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselCoefficients {
    pub band: usize,
    pub k_grid: Vec<f64>,
    /// `values[(l^2 + l + m) * K + ik]`
    pub values: Vec<Complex64>,
}

impl BesselCoefficients {
    pub fn get(&self, l: usize, m: i64, ik: usize) -> Complex64 {
        self.values[lm_index(l, m) * self.k_grid.len() + ik]
    }
}

/// `f_lm(k) = sqrt(2/pi) sum_p f_lmp j_lp(k)`, exact for band-limited `f`.
pub fn flag_to_bessel(f: &FlagCoefficients, k_grid: &[f64]) -> Result<BesselCoefficients> {
    let bl = f.bandlimit();
    let table = ProjectionTable::new(bl.l, bl.p, bl.tau, k_grid)?;
    flag_to_bessel_with(f, &table)
}

/// As [`flag_to_bessel`] with a precomputed projection table.
pub fn flag_to_bessel_with(f: &FlagCoefficients, table: &ProjectionTable) -> Result<BesselCoefficients> {
    let bl = f.bandlimit();
    if table.band < bl.l || table.size < bl.p || table.tau != bl.tau {
        return Err(invalid("projection table does not cover the band-limit"));
    }
    let nk = table.k_grid.len();
    let norm = (2.0 / std::f64::consts::PI).sqrt();
    let mut values = vec![Complex64::new(0.0, 0.0); lm_count(bl.l) * nk];
    values.par_chunks_mut(nk).enumerate().for_each(|(idx, out)| {
        let l = (idx as f64).sqrt() as usize;
        let l = if (l + 1) * (l + 1) <= idx { l + 1 } else { l };
        let m = idx as i64 - (l * l + l) as i64;
        for p in 0..bl.p {
            let c = f.get(l, m, p);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (ik, o) in out.iter_mut().enumerate() {
                *o += c * (norm * table.get(l, p, ik));
            }
        }
    });
    Ok(BesselCoefficients {
        band: bl.l,
        k_grid: table.k_grid.clone(),
        values,
    })
}
