//! Spherical harmonic transform on a Gauss-Legendre by equiangular grid.
//!
//! Colatitudes are the `L` Gauss-Legendre nodes, longitudes are `2L - 1`
//! equispaced points starting at zero. Samples are stored ring by ring:
//! `samples[j * (2L - 1) + k] = f(theta_j, phi_k)`.
//!
//! Harmonics are orthonormal on the unit sphere and carry the Condon-Shortley
//! phase. Coefficient `(l, m)` lives at index `l^2 + l + m`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{check_len, invalid, Error, Result};

const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 460.517_018_598_809_1; // ln(1e200)

/// Flat index of `(l, m)` in a harmonic coefficient array.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    (l * l + l).wrapping_add_signed(m as isize)
}

/// Number of harmonic coefficients below band-limit `l`.
#[inline]
pub fn lm_count(l: usize) -> usize {
    l * l
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Fills `out[tri(l, m)] = Y_lm(theta, 0)` for `0 <= m <= l < band`.
///
/// The sectoral start value is built in logarithms and the upward recursion
/// in `l` runs on a rescaled mantissa, so nothing underflows near the poles.
pub(crate) fn legendre_table(band: usize, theta: f64, out: &mut [f64]) {
    let x = theta.cos();
    let ln_sin = theta.sin().abs().ln();
    let mut ln_mm = -0.5 * (4.0 * PI).ln();
    for m in 0..band {
        if m > 0 {
            let mf = m as f64;
            ln_mm += 0.5 * ((2.0 * mf + 1.0) / (2.0 * mf)).ln() + ln_sin;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut ln_scale = ln_mm;
        let emit = |v: f64, ln_scale: f64| -> f64 {
            if v == 0.0 || ln_scale == f64::NEG_INFINITY {
                0.0
            } else if ln_scale.abs() < 700.0 {
                v * ln_scale.exp()
            } else {
                v.signum() * (v.abs().ln() + ln_scale).exp()
            }
        };
        let mut prev = 0.0;
        let mut cur = sign;
        out[tri(m, m)] = emit(cur, ln_scale);
        let mf = m as f64;
        let mut a_prev = f64::INFINITY;
        for l in m + 1..band {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let next = a * (x * cur - prev / a_prev);
            prev = cur;
            cur = next;
            a_prev = a;
            if cur.abs() > RESCALE {
                cur /= RESCALE;
                prev /= RESCALE;
                ln_scale += LN_RESCALE;
            }
            out[tri(l, m)] = emit(cur, ln_scale);
        }
    }
}

/// Orthonormal spherical harmonic `Y_lm(theta, phi)` with Condon-Shortley phase.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Complex64::new(0.0, 0.0);
    }
    let mut table = vec![0.0; tri(l + 1, 0)];
    legendre_table(l + 1, theta, &mut table);
    let mut v = table[tri(l, am)];
    if m < 0 && am % 2 == 1 {
        v = -v;
    }
    Complex64::from_polar(v, m as f64 * phi)
}

/// Gauss-Legendre nodes on `[-1, 1]` (decreasing) and weights.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p_and_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_p_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Sphere sampling scheme tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingScheme {
    /// Gauss-Legendre colatitudes, the scheme implemented here.
    GaussLegendre,
    /// The equiangular sampling theorem, used for sample counts only.
    Equiangular,
}

impl std::str::FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" | "gauss-legendre" | "gauss_legendre" => Ok(Self::GaussLegendre),
            "mw" | "equiangular" => Ok(Self::Equiangular),
            other => Err(invalid(format!("unknown sampling scheme '{other}'"))),
        }
    }
}

/// Exact quadrature grid on the sphere at angular band-limit `L`.
#[derive(Clone)]
pub struct SphereSampling {
    band: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    theta_weights: Vec<f64>,
    // legendre[j * tri(L, 0) + tri(l, m)] = Y_lm(theta_j, 0)
    legendre: Arc<Vec<f64>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SphereSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereSampling")
            .field("L", &self.band)
            .field("n_theta", &self.thetas.len())
            .field("n_phi", &self.phis.len())
            .finish()
    }
}

impl SphereSampling {
    pub fn new(band: usize) -> Result<Self> {
        if band == 0 {
            return Err(invalid("angular band-limit L must be at least 1"));
        }
        let (x, theta_weights) = gauss_legendre(band);
        let thetas: Vec<f64> = x.iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect();
        let n_phi = 2 * band - 1;
        let phis = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
        let t = tri(band, 0);
        let mut legendre = vec![0.0; band * t];
        legendre
            .par_chunks_mut(t)
            .zip(thetas.par_iter())
            .for_each(|(row, &theta)| legendre_table(band, theta, row));
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n_phi);
        let ifft = planner.plan_fft_inverse(n_phi);
        Ok(Self {
            band,
            thetas,
            phis,
            theta_weights,
            legendre: Arc::new(legendre),
            fft,
            ifft,
        })
    }

    /// Angular band-limit `L`.
    pub fn band_limit(&self) -> usize {
        self.band
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Colatitude weights; the full weight of node `(j, k)` is
    /// `theta_weights[j] * 2 pi / n_phi`.
    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of sample `(j, k)`.
    pub fn weight(&self, j: usize) -> f64 {
        self.theta_weights[j] * 2.0 * PI / self.n_phi() as f64
    }

    #[inline]
    fn legendre_at(&self, j: usize, l: usize, m: usize) -> f64 {
        self.legendre[j * tri(self.band, 0) + tri(l, m)]
    }

    /// Longitudinal Fourier integrals `int f e^{-i m phi} dphi` of one ring,
    /// with `m < 0` stored at `n_phi + m`.
    fn ring_forward(&self, ring: &[Complex64]) -> Vec<Complex64> {
        let mut buf = ring.to_vec();
        self.fft.process(&mut buf);
        let scale = 2.0 * PI / self.n_phi() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }
}

/// Harmonic coefficients `f_lm`, `0 <= l < L`, `|m| <= l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCoefficients {
    band: usize,
    values: Vec<Complex64>,
}

impl SphericalCoefficients {
    pub fn zeros(band: usize) -> Self {
        Self {
            band,
            values: vec![Complex64::new(0.0, 0.0); lm_count(band)],
        }
    }

    pub fn from_values(band: usize, values: Vec<Complex64>) -> Result<Self> {
        check_len(lm_count(band), values.len())?;
        Ok(Self { band, values })
    }

    pub fn band_limit(&self) -> usize {
        self.band
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.values[lm_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        self.values[lm_index(l, m)] = v;
    }
}

/// Forward harmonic transform of samples on `sampling`.
pub fn sht_forward(samples: &[Complex64], sampling: &SphereSampling) -> Result<SphericalCoefficients> {
    check_len(sampling.len(), samples.len())?;
    let band = sampling.band;
    let n_phi = sampling.n_phi();
    let rings: Vec<Vec<Complex64>> = samples
        .par_chunks(n_phi)
        .map(|ring| sampling.ring_forward(ring))
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); lm_count(band)];
    // each |m| touches a disjoint set of coefficients
    let per_m: Vec<Vec<(usize, Complex64)>> = (0..band)
        .into_par_iter()
        .map(|am| {
            let mut out = Vec::with_capacity(2 * (band - am));
            let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
            for l in am..band {
                let mut pos = Complex64::new(0.0, 0.0);
                let mut neg = Complex64::new(0.0, 0.0);
                for (j, ring) in rings.iter().enumerate() {
                    let lw = sampling.theta_weights[j] * sampling.legendre_at(j, l, am);
                    pos += ring[am] * lw;
                    if am > 0 {
                        neg += ring[n_phi - am] * lw;
                    }
                }
                out.push((lm_index(l, am as i64), pos));
                if am > 0 {
                    out.push((lm_index(l, -(am as i64)), neg * sign));
                }
            }
            out
        })
        .collect();
    for (idx, v) in per_m.into_iter().flatten() {
        values[idx] = v;
    }
    Ok(SphericalCoefficients { band, values })
}

/// Evaluates the harmonic expansion on every node of `sampling`.
pub fn sht_inverse(coeffs: &SphericalCoefficients, sampling: &SphereSampling) -> Result<Vec<Complex64>> {
    if coeffs.band != sampling.band {
        return Err(Error::ShapeMismatch {
            expected: sampling.band,
            actual: coeffs.band,
        });
    }
    let band = sampling.band;
    let n_phi = sampling.n_phi();
    let mut out = vec![Complex64::new(0.0, 0.0); sampling.len()];
    out.par_chunks_mut(n_phi).enumerate().for_each(|(j, ring)| {
        ring.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for am in 0..band {
            let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
            let mut pos = Complex64::new(0.0, 0.0);
            let mut neg = Complex64::new(0.0, 0.0);
            for l in am..band {
                let lam = sampling.legendre_at(j, l, am);
                pos += coeffs.values[lm_index(l, am as i64)] * lam;
                if am > 0 {
                    neg += coeffs.values[lm_index(l, -(am as i64))] * lam;
                }
            }
            ring[am] = pos;
            if am > 0 {
                ring[n_phi - am] = neg * sign;
            }
        }
        sampling.ifft.process(ring);
    });
    Ok(out)
}

/// Convolution with an axisymmetric kernel given by its `m = 0` coefficients.
pub fn axisym_convolve(f: &SphericalCoefficients, h_ell0: &[Complex64]) -> Result<SphericalCoefficients> {
    check_len(f.band, h_ell0.len())?;
    let mut out = f.clone();
    for (l, h) in h_ell0.iter().enumerate() {
        let factor = (4.0 * PI / (2 * l + 1) as f64).sqrt() * h.conj();
        for m in -(l as i64)..=(l as i64) {
            out.values[lm_index(l, m)] *= factor;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(band: usize, seed: u64) -> SphericalCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..lm_count(band))
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SphericalCoefficients::from_values(band, values).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_function() {
        let s = SphereSampling::new(6).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); s.len()];
        let c = sht_forward(&ones, &s).unwrap();
        assert!((c.get(0, 0).re - (4.0 * PI).sqrt()).abs() < 1e-13);
        for (i, v) in c.values().iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-13, "index {i}: {v}");
        }
        let mut unit = SphericalCoefficients::zeros(6);
        unit.set(0, 0, Complex64::new((4.0 * PI).sqrt(), 0.0));
        let grid = sht_inverse(&unit, &s).unwrap();
        assert!(grid.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn single_harmonic_is_recovered() {
        let s = SphereSampling::new(5).unwrap();
        let mut samples = Vec::with_capacity(s.len());
        for &t in s.thetas() {
            for &p in s.phis() {
                samples.push(spherical_harmonic(2, 1, t, p));
            }
        }
        let c = sht_forward(&samples, &s).unwrap();
        for l in 0..5 {
            for m in -(l as i64)..=(l as i64) {
                let target = if (l, m) == (2, 1) { 1.0 } else { 0.0 };
                assert!((c.get(l, m) - Complex64::new(target, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn low_order_harmonics_match_closed_forms() {
        let (t, p) = (0.7_f64, 1.9_f64);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert!((spherical_harmonic(1, 0, t, p).re - y10).abs() < 1e-15);
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * t.sin() * Complex64::from_polar(1.0, p);
        assert!((spherical_harmonic(1, 1, t, p) - y11).norm() < 1e-15);
        let y1m1 = (3.0 / (8.0 * PI)).sqrt() * t.sin() * Complex64::from_polar(1.0, -p);
        assert!((spherical_harmonic(1, -1, t, p) - y1m1).norm() < 1e-15);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * t.cos().powi(2) - 1.0);
        assert!((spherical_harmonic(2, 0, t, p).re - y20).abs() < 1e-15);
    }

    #[test]
    fn round_trip_at_l64() {
        let s = SphereSampling::new(64).unwrap();
        let c = random_coeffs(64, 5);
        let grid = sht_inverse(&c, &s).unwrap();
        let back = sht_forward(&grid, &s).unwrap();
        assert!(max_diff(c.values(), back.values()) < 1e-11);
    }

    #[test]
    fn zero_coefficients_give_zero_grid() {
        let s = SphereSampling::new(7).unwrap();
        let grid = sht_inverse(&SphericalCoefficients::zeros(7), &s).unwrap();
        assert!(grid.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1usize, 2, 9, 128, 513] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn legendre_survives_high_degree() {
        let band = 2000;
        let mut table = vec![0.0; tri(band, 0)];
        legendre_table(band, 1e-3, &mut table);
        assert!(table.iter().all(|v| v.is_finite()));
        // addition theorem at gamma = 0: sum_m |Y_lm|^2 = (2l+1)/(4 pi)
        legendre_table(band, 1.1, &mut table);
        let l = band - 1;
        let mut total = table[tri(l, 0)].powi(2);
        for m in 1..=l {
            total += 2.0 * table[tri(l, m)].powi(2);
        }
        let expected = (2 * l + 1) as f64 / (4.0 * PI);
        assert!(((total - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn axisymmetric_delta_is_identity() {
        let f = random_coeffs(9, 2);
        let h: Vec<Complex64> = (0..9)
            .map(|l| Complex64::new(((2 * l + 1) as f64 / (4.0 * PI)).sqrt(), 0.0))
            .collect();
        let out = axisym_convolve(&f, &h).unwrap();
        assert!(max_diff(out.values(), f.values()) < 1e-14);
    }

    #[test]
    fn convolution_is_diagonal_in_l() {
        let f = random_coeffs(9, 4);
        let mut h = vec![Complex64::new(0.0, 0.0); 9];
        h[5] = Complex64::new(0.3, 0.1);
        let out = axisym_convolve(&f, &h).unwrap();
        for l in 0..9 {
            for m in -(l as i64)..=(l as i64) {
                if l != 5 {
                    assert_eq!(out.get(l, m), Complex64::new(0.0, 0.0));
                }
            }
        }
        let zero = axisym_convolve(&SphericalCoefficients::zeros(9), &h).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
        assert!(axisym_convolve(&f, &h[..4]).is_err());
    }

    #[test]
    fn scheme_tags() {
        assert_eq!("mw".parse::<SamplingScheme>().unwrap(), SamplingScheme::Equiangular);
        assert_eq!("GL".parse::<SamplingScheme>().unwrap(), SamplingScheme::GaussLegendre);
        assert!("healpix".parse::<SamplingScheme>().is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let s = SphereSampling::new(4).unwrap();
        assert!(sht_forward(&[Complex64::new(0.0, 0.0); 3], &s).is_err());
        assert!(sht_inverse(&SphericalCoefficients::zeros(3), &s).is_err());
    }
}
