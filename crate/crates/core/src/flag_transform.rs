//! Fourier-Laguerre transform on the ball.
//!
//! The grid is `P` spherical shells at the radial Gauss nodes, each sampled
//! on the sphere grid. Samples are laid out shell-major:
//! `samples[(i * n_theta + j) * n_phi + k] = f(r_i, theta_j, phi_k)`.
//!
//! Coefficients are laid out p-major: `(l, m, p)` lives at
//! `p * L^2 + l^2 + l + m`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{check_len, invalid, Error, Result};
use crate::radial_laguerre::{RadialBasis, RadialTransform};
use crate::sphere_harmonics::{
    legendre_table, lm_count, lm_index, sht_forward, sht_inverse, SamplingScheme, SphereSampling, SphericalCoefficients,
};

/// Angular and radial band-limits together with the radial scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandLimit {
    pub l: usize,
    pub p: usize,
    pub tau: f64,
}

impl BandLimit {
    pub fn new(l: usize, p: usize, tau: f64) -> Result<Self> {
        if l == 0 || p == 0 {
            return Err(invalid(format!("band-limits must be positive, got L={l}, P={p}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("radial scale tau must be positive, got {tau}")));
        }
        Ok(Self { l, p, tau })
    }

    /// Number of coefficients `L^2 P`.
    pub fn coefficient_count(&self) -> usize {
        lm_count(self.l) * self.p
    }
}

/// Flat position of `(l, m, p)` at angular band-limit `band`.
#[inline]
pub fn flat_index(l: usize, m: i64, p: usize, band: usize) -> usize {
    p * lm_count(band) + lm_index(l, m)
}

/// Total sample count of a ball grid under `scheme`.
pub fn sample_count(bandlimit: &BandLimit, scheme: SamplingScheme) -> usize {
    let (l, p) = (bandlimit.l, bandlimit.p);
    match scheme {
        SamplingScheme::Equiangular => p * ((2 * l - 1) * (l - 1) + 1),
        SamplingScheme::GaussLegendre => p * l * (2 * l - 1),
    }
}

/// Sampling nodes of the ball with their quadrature weights.
#[derive(Debug, Clone)]
pub struct BallGrid {
    bandlimit: BandLimit,
    sampling: SphereSampling,
    radial: RadialTransform,
}

impl BallGrid {
    pub fn new(bandlimit: BandLimit) -> Result<Self> {
        let sampling = SphereSampling::new(bandlimit.l)?;
        let radial = RadialTransform::new(RadialBasis::new(bandlimit.p, bandlimit.tau)?)?;
        Ok(Self {
            bandlimit,
            sampling,
            radial,
        })
    }

    pub fn bandlimit(&self) -> BandLimit {
        self.bandlimit
    }

    pub fn sampling(&self) -> &SphereSampling {
        &self.sampling
    }

    pub fn radial(&self) -> &RadialTransform {
        &self.radial
    }

    pub fn radii(&self) -> &[f64] {
        self.radial.quadrature().nodes()
    }

    pub fn len(&self) -> usize {
        self.bandlimit.p * self.sampling.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i_r: usize, j: usize, k: usize) -> usize {
        (i_r * self.sampling.n_theta() + j) * self.sampling.n_phi() + k
    }

    /// Node coordinates `(r, theta, phi)` in storage order.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &r in self.radii() {
            for &t in self.sampling.thetas() {
                for &p in self.sampling.phis() {
                    out.push((r, t, p));
                }
            }
        }
        out
    }

    /// Quadrature weight of node `(i_r, j, *)` against `d^3 r`.
    pub fn weight(&self, i_r: usize, j: usize) -> f64 {
        self.radial.quadrature().weights()[i_r] * self.sampling.weight(j)
    }

    /// Quadrature of `sum |f|^2` over the grid.
    pub fn integrate_norm_sqr(&self, samples: &[Complex64]) -> Result<f64> {
        check_len(self.len(), samples.len())?;
        let n_phi = self.sampling.n_phi();
        Ok(samples
            .chunks(n_phi)
            .enumerate()
            .map(|(ring, values)| {
                let i_r = ring / self.sampling.n_theta();
                let j = ring % self.sampling.n_theta();
                self.weight(i_r, j) * values.iter().map(|v| v.norm_sqr()).sum::<f64>()
            })
            .sum())
    }
}

/// Fourier-Laguerre coefficients `f_lmp`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagCoefficients {
    bandlimit: BandLimit,
    values: Vec<Complex64>,
}

impl FlagCoefficients {
    pub fn zeros(bandlimit: BandLimit) -> Self {
        Self {
            bandlimit,
            values: vec![Complex64::new(0.0, 0.0); bandlimit.coefficient_count()],
        }
    }

    pub fn from_values(bandlimit: BandLimit, values: Vec<Complex64>) -> Result<Self> {
        check_len(bandlimit.coefficient_count(), values.len())?;
        Ok(Self { bandlimit, values })
    }

    pub fn bandlimit(&self) -> BandLimit {
        self.bandlimit
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

    pub fn get(&self, l: usize, m: i64, p: usize) -> Complex64 {
        self.values[flat_index(l, m, p, self.bandlimit.l)]
    }

    pub fn set(&mut self, l: usize, m: i64, p: usize, v: Complex64) {
        let idx = flat_index(l, m, p, self.bandlimit.l);
        self.values[idx] = v;
    }

    /// Harmonic coefficients of radial order `p`.
    pub fn shell(&self, p: usize) -> &[Complex64] {
        let n = lm_count(self.bandlimit.l);
        &self.values[p * n..(p + 1) * n]
    }
}

fn check_grid(bandlimit: &BandLimit, grid: &BallGrid) -> Result<()> {
    let g = grid.bandlimit;
    if g.l != bandlimit.l || g.p != bandlimit.p || g.tau != bandlimit.tau {
        return Err(Error::ShapeMismatch {
            expected: g.coefficient_count(),
            actual: bandlimit.coefficient_count(),
        });
    }
    Ok(())
}

/// Radial pass across `P` blocks of `n` interleaved values.
fn radial_pass(data: &[Complex64], n: usize, radial: &RadialTransform, forward: bool) -> Result<Vec<Complex64>> {
    let size = radial.basis().size();
    let columns: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let column: Vec<Complex64> = (0..size).map(|i| data[i * n + c]).collect();
            if forward {
                radial.analyze(&column)
            } else {
                radial.synthesize(&column)
            }
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Complex64::new(0.0, 0.0); size * n];
    for (c, column) in columns.into_iter().enumerate() {
        for (i, v) in column.into_iter().enumerate() {
            out[i * n + c] = v;
        }
    }
    Ok(out)
}

/// Exact forward transform: spherical pass on each shell, then radial pass.
pub fn flag_forward(samples: &[Complex64], grid: &BallGrid) -> Result<FlagCoefficients> {
    check_len(grid.len(), samples.len())?;
    let shell_len = grid.sampling.len();
    let harmonic: Vec<Complex64> = samples
        .par_chunks(shell_len)
        .map(|shell| sht_forward(shell, &grid.sampling).map(SphericalCoefficients::into_values))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let values = radial_pass(&harmonic, lm_count(grid.bandlimit.l), &grid.radial, true)?;
    Ok(FlagCoefficients {
        bandlimit: grid.bandlimit,
        values,
    })
}

/// Forward transform with the radial pass first; agrees with [`flag_forward`].
pub fn flag_forward_radial_first(samples: &[Complex64], grid: &BallGrid) -> Result<FlagCoefficients> {
    check_len(grid.len(), samples.len())?;
    let shell_len = grid.sampling.len();
    let radial = radial_pass(samples, shell_len, &grid.radial, true)?;
    let values: Vec<Complex64> = radial
        .par_chunks(shell_len)
        .map(|shell| sht_forward(shell, &grid.sampling).map(SphericalCoefficients::into_values))
        .collect::<Result<Vec<_>>>()?
        .concat();
    Ok(FlagCoefficients {
        bandlimit: grid.bandlimit,
        values,
    })
}

/// Evaluates the expansion on every grid node.
pub fn flag_inverse(coeffs: &FlagCoefficients, grid: &BallGrid) -> Result<Vec<Complex64>> {
    check_grid(&coeffs.bandlimit, grid)?;
    let band = grid.bandlimit.l;
    let harmonic = radial_pass(&coeffs.values, lm_count(band), &grid.radial, false)?;
    Ok(harmonic
        .par_chunks(lm_count(band))
        .map(|shell| {
            let c = SphericalCoefficients::from_values(band, shell.to_vec())?;
            sht_inverse(&c, &grid.sampling)
        })
        .collect::<Result<Vec<_>>>()?
        .concat())
}

/// Direct summation of the expansion at arbitrary `(r, theta, phi)` points.
pub fn flag_eval(coeffs: &FlagCoefficients, points: &[(f64, f64, f64)]) -> Vec<Complex64> {
    let bl = coeffs.bandlimit;
    let basis = RadialBasis::new(bl.p, bl.tau).expect("band-limit validated on construction");
    let n_lm = lm_count(bl.l);
    points
        .par_iter()
        .map(|&(r, theta, phi)| {
            let k = basis.eval_all(r);
            let mut radial = vec![Complex64::new(0.0, 0.0); n_lm];
            for (p, kp) in k.iter().enumerate() {
                for (acc, c) in radial.iter_mut().zip(&coeffs.values[p * n_lm..(p + 1) * n_lm]) {
                    *acc += c * kp;
                }
            }
            let mut table = vec![0.0; bl.l * (bl.l + 1) / 2];
            legendre_table(bl.l, theta, &mut table);
            let mut total = Complex64::new(0.0, 0.0);
            for l in 0..bl.l {
                let base = l * (l + 1) / 2;
                total += radial[lm_index(l, 0)] * table[base];
                for am in 1..=l {
                    let lam = table[base + am];
                    let e = Complex64::from_polar(1.0, am as f64 * phi);
                    let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
                    total += radial[lm_index(l, am as i64)] * lam * e
                        + radial[lm_index(l, -(am as i64))] * (sign * lam) * e.conj();
                }
            }
            total
        })
        .collect()
}

/// Convolution with an axisymmetric kernel, `h[p * L + l] = h_{l0p}`.
pub fn ball_convolve(f: &FlagCoefficients, h_ell0p: &[Complex64]) -> Result<FlagCoefficients> {
    let bl = f.bandlimit;
    check_len(bl.l * bl.p, h_ell0p.len())?;
    let mut out = f.clone();
    for p in 0..bl.p {
        for l in 0..bl.l {
            let factor = (4.0 * PI / (2 * l + 1) as f64).sqrt() * h_ell0p[p * bl.l + l].conj();
            for m in -(l as i64)..=(l as i64) {
                out.values[flat_index(l, m, p, bl.l)] *= factor;
            }
        }
    }
    Ok(out)
}
