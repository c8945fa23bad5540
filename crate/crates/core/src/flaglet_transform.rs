//! Flaglet analysis and synthesis in Fourier-Laguerre space.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::flag_transform::{flag_inverse, flat_index, BallGrid, BandLimit, FlagCoefficients};
use crate::radial_laguerre::RadialBasis;
use crate::tiling::{HarmonicWindows, WaveletFamily};

/// Scaling and wavelet coefficients of one signal, stored at full resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagletCoefficients {
    pub family: WaveletFamily,
    pub scaling: FlagCoefficients,
    pub wavelets: BTreeMap<(usize, usize), FlagCoefficients>,
}

impl FlagletCoefficients {
    pub fn wavelet(&self, j: usize, jp: usize) -> Option<&FlagCoefficients> {
        self.wavelets.get(&(j, jp))
    }

    /// Sum of `|W|^2` over the scaling part and every scale pair.
    pub fn energy(&self) -> f64 {
        let sq = |c: &FlagCoefficients| c.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        sq(&self.scaling) + self.wavelets.values().map(sq).sum::<f64>()
    }
}

fn same_shape(a: &BandLimit, b: &BandLimit) -> bool {
    a.l == b.l && a.p == b.p
}

/// Multiplies `f_lmp` by `sqrt(4 pi / (2l + 1)) * w[p * L + l]`.
fn apply_window(f: &FlagCoefficients, window: &[f64]) -> FlagCoefficients {
    let bl = f.bandlimit();
    let mut out = f.clone();
    let values = out.values_mut();
    for p in 0..bl.p {
        for l in 0..bl.l {
            let factor = (4.0 * PI / (2 * l + 1) as f64).sqrt() * window[p * bl.l + l];
            for m in -(l as i64)..=(l as i64) {
                values[flat_index(l, m, p, bl.l)] *= factor;
            }
        }
    }
    out
}

/// Scaling and wavelet coefficients of `f`.
pub fn flaglet_analysis(f: &FlagCoefficients, windows: &HarmonicWindows) -> Result<FlagletCoefficients> {
    let family = *windows.family();
    if !same_shape(&f.bandlimit(), &family.bandlimit) {
        return Err(Error::ShapeMismatch {
            expected: family.bandlimit.coefficient_count(),
            actual: f.bandlimit().coefficient_count(),
        });
    }
    let wavelets = family
        .scale_pairs()
        .into_par_iter()
        .map(|(j, jp)| {
            let w = windows.psi(j, jp).expect("scale pair from the family");
            ((j, jp), apply_window(f, w))
        })
        .collect();
    Ok(FlagletCoefficients {
        family,
        scaling: apply_window(f, windows.phi()),
        wavelets,
    })
}

/// Reconstructs `f_lmp` from its scaling and wavelet coefficients.
pub fn flaglet_synthesis(coeffs: &FlagletCoefficients, windows: &HarmonicWindows) -> Result<FlagCoefficients> {
    let family = windows.family();
    if coeffs.family != *family {
        return Err(Error::FamilyMismatch(
            "coefficients were produced with a different wavelet family".into(),
        ));
    }
    let pairs = family.scale_pairs();
    if coeffs.wavelets.len() != pairs.len() || pairs.iter().any(|k| !coeffs.wavelets.contains_key(k)) {
        return Err(Error::FamilyMismatch("scale pairs do not match the family".into()));
    }
    let mut out = apply_window(&coeffs.scaling, windows.phi());
    let parts: Vec<FlagCoefficients> = pairs
        .par_iter()
        .map(|&(j, jp)| apply_window(&coeffs.wavelets[&(j, jp)], windows.psi(j, jp).expect("scale pair")))
        .collect();
    for part in parts {
        for (o, v) in out.values_mut().iter_mut().zip(part.values()) {
            *o += v;
        }
    }
    Ok(out)
}

/// Harmonic coefficients of `T_s Psi^jj'` (or `T_s Phi` when `scale` is `None`).
pub fn translated_window(
    windows: &HarmonicWindows,
    scale: Option<(usize, usize)>,
    s: f64,
    tau: f64,
) -> Result<Vec<f64>> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("radial shift must be non-negative, got {s}")));
    }
    let family = windows.family();
    let window = match scale {
        Some((j, jp)) => windows.psi(j, jp).ok_or_else(|| {
            invalid(format!(
                "scale ({j}, {jp}) outside [{}, {}] x [{}, {}]",
                family.j0, family.j, family.j0p, family.jp
            ))
        })?,
        None => windows.phi(),
    };
    let (band, size) = (family.bandlimit.l, family.bandlimit.p);
    let k = RadialBasis::new(size, tau)?.eval_all(s);
    let mut out = window.to_vec();
    for p in 0..size {
        for l in 0..band {
            out[p * band + l] *= k[p];
        }
    }
    Ok(out)
}

fn axisymmetric_coefficients(bandlimit: BandLimit, h: &[f64]) -> FlagCoefficients {
    let mut c = FlagCoefficients::zeros(bandlimit);
    for p in 0..bandlimit.p {
        for l in 0..bandlimit.l {
            c.set(l, 0, p, Complex64::new(h[p * bandlimit.l + l], 0.0));
        }
    }
    c
}

/// Real-space samples of the flaglet `Psi^jj'` translated radially by `s`.
pub fn render_flaglet(windows: &HarmonicWindows, j: usize, jp: usize, s: f64, grid: &BallGrid) -> Result<Vec<f64>> {
    render(windows, Some((j, jp)), s, grid)
}

/// Real-space samples of the scaling function translated radially by `s`.
pub fn render_scaling(windows: &HarmonicWindows, s: f64, grid: &BallGrid) -> Result<Vec<f64>> {
    render(windows, None, s, grid)
}

fn render(windows: &HarmonicWindows, scale: Option<(usize, usize)>, s: f64, grid: &BallGrid) -> Result<Vec<f64>> {
    let bl = grid.bandlimit();
    if !same_shape(&bl, &windows.family().bandlimit) {
        return Err(Error::ShapeMismatch {
            expected: windows.family().bandlimit.coefficient_count(),
            actual: bl.coefficient_count(),
        });
    }
    let h = translated_window(windows, scale, s, bl.tau)?;
    let coeffs = axisymmetric_coefficients(bl, &h);
    Ok(flag_inverse(&coeffs, grid)?.into_iter().map(|v| v.re).collect())
}

/// Evaluates an axisymmetric expansion `sum_lp h[p * L + l] K_p(r) Y_l0(theta)`
/// at `(r, theta)` points.
pub fn eval_axisymmetric(bandlimit: BandLimit, h: &[f64], points: &[(f64, f64)]) -> Result<Vec<f64>> {
    let (band, size) = (bandlimit.l, bandlimit.p);
    crate::error::check_len(band * size, h.len())?;
    let basis = RadialBasis::new(size, bandlimit.tau)?;
    Ok(points
        .par_iter()
        .map(|&(r, theta)| {
            let k = basis.eval_all(r);
            let x = theta.cos();
            // Y_l0 = sqrt((2l+1)/4pi) P_l(x)
            let (mut p0, mut p1) = (1.0, x);
            let mut total = 0.0;
            for l in 0..band {
                let pl = match l {
                    0 => 1.0,
                    1 => x,
                    _ => {
                        let lf = l as f64;
                        let p2 = ((2.0 * lf - 1.0) * x * p1 - (lf - 1.0) * p0) / lf;
                        p0 = p1;
                        p1 = p2;
                        p2
                    }
                };
                let y = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * pl;
                let radial: f64 = (0..size).map(|p| h[p * band + l] * k[p]).sum();
                total += radial * y;
            }
            total
        })
        .collect())
}
