//! Scale-discretised tiling of Fourier-Laguerre space.
//!
//! Flaglet windows are built from a smooth partition of unity in each of the
//! angular (`l`, dilation `lambda`) and radial (`p`, dilation `nu`)
//! directions. The scaling window fills whatever the flaglets leave out, so
//! that the windows satisfy the resolution of the identity
//!
//! ```text
//! 4 pi / (2l + 1) * (Phi_l0p^2 + sum_jj' Psi^jj'_l0p^2) = 1
//! ```
//!
//! for every `l < L`, `p < P`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::flag_transform::BandLimit;
use crate::quadrature::integrate;

const QUAD_TOL: f64 = 1e-15;
const RADICAND_FAIL: f64 = 1e-12;
const ADMISSIBILITY_TOL: f64 = 1e-8;

/// Compactly supported bump `exp(-1 / (1 - t^2))` on `(-1, 1)`.
pub fn schwartz_s(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// The bump mapped onto `[1/lambda, 1]`.
pub fn s_lambda(t: f64, lambda: f64) -> f64 {
    schwartz_s(2.0 * lambda / (lambda - 1.0) * (t - 1.0 / lambda) - 1.0)
}

/// Smoothly decreasing step: one below `1/lambda`, zero above one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothStep {
    lambda: f64,
    norm: f64,
}

impl SmoothStep {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(invalid(format!("dilation must exceed 1, got {lambda}")));
        }
        let norm = Self::integral(lambda, 1.0 / lambda, 1.0);
        Ok(Self { lambda, norm })
    }

    fn integral(lambda: f64, a: f64, b: f64) -> f64 {
        let f = |t: f64| {
            let s = s_lambda(t, lambda);
            s * s / t
        };
        integrate(f, a, b, QUAD_TOL).0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `k_lambda(t)`.
    pub fn k(&self, t: f64) -> f64 {
        let lo = 1.0 / self.lambda;
        if t <= lo {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        // integrate over the shorter side so the endpoint values stay exact
        let mid = 0.5 * (lo + 1.0);
        let v = if t < mid {
            1.0 - Self::integral(self.lambda, lo, t) / self.norm
        } else {
            Self::integral(self.lambda, t, 1.0) / self.norm
        };
        v.clamp(0.0, 1.0)
    }

    /// `kappa_lambda(t) = sqrt(k(t / lambda) - k(t))`.
    pub fn kappa(&self, t: f64) -> f64 {
        (self.k(t / self.lambda) - self.k(t)).max(0.0).sqrt()
    }

    /// `eta_lambda(t) = sqrt(k(t))`.
    pub fn eta(&self, t: f64) -> f64 {
        self.k(t).sqrt()
    }
}

/// Smooth step `k_lambda(t)`.
pub fn k_lambda(t: f64, lambda: f64) -> Result<f64> {
    Ok(SmoothStep::new(lambda)?.k(t))
}

/// Flaglet generating function `kappa_lambda(t)`.
pub fn kappa_lambda(t: f64, lambda: f64) -> Result<f64> {
    Ok(SmoothStep::new(lambda)?.kappa(t))
}

/// Scaling generating function `eta_lambda(t)`.
pub fn eta_lambda(t: f64, lambda: f64) -> Result<f64> {
    Ok(SmoothStep::new(lambda)?.eta(t))
}

fn hybrid_from_k(k_t_over: f64, k_t: f64, k_tp_over: f64, k_tp: f64) -> Result<f64> {
    let radicand = k_t_over * k_tp + k_t * k_tp_over - k_t * k_tp;
    // small negative values are round-off and clamp to zero
    if radicand < -RADICAND_FAIL {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Hybrid scaling generating function `eta_{lambda nu}(t, t')`.
pub fn eta_lambda_nu(t: f64, tp: f64, lambda: f64, nu: f64) -> Result<f64> {
    let a = SmoothStep::new(lambda)?;
    let b = SmoothStep::new(nu)?;
    hybrid_from_k(a.k(t / lambda), a.k(t), b.k(tp / nu), b.k(tp))
}

/// Smallest `J >= 0` with `base^J >= n`.
fn ceil_log(base: f64, n: usize) -> usize {
    let target = n as f64;
    let mut j = 0;
    while base.powi(j as i32) < target {
        j += 1;
    }
    j
}

/// Tiling parameters together with the derived scale range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletFamily {
    pub lambda: f64,
    pub nu: f64,
    pub j0: usize,
    pub j0p: usize,
    pub j: usize,
    pub jp: usize,
    pub bandlimit: BandLimit,
}

impl WaveletFamily {
    pub fn new(bandlimit: BandLimit, lambda: f64, nu: f64, j0: usize, j0p: usize) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("nu", nu)] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must exceed 1, got {v}")));
            }
        }
        let j = ceil_log(lambda, bandlimit.l.saturating_sub(1));
        let jp = ceil_log(nu, bandlimit.p.saturating_sub(1));
        if j0 >= j {
            return Err(invalid(format!("need J0 < J, got J0={j0}, J={j}")));
        }
        if j0p >= jp {
            return Err(invalid(format!("need J0' < J', got J0'={j0p}, J'={jp}")));
        }
        Ok(Self {
            lambda,
            nu,
            j0,
            j0p,
            j,
            jp,
            bandlimit,
        })
    }

    /// Scale pairs `(j, j')` in storage order.
    pub fn scale_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in self.j0..=self.j {
            for jp in self.j0p..=self.jp {
                out.push((j, jp));
            }
        }
        out
    }

    pub fn scale_count(&self) -> usize {
        (self.j - self.j0 + 1) * (self.jp - self.j0p + 1)
    }

    /// Position of `(j, j')` in [`scale_pairs`](Self::scale_pairs).
    pub fn pair_index(&self, j: usize, jp: usize) -> Option<usize> {
        if (self.j0..=self.j).contains(&j) && (self.j0p..=self.jp).contains(&jp) {
            Some((j - self.j0) * (self.jp - self.j0p + 1) + (jp - self.j0p))
        } else {
            None
        }
    }
}

/// `k(n / base^j)` for `n < count` and `j` in `j_lo..=j_hi`.
fn k_table(step: &SmoothStep, count: usize, j_lo: usize, j_hi: usize) -> Vec<Vec<f64>> {
    (j_lo..=j_hi)
        .map(|j| {
            let scale = step.lambda().powi(j as i32);
            (0..count).map(|n| step.k(n as f64 / scale)).collect()
        })
        .collect()
}

/// Harmonic windows of a wavelet family, `m = 0` only.
///
/// Both `psi` and `phi` include the `sqrt((2l + 1) / 4 pi)` factor. Window
/// entries are stored as `[p * L + l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicWindows {
    family: WaveletFamily,
    psi: Vec<Vec<f64>>,
    phi: Vec<f64>,
}

impl HarmonicWindows {
    pub fn family(&self) -> &WaveletFamily {
        &self.family
    }

    /// Flaglet window `Psi^jj'_l0p` as `[p * L + l]`.
    pub fn psi(&self, j: usize, jp: usize) -> Option<&[f64]> {
        self.family.pair_index(j, jp).map(|i| self.psi[i].as_slice())
    }

    /// Scaling window `Phi_l0p` as `[p * L + l]`.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Largest deviation from the resolution of the identity, with its `(l, p)`.
    pub fn admissibility_residual(&self) -> (f64, usize, usize) {
        let (band, size) = (self.family.bandlimit.l, self.family.bandlimit.p);
        let mut worst = (0.0, 0, 0);
        for p in 0..size {
            for l in 0..band {
                let i = p * band + l;
                let mut sum = self.phi[i] * self.phi[i];
                for w in &self.psi {
                    sum += w[i] * w[i];
                }
                let r = (4.0 * PI / (2 * l + 1) as f64 * sum - 1.0).abs();
                if r > worst.0 {
                    worst = (r, l, p);
                }
            }
        }
        worst
    }
}

/// Builds the flaglet and scaling windows and checks admissibility.
pub fn build_windows(family: &WaveletFamily) -> Result<HarmonicWindows> {
    let (band, size) = (family.bandlimit.l, family.bandlimit.p);
    let ang = SmoothStep::new(family.lambda)?;
    let rad = SmoothStep::new(family.nu)?;
    // Table row i holds k(n / base^(j0 + i)). Both kappa and eta read from the
    // same rows, so the sum over scales telescopes exactly.
    let ka = k_table(&ang, band, family.j0, family.j + 1);
    let kr = k_table(&rad, size, family.j0p, family.jp + 1);
    let norm: Vec<f64> = (0..band).map(|l| ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()).collect();

    let kappa =
        |table: &[Vec<f64>], row: usize, n: usize| -> f64 { (table[row + 1][n] - table[row][n]).max(0.0).sqrt() };

    let mut psi = Vec::with_capacity(family.scale_count());
    for (j, jp) in family.scale_pairs() {
        let (rj, rjp) = (j - family.j0, jp - family.j0p);
        let ang_w: Vec<f64> = (0..band).map(|l| kappa(&ka, rj, l)).collect();
        let mut w = vec![0.0; band * size];
        for p in 0..size {
            let radial = kappa(&kr, rjp, p);
            if radial == 0.0 {
                continue;
            }
            for l in 0..band {
                w[p * band + l] = norm[l] * ang_w[l] * radial;
            }
        }
        psi.push(w);
    }

    let l_edge = family.lambda.powi(family.j0 as i32);
    let p_edge = family.nu.powi(family.j0p as i32);
    let mut phi = vec![0.0; band * size];
    for p in 0..size {
        for l in 0..band {
            let (lf, pf) = (l as f64, p as f64);
            let v = if lf <= l_edge && pf <= p_edge {
                hybrid_from_k(ka[1][l], ka[0][l], kr[1][p], kr[0][p])?
            } else if lf > l_edge && pf <= p_edge {
                kr[0][p].sqrt()
            } else if lf <= l_edge && pf > p_edge {
                ka[0][l].sqrt()
            } else {
                0.0
            };
            phi[p * band + l] = norm[l] * v;
        }
    }

    let windows = HarmonicWindows {
        family: *family,
        psi,
        phi,
    };
    let (residual, ell, p) = windows.admissibility_residual();
    if residual > ADMISSIBILITY_TOL {
        return Err(Error::Admissibility {
            ell,
            p,
            residual,
            tolerance: ADMISSIBILITY_TOL,
        });
    }
    Ok(windows)
}
