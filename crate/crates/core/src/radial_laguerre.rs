//! Spherical Laguerre basis on the radial half-line.
//!
//! The basis functions are damped generalised Laguerre polynomials of order
//! two,
//!
//! ```text
//! K_p(r) = sqrt(p! / (p+2)!) * exp(-r / 2tau) / sqrt(tau^3) * L2_p(r / tau)
//! ```
//!
//! orthonormal under the measure `r^2 dr`. Gauss quadrature on the roots of
//! `L2_P` gives an exact transform for signals band-limited at `P`.

use num_traits::Zero;
use std::ops::{Add, Mul};

use crate::error::{check_len, invalid, Error, Result};

const RESCALE: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_106_8; // ln(1e150)
const NODE_TOL: f64 = 1e-14;

/// Radial band-limit and scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBasis {
    size: usize,
    tau: f64,
}

impl RadialBasis {
    pub fn new(size: usize, tau: f64) -> Result<Self> {
        if size == 0 {
            return Err(invalid("radial band-limit P must be at least 1"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("radial scale tau must be positive, got {tau}")));
        }
        Ok(Self { size, tau })
    }

    /// Radial band-limit `P`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, p: usize, r: f64) -> f64 {
        laguerre_basis_eval(p, r, self.tau)
    }

    /// `K_0(r), ..., K_{P-1}(r)`.
    pub fn eval_all(&self, r: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        spherical_laguerre_all(r, self.tau, &mut out);
        out
    }

    pub fn eval_all_into(&self, r: f64, out: &mut [f64]) {
        spherical_laguerre_all(r, self.tau, out);
    }
}

/// Value of the spherical Laguerre basis function `K_p(r)`.
pub fn laguerre_basis_eval(p: usize, r: f64, tau: f64) -> f64 {
    let mut out = vec![0.0; p + 1];
    spherical_laguerre_all(r, tau, &mut out);
    out[p]
}

#[inline]
fn apply_scale(v: f64, ln_scale: f64, factor: Option<f64>) -> f64 {
    match factor {
        Some(f) => v * f,
        None if v == 0.0 => 0.0,
        None => v.signum() * (v.abs().ln() + ln_scale).exp(),
    }
}

#[inline]
fn scale_factor(ln_scale: f64) -> Option<f64> {
    (ln_scale.abs() < 700.0).then(|| ln_scale.exp())
}

/// Fills `out[p] = K_p(r)` for every `p < out.len()`.
///
/// The exponential damping is carried as a separate logarithmic scale so that
/// neither it nor the growth of the polynomial over- or underflows.
fn spherical_laguerre_all(r: f64, tau: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let x = r / tau;
    let mut ln_scale = -0.5 * x - 1.5 * tau.ln();
    let mut factor = scale_factor(ln_scale);
    let mut prev = 0.0;
    let mut cur = 1.0;
    #[allow(clippy::needless_range_loop)]
    for p in 0..out.len() {
        if p > 0 {
            let pf = p as f64;
            let next = ((2.0 * pf + 1.0 - x) * cur - (pf + 1.0) * prev) / pf;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE {
                cur /= RESCALE;
                prev /= RESCALE;
                ln_scale += LN_RESCALE;
                factor = scale_factor(ln_scale);
            }
        }
        let norm = (1.0 / ((p + 1) * (p + 2)) as f64).sqrt();
        out[p] = apply_scale(cur * norm, ln_scale, factor);
    }
}

/// `(L2_n(x), L2_{n-1}(x))` up to a common positive factor.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 1..=n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - (kf + 1.0) * prev) / kf;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
        }
    }
    (cur, prev)
}

fn laguerre_sign(n: usize, x: f64) -> f64 {
    laguerre_pair(n, x).0.signum()
}

fn newton_root(n: usize, guess: f64) -> Option<f64> {
    let nf = n as f64;
    let mut z = guess;
    for _ in 0..100 {
        let (ln, lnm1) = laguerre_pair(n, z);
        let deriv = (nf * ln - (nf + 2.0) * lnm1) / z;
        let dz = ln / deriv;
        if !dz.is_finite() {
            return None;
        }
        z -= dz;
        if z.is_nan() || z <= 0.0 {
            return None;
        }
        if dz.abs() <= NODE_TOL * z {
            return Some(z);
        }
    }
    None
}

/// Marches right from `lower` until the polynomial changes sign, then bisects.
fn bisect_next_root(n: usize, lower: f64, step: f64) -> Option<f64> {
    let mut a = lower + 1e-12 * lower.max(1.0);
    let sa = laguerre_sign(n, a);
    let mut h = step;
    let mut b = a + h;
    let mut found = false;
    for _ in 0..100_000 {
        if laguerre_sign(n, b) != sa {
            found = true;
            break;
        }
        a = b;
        h *= 1.05;
        b = a + h;
    }
    if !found {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= 0.25 * NODE_TOL * b {
            break;
        }
        if laguerre_sign(n, mid) == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Roots of `L2_n`, increasing.
pub(crate) fn laguerre_roots(n: usize) -> Result<Vec<f64>> {
    let alpha = 2.0;
    let nf = n as f64;
    let mut roots: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        // initial guesses after the classical asymptotic fits
        let guess = match i {
            0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
            1 => roots[0] + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                roots[i - 1]
                    + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) / (1.0 + 0.3 * alpha)
                        * (roots[i - 1] - roots[i - 2])
            }
        };
        let lower = roots.last().copied().unwrap_or(0.0);
        let spacing = if i >= 2 {
            roots[i - 1] - roots[i - 2]
        } else {
            guess.max(1e-3)
        };
        // sign of L2_n between root i-1 and root i is (-1)^i
        let expected_sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let accepted = newton_root(n, guess).filter(|&z| {
            z > lower * (1.0 + 1e-10)
                && z < lower + 4.0 * spacing + 1.0
                && laguerre_sign(n, 0.5 * (lower + z)) == expected_sign
        });
        let root = match accepted {
            Some(z) => z,
            None => bisect_next_root(n, lower, 0.1 * spacing).ok_or(Error::NoConvergence { index: i, order: n })?,
        };
        roots.push(root);
    }
    Ok(roots)
}

/// Gauss nodes and weights on the radial half-line.
///
/// The weights absorb the measure and the damping, so that
/// `sum_i w_i g(r_i) = int g(r) r^2 dr` for every `g(r) = q(r/tau) exp(-r/tau)`
/// with `q` of degree at most `2P - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    tau: f64,
}

impl RadialQuadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds the `P`-point radial sampling.
pub fn radial_quadrature(size: usize, tau: f64) -> Result<RadialQuadrature> {
    let basis = RadialBasis::new(size, tau)?;
    let nodes: Vec<f64> = laguerre_roots(size)?.into_iter().map(|x| x * tau).collect();
    // Christoffel form of the Gauss weights: w_i = 1 / sum_p K_p(r_i)^2.
    let mut k = vec![0.0; size];
    let weights = nodes
        .iter()
        .map(|&r| {
            basis.eval_all_into(r, &mut k);
            1.0 / k.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(RadialQuadrature { nodes, weights, tau })
}

/// Scale factor placing the outermost of `size` radial nodes at `radius`.
pub fn tau_for_radius(size: usize, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if size == 0 {
        return Err(invalid("radial band-limit P must be at least 1"));
    }
    let roots = laguerre_roots(size)?;
    Ok(radius / roots[size - 1])
}

/// Coefficients `f_p = <f | K_p>` of a radial signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialCoefficients(pub Vec<f64>);

impl RadialCoefficients {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Precomputed radial sampling together with the basis tabulated at the
/// nodes, reused across the many radial passes of a ball transform.
#[derive(Debug, Clone)]
pub struct RadialTransform {
    basis: RadialBasis,
    quadrature: RadialQuadrature,
    // table[p * P + i] = K_p(r_i)
    table: Vec<f64>,
}

impl RadialTransform {
    pub fn new(basis: RadialBasis) -> Result<Self> {
        let quadrature = radial_quadrature(basis.size(), basis.tau())?;
        let n = basis.size();
        let mut table = vec![0.0; n * n];
        let mut k = vec![0.0; n];
        for (i, &r) in quadrature.nodes().iter().enumerate() {
            basis.eval_all_into(r, &mut k);
            for p in 0..n {
                table[p * n + i] = k[p];
            }
        }
        Ok(Self {
            basis,
            quadrature,
            table,
        })
    }

    pub fn basis(&self) -> &RadialBasis {
        &self.basis
    }

    pub fn quadrature(&self) -> &RadialQuadrature {
        &self.quadrature
    }

    /// `K_p(r_i)` at quadrature node `i`.
    pub fn basis_at_node(&self, p: usize, i: usize) -> f64 {
        self.table[p * self.basis.size() + i]
    }

    pub fn analyze<T>(&self, samples: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.basis.size();
        check_len(n, samples.len())?;
        let w = self.quadrature.weights();
        let weighted: Vec<T> = samples.iter().zip(w).map(|(&f, &wi)| f * wi).collect();
        Ok((0..n)
            .map(|p| {
                let row = &self.table[p * n..(p + 1) * n];
                weighted.iter().zip(row).fold(T::zero(), |acc, (&f, &k)| acc + f * k)
            })
            .collect())
    }

    pub fn synthesize<T>(&self, coeffs: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.basis.size();
        check_len(n, coeffs.len())?;
        let mut out = vec![T::zero(); n];
        for (p, &c) in coeffs.iter().enumerate() {
            let row = &self.table[p * n..(p + 1) * n];
            for (o, &k) in out.iter_mut().zip(row) {
                *o = *o + c * k;
            }
        }
        Ok(out)
    }
}

/// Exact coefficients of a band-limited signal sampled at the radial nodes.
pub fn radial_analysis(samples: &[f64], basis: &RadialBasis) -> Result<RadialCoefficients> {
    let transform = RadialTransform::new(*basis)?;
    transform.analyze(samples).map(RadialCoefficients)
}

/// Evaluates `sum_p f_p K_p(r)` at each radius, using the basis scale `tau`.
pub fn radial_synthesis(coeffs: &RadialCoefficients, radii: &[f64], basis: &RadialBasis) -> Vec<f64> {
    let mut k = vec![0.0; coeffs.len()];
    radii
        .iter()
        .map(|&r| {
            spherical_laguerre_all(r, basis.tau(), &mut k);
            coeffs.0.iter().zip(&k).map(|(c, k)| c * k).sum()
        })
        .collect()
}

/// Radial translation by `s`: `(T_s f)_p = K_p(s) f_p`.
pub fn radial_translate(coeffs: &RadialCoefficients, s: f64, basis: &RadialBasis) -> Result<RadialCoefficients> {
    check_shift(s)?;
    let mut k = vec![0.0; coeffs.len()];
    spherical_laguerre_all(s, basis.tau(), &mut k);
    Ok(RadialCoefficients(
        coeffs.0.iter().zip(&k).map(|(c, k)| c * k).collect(),
    ))
}

/// Band-limited Dirac delta at `s`: coefficients `K_p(s)`.
pub fn radial_dirac(s: f64, basis: &RadialBasis) -> Result<RadialCoefficients> {
    check_shift(s)?;
    Ok(RadialCoefficients(basis.eval_all(s)))
}

fn check_shift(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("radial shift must be non-negative, got {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn k0_at_origin() {
        assert_eq!(laguerre_basis_eval(0, 0.0, 1.0), std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn k0_closed_form() {
        let v = laguerre_basis_eval(0, 2.0, 1.0);
        let expected = (-1.0f64).exp() / 2f64.sqrt();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.26013).abs() < 1e-5);
    }

    #[test]
    fn single_node_rules() {
        let q = radial_quadrature(1, 1.0).unwrap();
        assert!((q.nodes()[0] - 3.0).abs() < 1e-14);
        let q = radial_quadrature(1, 2.0).unwrap();
        assert!((q.nodes()[0] - 6.0).abs() < 1e-13);
    }

    #[test]
    fn damping_integral_is_exact() {
        for &(p, tau) in &[(1usize, 1.0), (6, 0.3), (32, 2.0), (128, 0.01)] {
            let q = radial_quadrature(p, tau).unwrap();
            let sum: f64 = q
                .nodes()
                .iter()
                .zip(q.weights())
                .map(|(r, w)| w * (-r / tau).exp())
                .sum();
            let exact = 2.0 * tau * tau * tau;
            assert!(((sum - exact) / exact).abs() < 1e-12, "P={p}: {sum} vs {exact}");
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        let size = 24;
        let q = radial_quadrature(2 * size, 0.7).unwrap();
        let basis = RadialBasis::new(size, 0.7).unwrap();
        let tables: Vec<Vec<f64>> = q.nodes().iter().map(|&r| basis.eval_all(r)).collect();
        for a in 0..size {
            for b in 0..size {
                let g: f64 = tables.iter().zip(q.weights()).map(|(k, w)| w * k[a] * k[b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - target).abs() < 1e-12, "({a},{b}) = {g}");
            }
        }
    }

    #[test]
    fn nodes_positive_and_increasing() {
        for size in [1usize, 2, 5, 64, 200] {
            let q = radial_quadrature(size, 1.0).unwrap();
            assert_eq!(q.len(), size);
            assert!(q.nodes()[0] > 0.0);
            assert!(q.nodes().windows(2).all(|w| w[1] > w[0]));
            assert!(q.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn analysis_of_single_basis_function() {
        let basis = RadialBasis::new(8, 1.3).unwrap();
        let t = RadialTransform::new(basis).unwrap();
        let samples: Vec<f64> = t.quadrature().nodes().iter().map(|&r| basis.eval(0, r)).collect();
        let c = t.analyze(&samples).unwrap();
        for (p, v) in c.iter().enumerate() {
            let target = if p == 0 { 1.0 } else { 0.0 };
            assert!((v - target).abs() < 1e-13);
        }
        let samples: Vec<f64> = t
            .quadrature()
            .nodes()
            .iter()
            .map(|&r| 3.0 * basis.eval(1, r) + 2.0 * basis.eval(2, r))
            .collect();
        let c = radial_analysis(&samples, &basis).unwrap();
        let expected = [0.0, 3.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (v, e) in c.as_slice().iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_at_p64_and_p128() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for size in [64usize, 128] {
            let basis = RadialBasis::new(size, 1.0 / size as f64).unwrap();
            let t = RadialTransform::new(basis).unwrap();
            let coeffs: Vec<f64> = (0..size).map(|_| rng.random_range(-1.0..1.0)).collect();
            let samples = t.synthesize(&coeffs).unwrap();
            let back = t.analyze(&samples).unwrap();
            let err = coeffs.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "P={size}: {err}");
        }
    }

    #[test]
    fn synthesis_examples() {
        let basis = RadialBasis::new(4, 1.0).unwrap();
        let mut c = vec![0.0; 4];
        c[0] = 1.0;
        let v = radial_synthesis(&RadialCoefficients(c), &[0.0], &basis);
        assert_eq!(v[0], std::f64::consts::FRAC_1_SQRT_2);
        let z = radial_synthesis(&RadialCoefficients(vec![0.0; 4]), &[0.0, 1.0, 5.0], &basis);
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn synthesis_matches_free_function_at_nodes() {
        let basis = RadialBasis::new(16, 0.5).unwrap();
        let t = RadialTransform::new(basis).unwrap();
        let coeffs: Vec<f64> = (0..16).map(|p| (p as f64 * 0.37).sin()).collect();
        let a = t.synthesize(&coeffs).unwrap();
        let b = radial_synthesis(&RadialCoefficients(coeffs), t.quadrature().nodes(), &basis);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn translation_at_origin_scales_by_binomial() {
        let tau = 0.8;
        let basis = RadialBasis::new(10, tau).unwrap();
        let ones = RadialCoefficients(vec![1.0; 10]);
        let out = radial_translate(&ones, 0.0, &basis).unwrap();
        for p in 0..10u64 {
            let expected = binom(p + 2, 2) / (((p + 1) * (p + 2)) as f64).sqrt() / tau.powf(1.5);
            assert!((out.0[p as usize] - expected).abs() < 1e-12 * expected);
        }
        let zero = radial_translate(&RadialCoefficients(vec![0.0; 10]), 0.3, &basis).unwrap();
        assert!(zero.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn translated_delta_is_symmetric() {
        let basis = RadialBasis::new(12, 0.5).unwrap();
        let (s, t) = (0.7, 2.3);
        let a = radial_translate(&radial_dirac(t, &basis).unwrap(), s, &basis).unwrap();
        let b = radial_translate(&radial_dirac(s, &basis).unwrap(), t, &basis).unwrap();
        for (x, y) in a.0.iter().zip(&b.0) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn dirac_sifts_band_limited_signals() {
        let basis = RadialBasis::new(20, 0.25).unwrap();
        let t = RadialTransform::new(basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f_nodes = t.synthesize(&coeffs).unwrap();
        for &s in &[0.0, 0.4, 1.7, 6.0] {
            let delta = radial_dirac(s, &basis).unwrap();
            let delta_nodes = t.synthesize(&delta.0).unwrap();
            let inner: f64 = t
                .quadrature()
                .weights()
                .iter()
                .zip(&delta_nodes)
                .zip(&f_nodes)
                .map(|((w, d), f)| w * d * f)
                .sum();
            let direct = radial_synthesis(&RadialCoefficients(coeffs.clone()), &[s], &basis)[0];
            assert!((inner - direct).abs() < 1e-10, "s={s}: {inner} vs {direct}");
        }
    }

    #[test]
    fn discrete_sifting_at_a_node() {
        let basis = RadialBasis::new(10, 1.0).unwrap();
        let t = RadialTransform::new(basis).unwrap();
        let nodes = t.quadrature().nodes().to_vec();
        let f: Vec<f64> = nodes.iter().map(|r| (0.3 * r).cos()).collect();
        for (i, &s) in nodes.iter().enumerate() {
            let delta_nodes = t.synthesize(&radial_dirac(s, &basis).unwrap().0).unwrap();
            let sum: f64 = t
                .quadrature()
                .weights()
                .iter()
                .zip(&delta_nodes)
                .zip(&f)
                .map(|((w, d), f)| w * d * f)
                .sum();
            assert!((sum - f[i]).abs() < 1e-10, "node {i}: {sum} vs {}", f[i]);
        }
    }

    #[test]
    fn projected_normalisation_of_the_delta() {
        // The unit function is not square integrable on the half-line; its
        // band-limited stand-in is the interpolant taking the value 1 at every
        // node. Against it the delta integrates to one at the nodes and to the
        // interpolant's value elsewhere.
        let basis = RadialBasis::new(12, 0.5).unwrap();
        let t = RadialTransform::new(basis).unwrap();
        let ones = vec![1.0; 12];
        let unit = t.analyze(&ones).unwrap();
        let unit_nodes = t.synthesize(&unit).unwrap();
        let nodes = t.quadrature().nodes().to_vec();
        for &s in nodes.iter().chain([0.9, 2.2].iter()) {
            let delta_nodes = t.synthesize(&radial_dirac(s, &basis).unwrap().0).unwrap();
            let integral: f64 = t
                .quadrature()
                .weights()
                .iter()
                .zip(&delta_nodes)
                .zip(&unit_nodes)
                .map(|((w, d), u)| w * d * u)
                .sum();
            let expected = radial_synthesis(&RadialCoefficients(unit.clone()), &[s], &basis)[0];
            assert!((integral - expected).abs() < 1e-10);
            if nodes.contains(&s) {
                assert!((integral - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn large_radius_does_not_overflow() {
        let basis = RadialBasis::new(300, 1.0).unwrap();
        for &r in &[0.0, 10.0, 900.0, 1500.0, 5000.0] {
            let k = basis.eval_all(r);
            assert!(k.iter().all(|v| v.is_finite()), "r={r}");
        }
        assert_eq!(basis.eval_all(5000.0)[10], 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialBasis::new(0, 1.0).is_err());
        assert!(RadialBasis::new(3, 0.0).is_err());
        assert!(RadialBasis::new(3, f64::NAN).is_err());
        let basis = RadialBasis::new(3, 1.0).unwrap();
        assert!(radial_dirac(-1.0, &basis).is_err());
        assert!(radial_analysis(&[1.0, 2.0], &basis).is_err());
    }

    #[test]
    fn tau_for_radius_places_last_node() {
        let tau = tau_for_radius(6, 1.0).unwrap();
        let q = radial_quadrature(6, tau).unwrap();
        assert!((q.nodes()[5] - 1.0).abs() < 1e-14);
    }
}
