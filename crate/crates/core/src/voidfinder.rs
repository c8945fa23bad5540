//! Void candidates from galaxy catalogs via negative flaglet responses.
//!
//! The pipeline is `make_mock` or [`Catalog::read_csv`], then [`voxelize`]
//! onto a [`BallGrid`], then [`find_voids`]. Candidate significance is
//! measured on the band-limited field, after truncation at `(L, P)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::error::{check_len, invalid, Error, Result};
use crate::flag_transform::{flag_forward, flag_inverse, BallGrid};
use crate::flaglet_transform::{eval_axisymmetric, flaglet_analysis, translated_window};
use crate::format::FamilySpec;
use crate::tiling::{build_windows, HarmonicWindows, WaveletFamily};

const TWO_PI: f64 = 2.0 * PI;

/// Point positions `(r, theta, phi)` with optional positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    points: Vec<(f64, f64, f64)>,
    weights: Option<Vec<f64>>,
    radius: f64,
}

fn check_point(i: usize, (r, theta, phi): (f64, f64, f64)) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("point {i}: radius {r} is not a non-negative number")));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid(format!("point {i}: theta {theta} outside [0, pi]")));
    }
    if !(0.0..TWO_PI).contains(&phi) {
        return Err(invalid(format!("point {i}: phi {phi} outside [0, 2 pi)")));
    }
    Ok(())
}

impl Catalog {
    /// Points beyond `radius` are accepted here and dropped by [`voxelize`].
    pub fn new(points: Vec<(f64, f64, f64)>, weights: Option<Vec<f64>>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("survey radius must be positive, got {radius}")));
        }
        for (i, &pt) in points.iter().enumerate() {
            check_point(i, pt)?;
        }
        if let Some(w) = &weights {
            check_len(points.len(), w.len())?;
            if let Some(i) = w.iter().position(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(invalid(format!("point {i}: weight {} is not positive", w[i])));
            }
        }
        Ok(Self {
            points,
            weights,
            radius,
        })
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Parses `r,theta,phi[,weight]` CSV with a header line.
    pub fn read_csv<R: Read>(reader: R, radius: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_ascii_lowercase).collect();
        let weighted = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["r", "theta", "phi"] => false,
            ["r", "theta", "phi", "weight"] => true,
            other => {
                return Err(Error::Format(format!(
                    "expected header r,theta,phi[,weight], found {}",
                    other.join(",")
                )))
            }
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = row + 2;
            let want = if weighted { 4 } else { 3 };
            if record.len() != want {
                return Err(Error::Format(format!(
                    "line {line}: expected {want} fields, found {}",
                    record.len()
                )));
            }
            let field = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {line}: field {}: {e}", header[i])))
            };
            points.push((field(0)?, field(1)?, field(2)?));
            if weighted {
                weights.push(field(3)?);
            }
        }
        Self::new(points, weighted.then_some(weights), radius).map_err(|e| Error::Format(e.to_string()))
    }

    /// Writes CSV that [`read_csv`](Self::read_csv) reproduces exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.weights.is_some() {
            w.write_record(["r", "theta", "phi", "weight"])?;
        } else {
            w.write_record(["r", "theta", "phi"])?;
        }
        for (i, &(r, t, p)) in self.points.iter().enumerate() {
            let mut rec = vec![r.to_string(), t.to_string(), p.to_string()];
            if let Some(ws) = &self.weights {
                rec.push(ws[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A spherical underdensity to plant in a mock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedVoid {
    /// `(r, theta, phi)`
    pub center: (f64, f64, f64),
    pub radius: f64,
    /// Fraction of points removed inside the sphere, in `(0, 1]`.
    pub depth: f64,
}

pub fn to_cartesian((r, theta, phi): (f64, f64, f64)) -> [f64; 3] {
    let st = theta.sin();
    [r * st * phi.cos(), r * st * phi.sin(), r * theta.cos()]
}

pub fn distance(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (x, y) = (to_cartesian(a), to_cartesian(b));
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

/// Poisson points of mean count `n_galaxies` in the ball of `radius`,
/// thinned by `1 - depth` inside each planted void.
///
/// Every point consumes the same four random numbers whatever the voids,
/// so catalogs that differ only in depth share their parent points.
pub fn make_mock(n_galaxies: usize, voids: &[PlantedVoid], radius: f64, seed: u64) -> Result<Catalog> {
    if n_galaxies == 0 {
        return Err(invalid("n_galaxies must be positive"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("survey radius must be positive, got {radius}")));
    }
    for (i, v) in voids.iter().enumerate() {
        if !(v.radius > 0.0 && v.radius.is_finite()) {
            return Err(invalid(format!("void {i}: radius must be positive, got {}", v.radius)));
        }
        if !(v.depth > 0.0 && v.depth <= 1.0) {
            return Err(invalid(format!("void {i}: depth must lie in (0, 1], got {}", v.depth)));
        }
        check_point(i, v.center)?;
        if v.center.0 + v.radius > radius {
            return Err(invalid(format!("void {i} extends beyond the survey radius")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(n_galaxies as f64)
        .map_err(|e| invalid(e.to_string()))?
        .sample(&mut rng) as usize;
    let centers: Vec<[f64; 3]> = voids.iter().map(|v| to_cartesian(v.center)).collect();
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let r = radius * rng.random::<f64>().cbrt();
        let theta = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
        let mut phi = TWO_PI * rng.random::<f64>();
        if phi >= TWO_PI {
            phi = 0.0;
        }
        let u: f64 = rng.random();
        let x = to_cartesian((r, theta, phi));
        let keep: f64 = voids
            .iter()
            .zip(&centers)
            .filter(|(v, c)| {
                let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                d2 < v.radius * v.radius
            })
            .map(|(v, _)| 1.0 - v.depth)
            .product();
        if u < keep {
            points.push((r, theta, phi));
        }
    }
    Catalog::new(points, None, radius)
}

/// Cell boundaries around the grid nodes in `r`, `theta` and `phi`.
///
/// Cells are coordinate boxes between midpoints of neighbouring nodes, so
/// a point falls in the cell of its nearest node along each coordinate.
#[derive(Debug, Clone)]
struct Cells {
    r_edges: Vec<f64>,
    t_edges: Vec<f64>,
    n_phi: usize,
    n_theta: usize,
}

fn midpoints(nodes: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut e = Vec::with_capacity(nodes.len() + 1);
    e.push(lo);
    e.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    e.push(hi);
    e
}

fn bin(edges: &[f64], x: f64) -> usize {
    let i = edges.partition_point(|&e| e <= x);
    i.saturating_sub(1).min(edges.len() - 2)
}

impl Cells {
    fn new(grid: &BallGrid, outer: f64) -> Result<Self> {
        let radii = grid.radii();
        let edges = midpoints(radii, 0.0, outer);
        if edges[edges.len() - 2] >= outer {
            return Err(invalid(format!(
                "survey radius {outer} lies inside the outermost grid cell"
            )));
        }
        let s = grid.sampling();
        Ok(Self {
            r_edges: edges,
            t_edges: midpoints(s.thetas(), 0.0, PI),
            n_phi: s.n_phi(),
            n_theta: s.n_theta(),
        })
    }

    /// `(i_r, j, k)` of the cell holding a point, `None` beyond the outer edge.
    fn locate(&self, (r, theta, phi): (f64, f64, f64)) -> Option<(usize, usize, usize)> {
        if r > *self.r_edges.last().unwrap() {
            return None;
        }
        let i = bin(&self.r_edges, r);
        let j = bin(&self.t_edges, theta);
        let k = (phi.rem_euclid(TWO_PI) / TWO_PI * self.n_phi as f64).round() as usize % self.n_phi;
        Some((i, j, k))
    }

    /// Cell volume for ring `(i_r, j)`, indexed `i_r * n_theta + j`.
    fn volumes(&self) -> Vec<f64> {
        let dphi = TWO_PI / self.n_phi as f64;
        let mut out = Vec::with_capacity((self.r_edges.len() - 1) * self.n_theta);
        for w in self.r_edges.windows(2) {
            let radial = (w[1].powi(3) - w[0].powi(3)) / 3.0;
            for t in self.t_edges.windows(2) {
                out.push(radial * (t[0].cos() - t[1].cos()) * dphi);
            }
        }
        out
    }
}

/// Overdensity `n / n_bar - 1` sampled on a ball grid.
#[derive(Debug, Clone)]
pub struct DensityField {
    pub grid: BallGrid,
    /// Overdensity per node, in grid storage order.
    pub delta: Vec<f64>,
    /// Summed point weights per cell.
    pub counts: Vec<f64>,
    /// Mean density, total weight over total volume.
    pub mean_density: f64,
    /// Points beyond the survey radius.
    pub dropped: usize,
    /// Set when the catalog had no usable points; `delta` is then zero.
    pub no_data: bool,
    ring_volumes: Vec<f64>,
}

impl DensityField {
    /// Volume of the cell around node `(i_r, j, *)`.
    pub fn cell_volume(&self, i_r: usize, j: usize) -> f64 {
        self.ring_volumes[i_r * self.grid.sampling().n_theta() + j]
    }

    /// Volume-weighted mean of `delta`.
    pub fn mean_delta(&self) -> f64 {
        let n_phi = self.grid.sampling().n_phi();
        let (mut num, mut den) = (0.0, 0.0);
        for (ring, chunk) in self.delta.chunks(n_phi).enumerate() {
            let v = self.ring_volumes[ring];
            num += v * chunk.iter().sum::<f64>();
            den += v * n_phi as f64;
        }
        num / den
    }

    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Counts catalog points in the cells of `grid` and converts to overdensity.
pub fn voxelize(catalog: &Catalog, grid: &BallGrid) -> Result<DensityField> {
    let cells = Cells::new(grid, catalog.radius)?;
    let ring_volumes = cells.volumes();
    let n_phi = cells.n_phi;
    let mut counts = vec![0.0; grid.len()];
    let mut dropped = 0;
    for (i, &pt) in catalog.points.iter().enumerate() {
        match cells.locate(pt) {
            Some((ir, j, k)) => counts[grid.index(ir, j, k)] += catalog.weight(i),
            None => dropped += 1,
        }
    }
    let total: f64 = counts.iter().sum();
    let volume: f64 = ring_volumes.iter().sum::<f64>() * n_phi as f64;
    let mean_density = total / volume;
    let no_data = total == 0.0;
    let delta = if no_data {
        vec![0.0; counts.len()]
    } else {
        counts
            .iter()
            .enumerate()
            .map(|(idx, &c)| c / (mean_density * ring_volumes[idx / n_phi]) - 1.0)
            .collect()
    };
    Ok(DensityField {
        grid: grid.clone(),
        delta,
        counts,
        mean_density,
        dropped,
        no_data,
        ring_volumes,
    })
}

/// A local minimum of a wavelet map, possibly absorbing weaker ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidCandidate {
    /// `(r, theta, phi)` of the minimum, refined between grid nodes.
    pub center: (f64, f64, f64),
    pub scale_pair: (usize, usize),
    pub response: f64,
    pub effective_radius: f64,
    /// `response` over the robust spread of its map on the same shell.
    pub significance: f64,
    /// Weaker candidates merged into this one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_voids: Vec<VoidCandidate>,
}

/// A real-space map tagged with its scale pair `(j, j')`.
pub type ScaleMap = ((usize, usize), Vec<f64>);

/// Real-space wavelet maps `W^jj'` of a density field, in scale-pair order.
pub fn wavelet_maps(field: &DensityField, windows: &HarmonicWindows) -> Result<Vec<ScaleMap>> {
    let grid = &field.grid;
    let samples: Vec<Complex64> = field.delta.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    let f = flag_forward(&samples, grid)?;
    let w = flaglet_analysis(&f, windows)?;
    w.wavelets
        .par_iter()
        .map(|(&pair, c)| Ok((pair, flag_inverse(c, grid)?.into_iter().map(|v| v.re).collect())))
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, &mut hi, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// `1.4826 * MAD` of each radial shell of a map.
pub fn shell_sigma(map: &[f64], grid: &BallGrid) -> Vec<f64> {
    let per_shell = grid.sampling().len();
    map.chunks(per_shell)
        .map(|shell| {
            let mut v = shell.to_vec();
            let m = median(&mut v);
            for x in v.iter_mut() {
                *x = (*x - m).abs();
            }
            1.4826 * median(&mut v)
        })
        .collect()
}

fn local_minima(map: &[f64], grid: &BallGrid, sigma: &[f64], threshold: f64) -> Vec<(usize, usize, usize)> {
    let (n_r, n_t, n_p) = (grid.radii().len(), grid.sampling().n_theta(), grid.sampling().n_phi());
    let mut out = Vec::new();
    for i in 0..n_r {
        let cut = -threshold * sigma[i];
        if sigma[i] <= 0.0 {
            continue;
        }
        for j in 0..n_t {
            for k in 0..n_p {
                let v = map[grid.index(i, j, k)];
                if v >= cut {
                    continue;
                }
                let mut lowest = true;
                'nb: for di in -1i64..=1 {
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= n_r as i64 {
                        continue;
                    }
                    for dj in -1i64..=1 {
                        let jj = j as i64 + dj;
                        if jj < 0 || jj >= n_t as i64 {
                            continue;
                        }
                        for dk in -1i64..=1 {
                            if di == 0 && dj == 0 && dk == 0 {
                                continue;
                            }
                            let kk = (k as i64 + dk).rem_euclid(n_p as i64) as usize;
                            if map[grid.index(ii as usize, jj as usize, kk)] <= v {
                                lowest = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if lowest {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

/// First zero of `f` sampled at `xs` walking away from index `start`.
fn zero_crossing(xs: &[f64], f: &[f64], start: usize, step: i64) -> Option<f64> {
    let mut i = start as i64;
    loop {
        let next = i + step;
        if next < 0 || next >= xs.len() as i64 {
            return None;
        }
        let (a, b) = (f[i as usize], f[next as usize]);
        if b <= 0.0 {
            let t = a / (a - b);
            return Some(xs[i as usize] + t * (xs[next as usize] - xs[i as usize]));
        }
        i = next;
    }
}

const WIDTH_SAMPLES: usize = 512;

/// Shape of a translated flaglet's central lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakShape {
    /// Radius of the maximum of `r^2 Psi(r)` along the symmetry axis.
    pub radius: f64,
    /// Mean distance from the peak to the first radial zero on either side.
    pub radial: f64,
    /// Chord from the axis to the first zero in theta at the peak radius.
    pub angular: f64,
}

impl PeakShape {
    /// The larger semi-axis of the lobe.
    pub fn width(&self) -> f64 {
        self.radial.max(self.angular)
    }

    /// Volume of the lobe ellipsoid.
    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radial * self.angular * self.angular
    }
}

/// Central lobe of the flaglet `Psi^jj'` translated radially to `s`.
///
/// Near the origin the Laguerre functions are large because they are
/// normalised against `r^2 dr`, so the peak is located on `r^2 Psi`.
pub fn peak_shape(windows: &HarmonicWindows, pair: (usize, usize), s: f64, outer: f64) -> Result<PeakShape> {
    let bl = windows.family().bandlimit;
    let h = translated_window(windows, Some(pair), s, bl.tau)?;
    let rs: Vec<f64> = (0..=WIDTH_SAMPLES)
        .map(|n| outer * n as f64 / WIDTH_SAMPLES as f64)
        .collect();
    let axis = eval_axisymmetric(bl, &h, &rs.iter().map(|&r| (r, 0.0)).collect::<Vec<_>>())?;
    let peak = (0..axis.len())
        .max_by(|&a, &b| (rs[a] * rs[a] * axis[a]).total_cmp(&(rs[b] * rs[b] * axis[b])))
        .unwrap();
    let r_peak = rs[peak];
    let left = zero_crossing(&rs, &axis, peak, -1).map_or(r_peak, |z| r_peak - z);
    let right = zero_crossing(&rs, &axis, peak, 1).map_or(outer - r_peak, |z| z - r_peak);
    let ts: Vec<f64> = (0..=WIDTH_SAMPLES)
        .map(|n| PI * n as f64 / WIDTH_SAMPLES as f64)
        .collect();
    let ring = eval_axisymmetric(bl, &h, &ts.iter().map(|&t| (r_peak, t)).collect::<Vec<_>>())?;
    let t_zero = zero_crossing(&ts, &ring, 0, 1).unwrap_or(PI);
    Ok(PeakShape {
        radius: r_peak,
        radial: 0.5 * (left + right),
        angular: 2.0 * r_peak * (0.5 * t_zero).sin(),
    })
}

/// [`PeakShape::width`] of the flaglet translated to `s`.
pub fn peak_width(windows: &HarmonicWindows, pair: (usize, usize), s: f64, outer: f64) -> Result<f64> {
    Ok(peak_shape(windows, pair, s, outer)?.width())
}

/// Vertex of the parabola through three points, clamped to their span.
fn vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv <= 0.0 {
        return x[1];
    }
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
    v.clamp(x[0], x[2])
}

/// Sub-node position of a grid minimum, one parabola per coordinate.
fn refine(map: &[f64], grid: &BallGrid, (i, j, k): (usize, usize, usize)) -> (f64, f64, f64) {
    let s = grid.sampling();
    let (radii, thetas, n_p) = (grid.radii(), s.thetas(), s.n_phi());
    let at = |a: usize, b: usize, c: usize| map[grid.index(a, b, c)];
    let r = if i > 0 && i + 1 < radii.len() {
        vertex(
            [radii[i - 1], radii[i], radii[i + 1]],
            [at(i - 1, j, k), at(i, j, k), at(i + 1, j, k)],
        )
    } else {
        radii[i]
    };
    let theta = if j > 0 && j + 1 < thetas.len() {
        vertex(
            [thetas[j - 1], thetas[j], thetas[j + 1]],
            [at(i, j - 1, k), at(i, j, k), at(i, j + 1, k)],
        )
    } else {
        thetas[j]
    };
    let dphi = TWO_PI / n_p as f64;
    let (km, kp) = ((k + n_p - 1) % n_p, (k + 1) % n_p);
    let phi = s.phis()[k] + vertex([-dphi, 0.0, dphi], [at(i, j, km), at(i, j, k), at(i, j, kp)]);
    (r, theta, phi.rem_euclid(TWO_PI))
}

fn significance_order(a: &VoidCandidate, b: &VoidCandidate) -> std::cmp::Ordering {
    a.significance
        .total_cmp(&b.significance)
        .then(a.response.total_cmp(&b.response))
        .then(a.scale_pair.cmp(&b.scale_pair))
        .then(a.center.0.total_cmp(&b.center.0))
        .then(a.center.1.total_cmp(&b.center.1))
        .then(a.center.2.total_cmp(&b.center.2))
}

/// Greedy merge in order of significance: each candidate joins the first
/// stronger one whose centre lies within either one's effective radius.
pub fn merge_candidates(mut candidates: Vec<VoidCandidate>) -> Vec<VoidCandidate> {
    candidates.sort_by(significance_order);
    let mut parents: Vec<VoidCandidate> = Vec::new();
    for c in candidates {
        let host = parents.iter_mut().find(|p| {
            let d = distance(p.center, c.center);
            d < p.effective_radius || d < c.effective_radius
        });
        match host {
            Some(p) => p.sub_voids.push(c),
            None => parents.push(c),
        }
    }
    parents
}

/// Void candidates of a density field, most significant first.
///
/// Minima are taken over the 26 neighbours of each node, `phi` periodic,
/// and must fall below `-threshold_sigma` times the robust spread of their
/// shell. A minimum is kept only when the central lobe of its flaglet,
/// translated to the minimum's radius, peaks within one radial semi-axis of
/// it, stays clear of the origin and expects at least `threshold_sigma^2`
/// points.
pub fn find_voids(field: &DensityField, family: &WaveletFamily, threshold_sigma: f64) -> Result<Vec<VoidCandidate>> {
    if !(threshold_sigma > 0.0 && threshold_sigma.is_finite()) {
        return Err(invalid(format!(
            "threshold_sigma must be positive, got {threshold_sigma}"
        )));
    }
    let grid = &field.grid;
    let fam = family.bandlimit;
    let bl = grid.bandlimit();
    if fam.l != bl.l || fam.p != bl.p || fam.tau != bl.tau {
        return Err(Error::FamilyMismatch(
            "wavelet family and density grid differ in band-limit".into(),
        ));
    }
    if field.no_data {
        return Ok(Vec::new());
    }
    let windows = build_windows(family)?;
    find_voids_with(field, &windows, threshold_sigma)
}

/// Scale pair, node, response and significance of a thresholded minimum.
type Minimum = ((usize, usize), (usize, usize, usize), f64, f64);

/// As [`find_voids`] with prebuilt windows.
pub fn find_voids_with(
    field: &DensityField,
    windows: &HarmonicWindows,
    threshold_sigma: f64,
) -> Result<Vec<VoidCandidate>> {
    let grid = &field.grid;
    let maps = wavelet_maps(field, windows)?;
    let raw: Vec<Minimum> = maps
        .par_iter()
        .flat_map_iter(|(pair, map)| {
            let sigma = shell_sigma(map, grid);
            local_minima(map, grid, &sigma, threshold_sigma)
                .into_iter()
                .map(|(i, j, k)| {
                    let v = map[grid.index(i, j, k)];
                    (*pair, (i, j, k), v, v / sigma[i])
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let outer = *field.grid.radii().last().unwrap();
    let mut keys: Vec<((usize, usize), usize)> = raw.iter().map(|(pair, (i, _, _), _, _)| (*pair, *i)).collect();
    keys.sort_unstable();
    keys.dedup();
    let shapes: HashMap<((usize, usize), usize), PeakShape> = keys
        .par_iter()
        .map(|&(pair, i)| Ok(((pair, i), peak_shape(windows, pair, grid.radii()[i], outer)?)))
        .collect::<Result<_>>()?;

    // A lobe expecting N points cannot show a deficit beyond sqrt(N) sigma,
    // so minima in lobes holding fewer than threshold^2 points are ringing
    // from individual points rather than missing ones. Low radial scales
    // cannot be translated far from the origin; their minima elsewhere do
    // not sit under the lobe that produced them, and a lobe reaching the
    // origin has no position.
    let min_count = threshold_sigma * threshold_sigma;
    let index: HashMap<(usize, usize), usize> = maps.iter().enumerate().map(|(n, (pair, _))| (*pair, n)).collect();
    let candidates = raw
        .into_iter()
        .filter(|(pair, (i, _, _), _, _)| {
            let shape = &shapes[&(*pair, *i)];
            let r = grid.radii()[*i];
            let centred = (shape.radius - r).abs() <= shape.radial && r >= shape.radial;
            centred && field.mean_density * shape.volume() >= min_count
        })
        .map(|(pair, node, response, significance)| VoidCandidate {
            center: refine(&maps[index[&pair]].1, grid, node),
            scale_pair: pair,
            response,
            effective_radius: shapes[&(pair, node.0)].width(),
            significance,
            sub_voids: Vec::new(),
        })
        .collect();
    Ok(merge_candidates(candidates))
}

/// Output record of a void search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidReport {
    pub family: FamilySpec,
    pub threshold_sigma: f64,
    pub seed: Option<u64>,
    pub galaxies: usize,
    pub dropped: usize,
    pub candidates: Vec<VoidCandidate>,
}

/// A grayscale image with row-major values, `NaN` outside the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Raster {
    /// Maps the finite range linearly onto `1..=255`; `NaN` becomes 0.
    pub fn to_gray8(&self) -> Vec<u8> {
        let (lo, hi) = self
            .values
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        self.values
            .iter()
            .map(|&v| {
                if v.is_finite() {
                    1 + ((v - lo) / span * 254.0).round() as u8
                } else {
                    0
                }
            })
            .collect()
    }
}

/// One radial shell of a grid map as a `theta` by `phi` image.
pub fn shell_raster(map: &[f64], grid: &BallGrid, i_r: usize) -> Result<Raster> {
    check_len(grid.len(), map.len())?;
    if i_r >= grid.radii().len() {
        return Err(invalid(format!("shell {i_r} out of range")));
    }
    let s = grid.sampling();
    let start = grid.index(i_r, 0, 0);
    Ok(Raster {
        width: s.n_phi(),
        height: s.n_theta(),
        values: map[start..start + s.len()].to_vec(),
    })
}

/// The meridian plane through `phi0` and `phi0 + pi`, sampled at the
/// nearest grid node of each pixel. `z` points up the image.
pub fn meridian_raster(map: &[f64], grid: &BallGrid, phi0: f64, size: usize) -> Result<Raster> {
    check_len(grid.len(), map.len())?;
    if size < 2 {
        return Err(invalid("raster size must be at least 2"));
    }
    let outer = *grid.radii().last().unwrap();
    let cells = Cells::new(grid, outer * (1.0 + 1e-12))?;
    let mut values = vec![f64::NAN; size * size];
    for row in 0..size {
        let z = outer * (1.0 - 2.0 * row as f64 / (size - 1) as f64);
        for col in 0..size {
            let x = outer * (2.0 * col as f64 / (size - 1) as f64 - 1.0);
            let r = x.hypot(z);
            if r > outer {
                continue;
            }
            let theta = x.abs().atan2(z);
            let phi = if x >= 0.0 { phi0 } else { phi0 + PI };
            if let Some((i, j, k)) = cells.locate((r, theta, phi)) {
                values[row * size + col] = map[grid.index(i, j, k)];
            }
        }
    }
    Ok(Raster {
        width: size,
        height: size,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag_transform::BandLimit;
    use crate::radial_laguerre::tau_for_radius;

    fn grid(l: usize, p: usize) -> BallGrid {
        let tau = tau_for_radius(p, 1.0).unwrap();
        BallGrid::new(BandLimit::new(l, p, tau).unwrap()).unwrap()
    }

    #[test]
    fn cell_volumes_fill_the_ball() {
        let g = grid(6, 5);
        let cells = Cells::new(&g, 1.0).unwrap();
        let total: f64 = cells.volumes().iter().sum::<f64>() * cells.n_phi as f64;
        assert!((total - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn locate_picks_nearest_node_per_coordinate() {
        let g = grid(6, 5);
        let cells = Cells::new(&g, 1.0).unwrap();
        for (ir, &r) in g.radii().iter().enumerate() {
            for (j, &t) in g.sampling().thetas().iter().enumerate() {
                for (k, &p) in g.sampling().phis().iter().enumerate() {
                    assert_eq!(cells.locate((r, t, p)), Some((ir, j, k)));
                }
            }
        }
        assert_eq!(cells.locate((1.0 + 1e-9, 0.3, 0.2)), None);
        let last = g.sampling().n_phi() - 1;
        assert_eq!(cells.locate((0.5, 1.0, TWO_PI - 1e-9)).unwrap().2, 0);
        assert_ne!(last, 0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn merge_keeps_deepest() {
        let c = |r: f64, sig: f64, eff: f64| VoidCandidate {
            center: (r, 1.0, 1.0),
            scale_pair: (2, 2),
            response: sig,
            effective_radius: eff,
            significance: sig,
            sub_voids: vec![],
        };
        let out = merge_candidates(vec![c(0.5, -4.0, 0.1), c(0.55, -6.0, 0.01), c(0.9, -3.5, 0.05)]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].significance, -6.0);
        assert_eq!(out[0].sub_voids.len(), 1);
        assert_eq!(out[1].center.0, 0.9);
    }

    #[test]
    fn gray8_range() {
        let r = Raster {
            width: 3,
            height: 1,
            values: vec![-1.0, f64::NAN, 1.0],
        };
        assert_eq!(r.to_gray8(), vec![1, 0, 255]);
    }
}
