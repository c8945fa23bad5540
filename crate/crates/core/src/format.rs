//! The FLAG01 binary container and the JSON manifests built around it.
//!
//! Layout, all little-endian:
//!
//! ```text
//! "FLAG01"  L: u64  P: u64  tau: f64  kind: u8  payload
//! ```
//!
//! Complex payloads are `(re, im)` pairs of `f64`; real payloads are plain
//! `f64`. The element count follows from the file length.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flag_transform::{sample_count, BandLimit, FlagCoefficients};
use crate::flaglet_transform::FlagletCoefficients;
use crate::fourier_bessel::BesselCoefficients;
use crate::sphere_harmonics::{lm_count, SamplingScheme};
use crate::tiling::{HarmonicWindows, WaveletFamily};

pub const MAGIC: &[u8; 6] = b"FLAG01";
pub const HEADER_LEN: usize = 6 + 8 + 8 + 8 + 1;

/// Contents of the flags byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum PayloadKind {
    /// Complex `f_lmp`, flattened as `p * L^2 + l^2 + l + m`.
    Coefficients = 0,
    /// Coefficients whose imaginary parts are all zero, stored as reals.
    RealCoefficients = 1,
    /// Harmonic windows, `Phi` then every `Psi^jj'` in scale-pair order.
    Windows = 2,
    /// Fourier-Bessel coefficients `[(l^2 + l + m) * K + ik]`.
    Bessel = 3,
    /// Complex samples on the Gauss-Legendre ball grid.
    Samples = 4,
    /// Real samples on the Gauss-Legendre ball grid.
    RealSamples = 5,
}

impl PayloadKind {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0 => Self::Coefficients,
            1 => Self::RealCoefficients,
            2 => Self::Windows,
            3 => Self::Bessel,
            4 => Self::Samples,
            5 => Self::RealSamples,
            _ => return None,
        })
    }

    pub fn is_real(self) -> bool {
        matches!(self, Self::RealCoefficients | Self::Windows | Self::RealSamples)
    }
}

/// A decoded FLAG01 file.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag01 {
    pub band: u64,
    pub size: u64,
    pub tau: f64,
    pub kind: PayloadKind,
    /// Real payloads carry zero imaginary parts.
    pub data: Vec<Complex64>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Required element count for kinds whose length is fixed by the header.
fn expected_len(band: u64, size: u64, kind: PayloadKind) -> Result<Option<usize>> {
    let overflow = || format_err("band-limits overflow the address space");
    let l = usize::try_from(band).map_err(|_| overflow())?;
    let p = usize::try_from(size).map_err(|_| overflow())?;
    Ok(match kind {
        PayloadKind::Coefficients | PayloadKind::RealCoefficients => {
            Some(l.checked_mul(l).and_then(|x| x.checked_mul(p)).ok_or_else(overflow)?)
        }
        PayloadKind::Samples | PayloadKind::RealSamples => {
            let per_shell = l
                .checked_mul(2)
                .and_then(|x| x.checked_sub(1))
                .and_then(|x| x.checked_mul(l))
                .ok_or_else(overflow)?;
            Some(per_shell.checked_mul(p).ok_or_else(overflow)?)
        }
        PayloadKind::Windows | PayloadKind::Bessel => None,
    })
}

impl Flag01 {
    pub fn encode(&self) -> Vec<u8> {
        let width = if self.kind.is_real() { 8 } else { 16 };
        let mut out = Vec::with_capacity(HEADER_LEN + width * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.band.to_le_bytes());
        out.extend_from_slice(&self.size.to_le_bytes());
        out.extend_from_slice(&self.tau.to_le_bytes());
        out.push(self.kind as u8);
        for v in &self.data {
            out.extend_from_slice(&v.re.to_le_bytes());
            if !self.kind.is_real() {
                out.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(format_err(format!(
                "file too short for a header: {} bytes",
                bytes.len()
            )));
        }
        if &bytes[..6] != MAGIC {
            return Err(format_err("bad magic, expected FLAG01"));
        }
        let word = |at: usize| {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[at..at + 8]);
            b
        };
        let band = u64::from_le_bytes(word(6));
        let size = u64::from_le_bytes(word(14));
        let tau = f64::from_le_bytes(word(22));
        let kind =
            PayloadKind::from_byte(bytes[30]).ok_or_else(|| format_err(format!("unknown flags byte {}", bytes[30])))?;
        if band == 0 || size == 0 {
            return Err(format_err("band-limits must be positive"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(format_err(format!("tau must be positive and finite, got {tau}")));
        }
        let payload = &bytes[HEADER_LEN..];
        let width = if kind.is_real() { 8 } else { 16 };
        if !payload.len().is_multiple_of(width) {
            return Err(format_err(format!(
                "payload of {} bytes is not a whole number of {width}-byte values",
                payload.len()
            )));
        }
        let n = payload.len() / width;
        if let Some(want) = expected_len(band, size, kind)? {
            if want != n {
                return Err(format_err(format!("expected {want} values, found {n}")));
            }
        }
        let data = payload
            .chunks_exact(width)
            .map(|c| {
                let mut b = [0u8; 8];
                b.copy_from_slice(&c[..8]);
                let re = f64::from_le_bytes(b);
                let im = if width == 16 {
                    b.copy_from_slice(&c[8..]);
                    f64::from_le_bytes(b)
                } else {
                    0.0
                };
                Complex64::new(re, im)
            })
            .collect();
        Ok(Self {
            band,
            size,
            tau,
            kind,
            data,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }

    pub fn bandlimit(&self) -> Result<BandLimit> {
        let l = usize::try_from(self.band).map_err(|_| format_err("L does not fit in usize"))?;
        let p = usize::try_from(self.size).map_err(|_| format_err("P does not fit in usize"))?;
        BandLimit::new(l, p, self.tau).map_err(|e| format_err(e.to_string()))
    }

    /// Wraps coefficients, choosing the real kind when every imaginary part is zero.
    pub fn from_coefficients(f: &FlagCoefficients) -> Self {
        let bl = f.bandlimit();
        let real = f.values().iter().all(|v| v.im.to_bits() == 0);
        Self {
            band: bl.l as u64,
            size: bl.p as u64,
            tau: bl.tau,
            kind: if real {
                PayloadKind::RealCoefficients
            } else {
                PayloadKind::Coefficients
            },
            data: f.values().to_vec(),
        }
    }

    pub fn into_coefficients(self) -> Result<FlagCoefficients> {
        if !matches!(self.kind, PayloadKind::Coefficients | PayloadKind::RealCoefficients) {
            return Err(format_err(format!("expected coefficients, found {:?}", self.kind)));
        }
        let bl = self.bandlimit()?;
        FlagCoefficients::from_values(bl, self.data)
    }

    /// Samples on the Gauss-Legendre ball grid of `bandlimit`.
    pub fn from_samples(bandlimit: BandLimit, samples: &[Complex64]) -> Result<Self> {
        let want = sample_count(&bandlimit, SamplingScheme::GaussLegendre);
        crate::error::check_len(want, samples.len())?;
        let real = samples.iter().all(|v| v.im.to_bits() == 0);
        Ok(Self {
            band: bandlimit.l as u64,
            size: bandlimit.p as u64,
            tau: bandlimit.tau,
            kind: if real {
                PayloadKind::RealSamples
            } else {
                PayloadKind::Samples
            },
            data: samples.to_vec(),
        })
    }

    pub fn into_samples(self) -> Result<(BandLimit, Vec<Complex64>)> {
        if !matches!(self.kind, PayloadKind::Samples | PayloadKind::RealSamples) {
            return Err(format_err(format!("expected samples, found {:?}", self.kind)));
        }
        Ok((self.bandlimit()?, self.data))
    }

    pub fn from_windows(windows: &HarmonicWindows) -> Self {
        let family = windows.family();
        let bl = family.bandlimit;
        let mut data: Vec<Complex64> = windows.phi().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for (j, jp) in family.scale_pairs() {
            let psi = windows.psi(j, jp).expect("scale pair from the family");
            data.extend(psi.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self {
            band: bl.l as u64,
            size: bl.p as u64,
            tau: bl.tau,
            kind: PayloadKind::Windows,
            data,
        }
    }
}

/// Parameters needed to rebuild a [`WaveletFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub band: usize,
    pub size: usize,
    pub tau: f64,
    pub lambda: f64,
    pub nu: f64,
    pub j0: usize,
    pub j0p: usize,
}

impl FamilySpec {
    pub fn of(family: &WaveletFamily) -> Self {
        Self {
            band: family.bandlimit.l,
            size: family.bandlimit.p,
            tau: family.bandlimit.tau,
            lambda: family.lambda,
            nu: family.nu,
            j0: family.j0,
            j0p: family.j0p,
        }
    }

    pub fn family(&self) -> Result<WaveletFamily> {
        let bl = BandLimit::new(self.band, self.size, self.tau)?;
        WaveletFamily::new(bl, self.lambda, self.nu, self.j0, self.j0p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub j: usize,
    pub jp: usize,
    pub file: String,
}

/// `manifest.json` of a flaglet coefficient directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagletManifest {
    pub family: FamilySpec,
    pub j_max: usize,
    pub jp_max: usize,
    pub scaling: String,
    pub scales: Vec<ScaleEntry>,
}

pub const MANIFEST: &str = "manifest.json";

/// Writes `manifest.json`, `scaling.flag` and one `wav_j_jp.flag` per scale pair.
pub fn write_flaglet_dir(dir: impl AsRef<Path>, coeffs: &FlagletCoefficients) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    Flag01::from_coefficients(&coeffs.scaling).write(dir.join("scaling.flag"))?;
    let mut scales = Vec::new();
    for (&(j, jp), w) in &coeffs.wavelets {
        let file = format!("wav_{j}_{jp}.flag");
        Flag01::from_coefficients(w).write(dir.join(&file))?;
        scales.push(ScaleEntry { j, jp, file });
    }
    let manifest = FlagletManifest {
        family: FamilySpec::of(&coeffs.family),
        j_max: coeffs.family.j,
        jp_max: coeffs.family.jp,
        scaling: "scaling.flag".into(),
        scales,
    };
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn safe_name(name: &str) -> Result<&str> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(name)
    } else {
        Err(format_err(format!(
            "manifest file name {name:?} is not a plain file name"
        )))
    }
}

pub fn read_flaglet_dir(dir: impl AsRef<Path>) -> Result<FlagletCoefficients> {
    let dir = dir.as_ref();
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let manifest: FlagletManifest = serde_json::from_str(&text).map_err(|e| format_err(e.to_string()))?;
    let family = manifest.family.family().map_err(|e| format_err(e.to_string()))?;
    if family.j != manifest.j_max || family.jp != manifest.jp_max {
        return Err(format_err("manifest scale range disagrees with its family"));
    }
    let load = |name: &str| -> Result<FlagCoefficients> {
        let f = Flag01::read(dir.join(safe_name(name)?))?.into_coefficients()?;
        let bl = f.bandlimit();
        if bl.l != family.bandlimit.l || bl.p != family.bandlimit.p || bl.tau != family.bandlimit.tau {
            return Err(format_err(format!(
                "{name} has a different band-limit from the manifest"
            )));
        }
        Ok(f)
    };
    let scaling = load(&manifest.scaling)?;
    let mut wavelets = BTreeMap::new();
    for entry in &manifest.scales {
        if family.pair_index(entry.j, entry.jp).is_none() {
            return Err(format_err(format!(
                "scale pair ({}, {}) outside the family",
                entry.j, entry.jp
            )));
        }
        if wavelets.insert((entry.j, entry.jp), load(&entry.file)?).is_some() {
            return Err(format_err(format!("duplicate scale pair ({}, {})", entry.j, entry.jp)));
        }
    }
    if wavelets.len() != family.scale_count() {
        return Err(format_err(format!(
            "manifest lists {} scale pairs, family has {}",
            wavelets.len(),
            family.scale_count()
        )));
    }
    Ok(FlagletCoefficients {
        family,
        scaling,
        wavelets,
    })
}

/// JSON side of a Fourier-Bessel export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselManifest {
    pub band: usize,
    pub size: usize,
    pub tau: f64,
    pub k_grid: Vec<f64>,
    pub payload: String,
}

/// Writes `<stem>.json` and `<stem>.flag`.
pub fn write_bessel(stem: impl AsRef<Path>, bandlimit: &BandLimit, coeffs: &BesselCoefficients) -> Result<()> {
    let stem = stem.as_ref();
    let payload = stem.with_extension("flag");
    let name = payload
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| format_err("output path has no usable file name"))?
        .to_string();
    Flag01 {
        band: coeffs.band as u64,
        size: bandlimit.p as u64,
        tau: bandlimit.tau,
        kind: PayloadKind::Bessel,
        data: coeffs.values.clone(),
    }
    .write(&payload)?;
    let manifest = BesselManifest {
        band: coeffs.band,
        size: bandlimit.p,
        tau: bandlimit.tau,
        k_grid: coeffs.k_grid.clone(),
        payload: name,
    };
    fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

/// Reads a Fourier-Bessel export given its `.json` manifest.
pub fn read_bessel(manifest_path: impl AsRef<Path>) -> Result<(BesselManifest, BesselCoefficients)> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path)?;
    let manifest: BesselManifest = serde_json::from_str(&text).map_err(|e| format_err(e.to_string()))?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let file = Flag01::read(dir.join(safe_name(&manifest.payload)?))?;
    if file.kind != PayloadKind::Bessel {
        return Err(format_err(format!(
            "expected Fourier-Bessel payload, found {:?}",
            file.kind
        )));
    }
    if file.band != manifest.band as u64 || file.size != manifest.size as u64 || file.tau != manifest.tau {
        return Err(format_err("payload header disagrees with the manifest"));
    }
    let want = lm_count(manifest.band)
        .checked_mul(manifest.k_grid.len())
        .ok_or_else(|| format_err("manifest dimensions overflow"))?;
    if file.data.len() != want {
        return Err(format_err(format!("expected {want} values, found {}", file.data.len())));
    }
    let coeffs = BesselCoefficients {
        band: manifest.band,
        k_grid: manifest.k_grid.clone(),
        values: file.data,
    };
    Ok((manifest, coeffs))
}
