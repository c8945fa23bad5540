//! Coefficient files as FLAG01 or JSON, told apart by their first bytes.

use anyhow::{Context, Result};
use flaglet::flag_transform::{BandLimit, FlagCoefficients};
use flaglet::format::{Flag01, MAGIC};
use flaglet::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::Format;

/// JSON form of a coefficient file; `values` holds `[re, im]` pairs in
/// FLAG01 order.
#[derive(Serialize, Deserialize)]
struct JsonCoefficients {
    band: usize,
    size: usize,
    tau: f64,
    values: Vec<[f64; 2]>,
}

pub fn write_coefficients(path: &Path, f: &FlagCoefficients, format: Format) -> Result<()> {
    match format {
        Format::Binary => Flag01::from_coefficients(f).write(path)?,
        Format::Json => {
            let bl = f.bandlimit();
            let dump = JsonCoefficients {
                band: bl.l,
                size: bl.p,
                tau: bl.tau,
                values: f.values().iter().map(|c| [c.re, c.im]).collect(),
            };
            fs::write(path, serde_json::to_string(&dump)?).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<FlagCoefficients> {
    let bytes = fs::read(path).map_err(Error::from)?;
    if bytes.starts_with(MAGIC) {
        return Ok(Flag01::decode(&bytes)?.into_coefficients()?);
    }
    let dump: JsonCoefficients =
        serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let bl = BandLimit::new(dump.band, dump.size, dump.tau).map_err(|e| Error::Format(e.to_string()))?;
    let values = dump.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
    Ok(FlagCoefficients::from_values(bl, values).map_err(|e| Error::Format(e.to_string()))?)
}
