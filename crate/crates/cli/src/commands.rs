use anyhow::Context;
use flaglet::flag_transform::{flag_forward, flag_inverse, BallGrid, BandLimit};
use flaglet::flaglet_transform::{flaglet_analysis, flaglet_synthesis, render_flaglet, render_scaling};
use flaglet::format::{read_flaglet_dir, write_bessel, write_flaglet_dir, FamilySpec, Flag01};
use flaglet::fourier_bessel::{flag_to_bessel, log_k_grid};
use flaglet::radial_laguerre::tau_for_radius;
use flaglet::tiling::{build_windows, WaveletFamily};
use flaglet::voidfinder::{
    find_voids, make_mock, meridian_raster, shell_raster, voxelize, Catalog, PlantedVoid, Raster, VoidReport,
};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use crate::dump::{read_coefficients, write_coefficients};
use crate::{BandArgs, Command, Failure, FamilyArgs};

type Outcome = Result<Value, Failure>;

pub fn parse_void(text: &str) -> Result<PlantedVoid, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[r, theta, phi, radius, depth] => Ok(PlantedVoid {
            center: (r, theta, phi),
            radius,
            depth,
        }),
        _ => Err(format!("expected r,theta,phi,radius,depth, got {} values", v.len())),
    }
}

fn bandlimit(args: &BandArgs) -> Result<BandLimit, Failure> {
    let tau = match (args.tau, args.radius) {
        (Some(t), _) => t,
        (None, Some(r)) => tau_for_radius(args.p, r)?,
        (None, None) => return Err(Failure::Usage("one of --tau or --R is required".into())),
    };
    Ok(BandLimit::new(args.l, args.p, tau)?)
}

fn family(bl: BandLimit, f: &FamilyArgs) -> Result<WaveletFamily, Failure> {
    Ok(WaveletFamily::new(bl, f.lambda, f.nu, f.j0, f.j0p)?)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn write_png(path: &Path, raster: &Raster) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), raster.width as u32, raster.height as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header()?.write_image_data(&raster.to_gray8())?;
    Ok(())
}

fn existing(path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("input {} does not exist", path.display())))
    }
}

pub fn run(command: Command) -> Outcome {
    let start = Instant::now();
    let mut summary = match command {
        Command::Transform { input, output, format } => {
            existing(&input)?;
            let (bl, samples) = Flag01::read(&input)?.into_samples()?;
            let grid = BallGrid::new(bl)?;
            let coeffs = flag_forward(&samples, &grid)?;
            let residual = max_diff(&flag_inverse(&coeffs, &grid)?, &samples);
            write_coefficients(&output, &coeffs, format)?;
            json!({"command": "transform", "L": bl.l, "P": bl.p, "tau": bl.tau, "residual": residual})
        }
        Command::Inverse {
            input,
            output,
            reference,
        } => {
            existing(&input)?;
            let coeffs = read_coefficients(&input)?;
            let bl = coeffs.bandlimit();
            let samples = flag_inverse(&coeffs, &BallGrid::new(bl)?)?;
            Flag01::from_samples(bl, &samples)?.write(&output)?;
            let mut out = json!({"command": "inverse", "L": bl.l, "P": bl.p, "tau": bl.tau});
            if let Some(path) = reference {
                existing(&path)?;
                let (rbl, want) = Flag01::read(&path)?.into_samples()?;
                if rbl != bl {
                    return Err(Failure::Usage("reference samples have a different band-limit".into()));
                }
                out["residual"] = json!(max_diff(&samples, &want));
            }
            out
        }
        Command::Wavelets {
            input,
            output,
            family: fa,
        } => {
            existing(&input)?;
            let coeffs = read_coefficients(&input)?;
            let fam = family(coeffs.bandlimit(), &fa)?;
            let an = flaglet_analysis(&coeffs, &build_windows(&fam)?)?;
            write_flaglet_dir(&output, &an)?;
            let energy: f64 = coeffs.values().iter().map(|v| v.norm_sqr()).sum();
            let frame = if energy > 0.0 {
                (an.energy() / energy - 1.0).abs()
            } else {
                0.0
            };
            json!({"command": "wavelets", "J": fam.j, "Jp": fam.jp, "scales": fam.scale_count(),
                   "energy_residual": frame})
        }
        Command::Synthesize { input, output, format } => {
            existing(&input)?;
            let an = read_flaglet_dir(&input)?;
            let f = flaglet_synthesis(&an, &build_windows(&an.family)?)?;
            write_coefficients(&output, &f, format)?;
            let bl = f.bandlimit();
            json!({"command": "synthesize", "L": bl.l, "P": bl.p, "tau": bl.tau})
        }
        Command::Admissibility {
            l,
            p,
            family: fa,
            tolerance,
            output,
        } => {
            // The windows do not depend on tau.
            let fam = family(BandLimit::new(l, p, 1.0)?, &fa)?;
            let windows = build_windows(&fam)?;
            let (residual, ell, pp) = windows.admissibility_residual();
            if let Some(path) = output {
                Flag01::from_windows(&windows).write(path)?;
            }
            let out = json!({"command": "admissibility", "L": l, "P": p, "J": fam.j, "Jp": fam.jp,
                             "residual": residual, "worst_l": ell, "worst_p": pp});
            if residual >= tolerance {
                println!("{out}");
                return Err(Failure::Numerical(format!(
                    "admissibility residual {residual:e} exceeds {tolerance:e}"
                )));
            }
            out
        }
        Command::Bessel {
            input,
            output,
            kmin,
            kmax,
            nk,
        } => {
            existing(&input)?;
            let coeffs = read_coefficients(&input)?;
            let k = log_k_grid(kmin, kmax, nk)?;
            let fb = flag_to_bessel(&coeffs, &k)?;
            write_bessel(&output, &coeffs.bandlimit(), &fb)?;
            json!({"command": "bessel", "L": fb.band, "nk": k.len()})
        }
        Command::Mock {
            n,
            radius,
            seed,
            voids,
            output,
        } => {
            let cat = make_mock(n, &voids, radius, seed)?;
            let file = File::create(&output).with_context(|| format!("creating {}", output.display()))?;
            cat.write_csv(BufWriter::new(file))?;
            json!({"command": "mock", "galaxies": cat.len(), "voids": voids.len(), "seed": seed})
        }
        Command::Voids {
            input,
            band,
            family: fa,
            threshold,
            seed,
            output,
        } => {
            existing(&input)?;
            let radius = band
                .radius
                .ok_or_else(|| Failure::Usage("voids needs the catalog radius --R".into()))?;
            let bl = bandlimit(&band)?;
            let cat = Catalog::read_csv(File::open(&input).map_err(flaglet::Error::from)?, radius)?;
            let field = voxelize(&cat, &BallGrid::new(bl)?)?;
            let fam = family(bl, &fa)?;
            let candidates = find_voids(&field, &fam, threshold)?;
            let report = VoidReport {
                family: FamilySpec::of(&fam),
                threshold_sigma: threshold,
                seed,
                galaxies: cat.len(),
                dropped: field.dropped,
                candidates,
            };
            fs::write(
                &output,
                serde_json::to_string_pretty(&report).map_err(flaglet::Error::from)?,
            )
            .with_context(|| format!("writing {}", output.display()))?;
            json!({"command": "voids", "galaxies": cat.len(), "dropped": field.dropped,
                   "no_data": field.no_data, "candidates": report.candidates.len()})
        }
        Command::Render {
            input,
            l,
            p,
            tau,
            radius,
            lambda,
            nu,
            j0,
            j0p,
            j,
            jp,
            scaling,
            s,
            shell,
            meridian,
            size,
            output,
        } => {
            let (grid, map) = match input {
                Some(path) => {
                    existing(&path)?;
                    let (bl, samples) = Flag01::read(&path)?.into_samples()?;
                    (BallGrid::new(bl)?, samples.iter().map(|c| c.re).collect::<Vec<_>>())
                }
                None => {
                    let (Some(l), Some(p)) = (l, p) else {
                        return Err(Failure::Usage("render needs --input or --L and --P".into()));
                    };
                    let (Some(lambda), Some(nu), Some(j0), Some(j0p)) = (lambda, nu, j0, j0p) else {
                        return Err(Failure::Usage("render needs --lambda, --nu, --j0 and --j0p".into()));
                    };
                    let band = BandArgs { l, p, tau, radius };
                    let fa = FamilyArgs { lambda, nu, j0, j0p };
                    let bl = bandlimit(&band)?;
                    let grid = BallGrid::new(bl)?;
                    let windows = build_windows(&family(bl, &fa)?)?;
                    let map = match (scaling, j, jp) {
                        (true, None, None) => render_scaling(&windows, s, &grid)?,
                        (false, Some(j), Some(jp)) => render_flaglet(&windows, j, jp, s, &grid)?,
                        _ => return Err(Failure::Usage("give either --scaling or both --j and --jp".into())),
                    };
                    (grid, map)
                }
            };
            let raster = match (shell, meridian) {
                (Some(i), None) => shell_raster(&map, &grid, i)?,
                (None, Some(phi)) => meridian_raster(&map, &grid, phi, size)?,
                _ => return Err(Failure::Usage("give one of --shell or --meridian".into())),
            };
            write_png(&output, &raster)?;
            json!({"command": "render", "width": raster.width, "height": raster.height})
        }
    };
    summary["seconds"] = json!(start.elapsed().as_secs_f64());
    Ok(summary)
}
