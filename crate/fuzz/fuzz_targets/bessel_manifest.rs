#![no_main]

use flaglet::format::{read_bessel, Flag01, PayloadKind};
use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;
use std::sync::OnceLock;
use tempfile::TempDir;

fn dir() -> &'static TempDir {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        Flag01 {
            band: 2,
            size: 3,
            tau: 1.0,
            kind: PayloadKind::Bessel,
            data: vec![Complex64::new(1.0, 0.5); 4 * 5],
        }
        .write(d.path().join("fb.flag"))
        .unwrap();
        d
    })
}

fuzz_target!(|data: &[u8]| {
    let path = dir().path().join("fb.json");
    std::fs::write(&path, data).unwrap();
    let _ = read_bessel(&path);
});
