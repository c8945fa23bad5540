#![no_main]

use flaglet::flag_transform::{BandLimit, FlagCoefficients};
use flaglet::format::{read_flaglet_dir, Flag01, MANIFEST};
use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;
use tempfile::TempDir;

// A directory holding a few valid coefficient files the manifest may name.
fn dir() -> &'static TempDir {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        let bl = BandLimit::new(4, 4, 1.0).unwrap();
        let f = Flag01::from_coefficients(&FlagCoefficients::zeros(bl));
        for name in [
            "scaling.flag",
            "wav_1_1.flag",
            "wav_1_2.flag",
            "wav_2_1.flag",
            "wav_2_2.flag",
        ] {
            f.write(d.path().join(name)).unwrap();
        }
        d
    })
}

fuzz_target!(|data: &[u8]| {
    let d = dir();
    std::fs::write(d.path().join(MANIFEST), data).unwrap();
    let _ = read_flaglet_dir(d.path());
});
