#![no_main]

use flaglet::format::Flag01;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = Flag01::decode(data) {
        // anything accepted must re-encode to the same bytes
        assert_eq!(f.encode(), data);
        let _ = f.clone().into_coefficients();
        let _ = f.into_samples();
    }
});
