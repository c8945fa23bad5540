#![no_main]

use flaglet::voidfinder::Catalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cat) = Catalog::read_csv(data, 1.0) {
        let mut out = Vec::new();
        cat.write_csv(&mut out).unwrap();
        assert_eq!(Catalog::read_csv(out.as_slice(), 1.0).unwrap(), cat);
    }
});
