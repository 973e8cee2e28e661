#![no_main]

use libfuzzer_sys::fuzz_target;
use treefactor::formats::{read_curve_csv, write_curve_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(curve) = read_curve_csv(data) else { return };
    let mut out = Vec::new();
    write_curve_csv(&mut out, &curve).unwrap();
    assert_eq!(read_curve_csv(out.as_slice()).unwrap(), curve);
});
