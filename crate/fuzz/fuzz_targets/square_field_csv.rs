#![no_main]

use libfuzzer_sys::fuzz_target;
use treefactor::formats::{read_square_field_csv, write_square_field_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(field) = read_square_field_csv(data) else { return };
    let mut out = Vec::new();
    write_square_field_csv(&mut out, &field).unwrap();
    let back = read_square_field_csv(out.as_slice()).unwrap();
    assert_eq!(back.depth(), field.depth());
    assert_eq!(back.phi1(), field.phi1());
    assert_eq!(back.phi2(), field.phi2());
});
