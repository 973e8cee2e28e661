#![no_main]

use libfuzzer_sys::fuzz_target;
use treefactor::formats::{read_winding_csv, write_winding_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(field) = read_winding_csv(data, [0.0, 0.0], 0.5) else { return };
    let mut out = Vec::new();
    write_winding_csv(&mut out, &field).unwrap();
    let back = read_winding_csv(out.as_slice(), [0.0, 0.0], 0.5).unwrap();
    assert_eq!(back.ncols, field.ncols);
    assert_eq!(back.nrows, field.nrows);
    let _ = treefactor::winding_moments(&back);
});
