#![no_main]

use libfuzzer_sys::fuzz_target;
use treefactor::formats::{read_graph_json, write_graph_json};

fuzz_target!(|data: &[u8]| {
    let Ok(map) = read_graph_json(data) else { return };
    let mut out = Vec::new();
    write_graph_json(&mut out, &map).unwrap();
    let back = read_graph_json(out.as_slice()).unwrap();
    assert_eq!(back.ids(), map.ids());
    assert_eq!(back.edges(), map.edges());
    // Small graphs also go through the quotient construction.
    if map.len() <= 64 {
        let _ = treefactor::build_quotient_tree(&map, 0.0);
    }
});
