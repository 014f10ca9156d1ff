#![no_main]
use libfuzzer_sys::fuzz_target;
use orbitkit::shift::instances::{loop_graph, sink_graph, two_shift};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for g in [loop_graph(), two_shift(), sink_graph()] {
        if let Ok(p) = g.parse_path(s) {
            assert_eq!(g.parse_path(&g.format_path(&p)).unwrap(), p);
        }
        if let Ok(c) = g.parse_cylinder(s) {
            assert_eq!(g.parse_cylinder(&g.format_cylinder(&c)).unwrap(), c);
        }
    }
});
