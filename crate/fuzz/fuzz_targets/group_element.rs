#![no_main]
use libfuzzer_sys::fuzz_target;
use orbitkit::groups::{FiniteGroup, GroupDescriptor};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let groups = [
        GroupDescriptor::free(["a", "b"]).unwrap(),
        GroupDescriptor::Integers,
        GroupDescriptor::Finite(FiniteGroup::cyclic(4)),
    ];
    for g in &groups {
        if let Ok(x) = g.parse_element(s) {
            let text = g.format_element(&x);
            assert_eq!(g.parse_element(&text).unwrap(), x, "{text}");
        }
    }
});
