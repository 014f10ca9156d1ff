#![no_main]
use libfuzzer_sys::fuzz_target;
use orbitkit::booldyn::FiniteBooleanAlgebra;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let algebra = FiniteBooleanAlgebra::new(["u", "v", "w"]).unwrap();
    if let Ok(a) = algebra.parse_set(s) {
        assert!(algebra.contains(a));
        assert_eq!(algebra.parse_set(&algebra.format_set(a)).unwrap(), a);
    }
});
