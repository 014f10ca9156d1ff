#![no_main]
use libfuzzer_sys::fuzz_target;
use orbitkit::format::{parse_instance, to_text};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(inst) = parse_instance(s) {
            let printed = to_text(&inst);
            let again = parse_instance(&printed).expect("printed instance reparses");
            assert_eq!(again, inst);
            assert_eq!(to_text(&again), printed);
        }
    }
});
