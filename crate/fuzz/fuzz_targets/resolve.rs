#![no_main]
use libfuzzer_sys::fuzz_target;
use orbitkit::format::parse_instance;
use orbitkit::model::resolve;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(inst) = parse_instance(s) {
            let _ = resolve(&inst);
        }
    }
});
