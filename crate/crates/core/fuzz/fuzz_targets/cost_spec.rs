#![no_main]
use libfuzzer_sys::fuzz_target;
use twogate::experiment::CostSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(spec) = s.parse::<CostSpec>() {
            let again: CostSpec = spec.to_string().parse().expect("display output parses");
            assert_eq!(spec, again);
        }
    }
});
