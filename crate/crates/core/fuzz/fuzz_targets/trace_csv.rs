#![no_main]
use libfuzzer_sys::fuzz_target;
use twogate::experiment::{parse_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(rows) = parse_csv(text) else {
        return;
    };
    // NaN never compares equal; only check finite traces
    if rows.iter().any(|r| !r.cost.is_finite() || !r.relative_error.is_finite()) {
        return;
    }
    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    let again = parse_csv(std::str::from_utf8(&out).unwrap()).expect("written csv parses");
    assert_eq!(rows, again);
});
