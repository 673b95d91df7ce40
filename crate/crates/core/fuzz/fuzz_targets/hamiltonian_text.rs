#![no_main]
use libfuzzer_sys::fuzz_target;
use twogate::pauli::{format_hamiltonian, parse_hamiltonian};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // whatever parses must survive a format/parse round trip unchanged
    if let Ok(obs) = parse_hamiltonian(text) {
        let again = parse_hamiltonian(&format_hamiltonian(&obs)).expect("formatted output parses");
        assert_eq!(obs, again);
    }
});
