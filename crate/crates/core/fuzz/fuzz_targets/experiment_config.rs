#![no_main]
use libfuzzer_sys::fuzz_target;
use twogate::experiment::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(cfg) = serde_json::from_slice::<ExperimentConfig>(data) else {
        return;
    };
    let _ = cfg.validate();
    let text = serde_json::to_string(&cfg).unwrap();
    let again: ExperimentConfig = serde_json::from_str(&text).expect("serialized config parses");
    assert_eq!(cfg, again);
});
