#![no_main]

use affine_body_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        let again = serde_json::to_string(&cfg).expect("serializable");
        let back = RunConfig::from_json(&again).expect("re-parses");
        assert_eq!(serde_json::to_string(&back).unwrap(), again);
    }
});
