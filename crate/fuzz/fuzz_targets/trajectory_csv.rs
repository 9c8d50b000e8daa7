#![no_main]

use affine_body::io::trajectory_from_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = trajectory_from_csv(text) {
        assert_eq!(table.times.len(), table.states.len());
        assert!(table.states.iter().all(|s| s.dim() == table.n));
    }
});
