#![no_main]

use affine_body::io::SpectrumReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = SpectrumReport::from_json(text) {
        let back = SpectrumReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }
});
