#![no_main]

use fibersim::report::AnalysisReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(report) = AnalysisReport::from_json(text) {
            assert_eq!(AnalysisReport::from_json(&report.to_json()).unwrap(), report);
        }
    }
});
