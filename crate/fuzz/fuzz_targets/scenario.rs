#![no_main]

use fibersim::scenario::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = Scenario::from_json(text) {
        // a validated scenario must re-encode to itself
        assert_eq!(Scenario::from_json(&scenario.to_json()).unwrap(), scenario);
        let _ = scenario.obstacle_curve();
    }
});
