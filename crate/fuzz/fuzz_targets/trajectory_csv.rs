#![no_main]

use fibersim::trajectory::Trajectory;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(traj) = Trajectory::parse(text) {
        let again = Trajectory::parse(&traj.to_csv_string().unwrap()).unwrap();
        assert_eq!(again, traj);
    }
});
