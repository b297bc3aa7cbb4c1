#![no_main]

use fibersim::protocol::{ServerMessage, Session, SessionOptions};
use libfuzzer_sys::fuzz_target;

// One websocket frame per line, one simulation tick after each frame.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let mut session = Session::new(SessionOptions::default());
    for line in text.lines().take(256) {
        let _ = session.handle_text(line);
        let _ = session.tick();
        match session.snapshot() {
            ServerMessage::State { cm, cn, t, .. } => {
                assert!(t.is_finite());
                assert!(cm.iter().chain(&cn).all(|v| v.is_finite()));
            }
            ServerMessage::Error { .. } => unreachable!(),
        }
    }
});
