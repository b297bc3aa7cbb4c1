#![no_main]

use fibersim::protocol::ClientMessage;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(msg) = ClientMessage::parse(text) {
        let encoded = serde_json::to_string(&msg).unwrap();
        assert_eq!(ClientMessage::parse(&encoded).unwrap(), msg);
    }
});
