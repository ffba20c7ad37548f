#![no_main]

//! Input: the JSON header, a NUL byte, then the binary payload.

use libfuzzer_sys::fuzz_target;
use vacfield::fields::{decode_snapshot, encode_snapshot};

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let Ok(header) = std::str::from_utf8(&data[..split]) else { return };
    if let Ok(state) = decode_snapshot(header, &data[split + 1..]) {
        let (h, bin) = encode_snapshot(&state);
        let back = decode_snapshot(&h, &bin).expect("an encoded snapshot decodes");
        // bytes, not values: the payload may hold NaN
        assert_eq!(encode_snapshot(&back), (h, bin));
    }
});
