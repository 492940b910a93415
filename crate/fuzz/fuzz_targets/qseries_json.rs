#![no_main]

use libfuzzer_sys::fuzz_target;
use strange_lab_fuzz::decode_in_range;

// Accepted documents must survive an encode-decode round trip as the same
// value; rejected documents must be rejected with an error, never a panic.
fuzz_target!(|data: &[u8]| {
    let Some(Ok(x)) = decode_in_range::<strange_lab::qseries::QSeries>(data) else { return };
    let encoded = serde_json::to_string(&x).expect("accepted value re-encodes");
    let y: strange_lab::qseries::QSeries = serde_json::from_str(&encoded).expect("re-encoded value decodes");
    assert_eq!(x, y);
});
