#![no_main]

use libfuzzer_sys::fuzz_target;
use serde::Deserialize;
use strange_lab::strange::XiTable;
use strange_lab_fuzz::desk_scale;

/// Mirror of the on-disk cache entry: a schema tag wrapping a table
/// document, decoded in two stages exactly like the cache reader.
#[derive(Deserialize)]
struct Envelope {
    #[allow(dead_code)]
    schema: String,
    table: serde_json::Value,
}

// Stage one parses the envelope, stage two decodes the inner table from
// the parsed tree. Neither stage may panic, and an accepted table must
// survive an encode-decode round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(envelope) = serde_json::from_slice::<Envelope>(data) else { return };
    if !desk_scale(&envelope.table) {
        return;
    }
    let Ok(table) = serde_json::from_value::<XiTable>(envelope.table) else { return };
    let encoded = serde_json::to_string(&table).expect("accepted table re-encodes");
    let again: XiTable = serde_json::from_str(&encoded).expect("re-encoded table decodes");
    assert_eq!(table, again);
});
