//! Shared input guard for the fuzz targets. The decoders are exact and
//! allocation-bounded, but some of them recompute derived data whose cost
//! grows with the numeric parameters (residue sets walk a full character
//! period, cyclotomic orders drive polynomial divisions). The guard keeps
//! fuzz inputs inside the desk scale the library serves, so the fuzzer
//! spends its budget on parsing and validation faults rather than on
//! big-number stamina.

use serde_json::Value;

/// True when every size-driving numeric field in the document is small
/// enough to decode in microseconds.
pub fn desk_scale(value: &Value) -> bool {
    match value {
        Value::Object(map) => map.iter().all(|(key, val)| {
            let in_range = match (key.as_str(), val.as_u64()) {
                ("N", Some(n)) => n <= 512,
                ("M", Some(m)) => m <= 4096,
                ("p", Some(p)) => p <= 1000,
                ("t", Some(t)) => t <= 12,
                _ => true,
            };
            in_range && desk_scale(val)
        }),
        Value::Array(items) => items.iter().all(desk_scale),
        _ => true,
    }
}

/// Decodes a value of type T from raw fuzz bytes, applying the desk-scale
/// guard first. Returns None when the input is not even well-formed JSON
/// in range, which the fuzzer treats as an uninteresting input.
pub fn decode_in_range<T: serde::de::DeserializeOwned>(data: &[u8]) -> Option<Result<T, serde_json::Error>> {
    let text = std::str::from_utf8(data).ok()?;
    let raw: Value = serde_json::from_str(text).ok()?;
    if !desk_scale(&raw) {
        return None;
    }
    Some(serde_json::from_value(raw))
}
