//! Canonical JSON serialization.
//!
//! Everything that gets hashed or signed — credential bodies, ledger state,
//! block headers, transaction payloads — is serialized through
//! [`to_canonical_bytes`] so that independently produced bytes are identical:
//!
//! * object keys sorted by their UTF-8 bytes,
//! * no insignificant whitespace,
//! * strings escaped exactly as `serde_json` escapes them,
//! * numbers in shortest round-trip decimal form (integers stay integral),
//! * UTF-8 output.
//!
//! The writer deliberately does not rely on `serde_json`'s map ordering: that
//! ordering flips from sorted to insertion-order if any crate in the build
//! graph enables the `preserve_order` feature, which would silently change
//! every digest in the system. Sorting here keeps the byte layout pinned.

use serde::Serialize;
use serde_json::Value;

/// Serialize `value` to canonical JSON bytes.
pub fn to_canonical_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let tree = serde_json::to_value(value)?;
    let mut out = Vec::with_capacity(256);
    write_value(&tree, &mut out);
    Ok(out)
}

/// Canonical JSON as a `String` (the output is always valid UTF-8).
pub fn to_canonical_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let bytes = to_canonical_bytes(value)?;
    Ok(String::from_utf8(bytes).expect("canonical JSON is UTF-8"))
}

fn write_value(value: &Value, out: &mut Vec<u8>) {
    match value {
        Value::Null => out.extend_from_slice(b"null"),
        Value::Bool(true) => out.extend_from_slice(b"true"),
        Value::Bool(false) => out.extend_from_slice(b"false"),
        // serde_json renders integers via itoa and floats via ryu, which is
        // the shortest representation that round-trips.
        Value::Number(n) => out.extend_from_slice(n.to_string().as_bytes()),
        Value::String(s) => {
            let escaped = serde_json::to_string(s).expect("string serialization");
            out.extend_from_slice(escaped.as_bytes());
        }
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(item, out);
            }
            out.push(b']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push(b'{');
            for (i, (key, val)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                let escaped = serde_json::to_string(key).expect("key serialization");
                out.extend_from_slice(escaped.as_bytes());
                out.push(b':');
                write_value(val, out);
            }
            out.push(b'}');
        }
    }
}
