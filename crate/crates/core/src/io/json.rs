//! Versioned JSON envelopes.

use serde::Serialize;

use crate::error::Result;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format: u32,
    kind: &'a str,
    data: &'a T,
}

/// Pretty-printed `{"format": 1, "kind": ..., "data": ...}` document.
pub fn to_json<T: Serialize>(kind: &str, data: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        format: FORMAT_VERSION,
        kind,
        data,
    })?;
    s.push('\n');
    Ok(s)
}
