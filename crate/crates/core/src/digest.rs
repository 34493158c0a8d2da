//! SHA-256 digests as a small value type.
//!
//! Digests travel through JSON a lot (proofs, credentials, ledger blocks), so
//! the serde representation is fixed to lowercase hex and the deserializer is
//! strict about it: uppercase or odd-length input is rejected rather than
//! normalised. That strictness matters for proof verification, where two
//! different byte strings must never decode to the same digest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A SHA-256 output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest256(pub [u8; 32]);

/// Error produced when parsing a [`Digest256`] from hex.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigestParseError {
    #[error("digest must be 64 hex characters, got {0}")]
    BadLength(usize),
    #[error("digest must be lowercase hex")]
    BadCharacter,
}

impl Digest256 {
    /// The all-zero digest, used as the previous-hash link of a genesis block.
    pub const ZERO: Digest256 = Digest256([0u8; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

/// SHA-256 over `data`.
pub fn sha256(data: &[u8]) -> Digest256 {
    let mut hasher = Sha256::new();
    hasher.update(data);
    Digest256(hasher.finalize().into())
}

/// SHA-256 over the concatenation of `parts`, without any separator.
pub fn sha256_parts(parts: &[&[u8]]) -> Digest256 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    Digest256(hasher.finalize().into())
}

/// Decode a lowercase-hex string of known length. Shared by every field that
/// carries fixed-size binary (salts, signatures, public keys): proofs must not
/// have two textual spellings of the same bytes.
pub fn decode_strict_hex(s: &str, expected_len: usize) -> Result<Vec<u8>, DigestParseError> {
    if s.len() != expected_len * 2 {
        return Err(DigestParseError::BadLength(s.len()));
    }
    if !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(DigestParseError::BadCharacter);
    }
    Ok(hex::decode(s).expect("validated hex"))
}

impl FromStr for Digest256 {
    type Err = DigestParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = decode_strict_hex(s, 32)?;
        let mut out = [0u8; 32];
        out.copy_from_slice(&bytes);
        Ok(Digest256(out))
    }
}

impl fmt::Display for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest256({})", self.to_hex())
    }
}

impl Serialize for Digest256 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest256 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
