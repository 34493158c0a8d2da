//! Ed25519-backed decentralized identifiers (`did:sbomx:…`).
//!
//! An identifier is derived from the public key alone: the method-specific id
//! is the first 20 bytes of `SHA-256(public key)` in lowercase hex, so a DID
//! can be checked against the key that registered it without any directory
//! lookup. DID documents are tiny — one active key, an optional service
//! endpoint, a monotonically increasing version, and an active/deactivated
//! status. Key rotation and deactivation do not touch the registry directly;
//! they produce typed payloads that are signed and submitted as ledger
//! transactions, where the registry enforces version continuity.

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::digest::{decode_strict_hex, sha256};

/// DID method name; `did:sbomx:<40 hex chars>`.
pub const DID_METHOD: &str = "sbomx";

/// Errors from identity operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    /// The operation was signed (or attempted) with a key that is not the
    /// document's current key.
    #[error("signer is not the document's current key")]
    BadSignature,
    /// The document is deactivated and can no longer be changed.
    #[error("DID document is deactivated")]
    Deactivated,
    /// Deactivation was requested twice.
    #[error("DID document is already deactivated")]
    AlreadyDeactivated,
    /// A DID string did not parse.
    #[error("malformed DID: {0}")]
    MalformedDid(String),
}

/// A decentralized identifier. Stored as the 40-hex-char method-specific id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Did {
    id: String,
}

impl Did {
    /// Derive the DID owned by `public_key`.
    pub fn from_public_key(public_key: &[u8; 32]) -> Did {
        let digest = sha256(public_key);
        Did {
            id: hex::encode(&digest.as_bytes()[..20]),
        }
    }

    /// Parse a rendered `did:sbomx:…` string.
    pub fn parse(s: &str) -> Result<Did, IdentityError> {
        let id = s
            .strip_prefix("did:")
            .and_then(|rest| rest.strip_prefix(DID_METHOD))
            .and_then(|rest| rest.strip_prefix(':'))
            .ok_or_else(|| IdentityError::MalformedDid(s.to_string()))?;
        if decode_strict_hex(id, 20).is_err() {
            return Err(IdentityError::MalformedDid(s.to_string()));
        }
        Ok(Did { id: id.to_string() })
    }

    /// The method-specific id (40 lowercase hex chars).
    pub fn method_id(&self) -> &str {
        &self.id
    }

    /// The full `did:sbomx:…` form.
    pub fn rendered(&self) -> String {
        format!("did:{}:{}", DID_METHOD, self.id)
    }
}

impl std::fmt::Display for Did {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "did:{}:{}", DID_METHOD, self.id)
    }
}

impl Serialize for Did {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.rendered())
    }
}

impl<'de> Deserialize<'de> for Did {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Did::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Strict-hex serde for 32-byte public keys.
pub mod hex_key {
    use super::*;

    pub fn serialize<S: Serializer>(key: &[u8; 32], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(key))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = decode_strict_hex(&s, 32).map_err(serde::de::Error::custom)?;
        let mut out = [0u8; 32];
        out.copy_from_slice(&bytes);
        Ok(out)
    }
}

/// A 64-byte Ed25519 signature with strict-hex serde.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureBytes(pub [u8; 64]);

impl Serialize for SignatureBytes {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for SignatureBytes {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = decode_strict_hex(&s, 64).map_err(serde::de::Error::custom)?;
        let mut out = [0u8; 64];
        out.copy_from_slice(&bytes);
        Ok(SignatureBytes(out))
    }
}

/// An Ed25519 keypair held by one participant.
#[derive(Clone)]
pub struct KeyPair {
    signing: SigningKey,
}

impl KeyPair {
    /// Deterministically derive a keypair from a 32-byte seed.
    pub fn from_seed(seed: &[u8; 32]) -> KeyPair {
        KeyPair {
            signing: SigningKey::from_bytes(seed),
        }
    }

    pub fn public_key(&self) -> [u8; 32] {
        self.signing.verifying_key().to_bytes()
    }

    /// The DID this keypair controls.
    pub fn did(&self) -> Did {
        Did::from_public_key(&self.public_key())
    }

    /// Sign arbitrary bytes.
    pub fn sign(&self, message: &[u8]) -> SignatureBytes {
        SignatureBytes(self.signing.sign(message).to_bytes())
    }
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KeyPair({})", self.did())
    }
}

/// Verify an Ed25519 signature. Uses `verify_strict` to reject the malleable
/// edge cases ordinary verification tolerates.
pub fn verify_signature(public_key: &[u8; 32], message: &[u8], signature: &SignatureBytes) -> bool {
    let Ok(key) = VerifyingKey::from_bytes(public_key) else {
        return false;
    };
    key.verify_strict(message, &Signature::from_bytes(&signature.0))
        .is_ok()
}

/// Lifecycle status of a DID document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DidStatus {
    Active,
    Deactivated,
}

/// The registry-resident document describing one DID.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DidDocument {
    pub id: Did,
    #[serde(rename = "publicKeyHex", with = "hex_key")]
    pub public_key: [u8; 32],
    #[serde(rename = "serviceEndpoint")]
    pub service_endpoint: Option<String>,
    pub version: u64,
    pub status: DidStatus,
}

impl DidDocument {
    pub fn is_active(&self) -> bool {
        self.status == DidStatus::Active
    }
}

/// Create a fresh identity from a seed: the keypair, its DID, and the
/// version-1 document to register.
pub fn create_identity(
    seed: &[u8; 32],
    service_endpoint: Option<String>,
) -> (KeyPair, Did, DidDocument) {
    let keypair = KeyPair::from_seed(seed);
    let did = keypair.did();
    let document = DidDocument {
        id: did.clone(),
        public_key: keypair.public_key(),
        service_endpoint,
        version: 1,
        status: DidStatus::Active,
    };
    (keypair, did, document)
}

/// Payload of a `did_update` transaction: replace the document's key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DidUpdatePayload {
    pub did: Did,
    #[serde(rename = "newPublicKeyHex", with = "hex_key")]
    pub new_public_key: [u8; 32],
    /// Version the update applies to; the registry rejects stale updates.
    pub from_version: u64,
}

/// Payload of a `did_deactivate` transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DidDeactivatePayload {
    pub did: Did,
    pub from_version: u64,
}

/// Prepare a key-rotation payload. `signed_by` must hold the document's
/// current key, and the document must still be active; the payload is then
/// signed and submitted as a `did_update` transaction.
pub fn rotate_key(
    document: &DidDocument,
    new_public_key: [u8; 32],
    signed_by: &KeyPair,
) -> Result<DidUpdatePayload, IdentityError> {
    if !document.is_active() {
        return Err(IdentityError::Deactivated);
    }
    if signed_by.public_key() != document.public_key {
        return Err(IdentityError::BadSignature);
    }
    Ok(DidUpdatePayload {
        did: document.id.clone(),
        new_public_key,
        from_version: document.version,
    })
}

/// Prepare a deactivation payload; terminal once applied.
pub fn deactivate_did(
    document: &DidDocument,
    signed_by: &KeyPair,
) -> Result<DidDeactivatePayload, IdentityError> {
    if !document.is_active() {
        return Err(IdentityError::AlreadyDeactivated);
    }
    if signed_by.public_key() != document.public_key {
        return Err(IdentityError::BadSignature);
    }
    Ok(DidDeactivatePayload {
        did: document.id.clone(),
        from_version: document.version,
    })
}
