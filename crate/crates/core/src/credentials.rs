//! Verifiable credentials for SBOM exchange.
//!
//! Three credential kinds exist. An *eligibility* credential is issued by the
//! oversight authority and qualifies a vendor to publish SBOM credentials. A
//! *component SBOM* credential covers one component's SBOM; a *system SBOM*
//! credential aggregates the component credentials of a whole product. SBOM
//! credentials never carry composition details — only the SBOM digest, the
//! Merkle roots and coarse metadata — so publishing one discloses nothing.
//!
//! Credentials link to one another through [`EmbeddedRef`]s, each pinning the
//! referenced credential's digest. Walking those links from a system
//! credential down to the upstream vendors' eligibility credentials is what
//! [`verify_trust_chain`] does, verifying each node against the ledger
//! registries on the way.
//!
//! The envelope is a fixed-schema JSON object (no JSON-LD): signatures are
//! computed over the canonical serialization of the credential without its
//! `proof` field, so any two implementations that agree on the canonical form
//! agree on the bytes being signed.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::to_canonical_bytes;
use crate::digest::{sha256, Digest256};
use crate::identity::{verify_signature, Did, DidStatus, KeyPair, SignatureBytes};
use crate::ledger::{
    EligRegisterPayload, LedgerState, SbomRegisterPayload, Transaction, TxKind, VcRegistry,
    VcRevokePayload, VcStatus,
};

/// Errors surfaced by the issuance / revocation / chain-walk operations.
/// Verification itself never errors: [`verify_vc`] reports failures inside
/// the returned [`VerificationOutcome`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CredentialError {
    #[error("issuer is not the oversight authority")]
    NotAuthority,
    #[error("vendor DID is not registered and active")]
    UnknownVendor,
    #[error("issuer holds no active, unexpired eligibility")]
    NotEligible,
    #[error("operation does not apply to this credential kind")]
    WrongKind,
    #[error("a system SBOM credential must embed its component credentials")]
    MissingComponents,
    #[error("embedded digest for {0} does not match the registered credential")]
    BadEmbeddedDigest(String),
    #[error("invalid embedded references: {0}")]
    InvalidEmbeddedRefs(&'static str),
    #[error("no credential registered under id {0}")]
    UnknownVc(String),
    #[error("caller may not revoke this credential")]
    NotAuthorized,
    #[error("credential is already revoked")]
    AlreadyRevoked,
    #[error("caller did not issue the credential being updated")]
    NotIssuer,
    #[error("expiry must be strictly after issuance")]
    InvalidExpiry,
    #[error("trust chain deeper than the allowed maximum")]
    DepthExceeded,
    #[error("referenced credential {0} could not be resolved")]
    DanglingRef(String),
}

/// The three credential kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VcKind {
    Eligibility,
    ComponentSbom,
    SystemSbom,
}

impl VcKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VcKind::Eligibility => "eligibility",
            VcKind::ComponentSbom => "component_sbom",
            VcKind::SystemSbom => "system_sbom",
        }
    }

    pub fn is_sbom(&self) -> bool {
        matches!(self, VcKind::ComponentSbom | VcKind::SystemSbom)
    }
}

/// A cryptographic link to another credential: the id it is registered under
/// plus the digest of its full serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EmbeddedRef {
    pub vc_id: String,
    pub vc_digest: Digest256,
}

/// Claims of an eligibility credential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EligibilityClaims {
    pub vendor_did: Did,
    /// Tags of the assessment criteria the vendor satisfied.
    pub criteria: Vec<String>,
    /// RFC 3339 UTC instant after which the eligibility lapses.
    pub valid_until: String,
}

/// Coarse descriptive metadata carried by an SBOM credential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SbomMetadata {
    pub supplier: String,
    pub product_name: String,
    pub product_version: String,
    pub author_did: Did,
    /// RFC 3339 creation instant copied from the SBOM itself.
    pub created: String,
}

/// Claims of a component or system SBOM credential. Deliberately excludes
/// attribute paths and values: consumers get those through disclosure proofs,
/// never through the credential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SbomClaims {
    /// SHA-256 of the raw SBOM document bytes.
    pub sbom_digest: Digest256,
    /// Root of the salted attribute Merkle tree.
    pub attribute_root: Digest256,
    /// Root of the component index tree used for presence/absence proofs.
    pub index_root: Digest256,
    pub metadata: SbomMetadata,
    /// Where the full SBOM document lives off-chain.
    pub storage_uri: String,
}

/// Kind-specific claim set. The two shapes have disjoint key sets, so the
/// untagged representation round-trips unambiguously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VcClaims {
    Eligibility(EligibilityClaims),
    Sbom(SbomClaims),
}

/// Proof block: which registered key signed, and the signature itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VcProof {
    /// `<issuer DID>#keys-<document version>` — pins the exact key the
    /// signature was made under, so verification survives later rotations.
    pub verification_method: String,
    #[serde(rename = "signatureHex")]
    pub signature: SignatureBytes,
}

/// The credential envelope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VerifiableCredential {
    /// Deterministic URN derived from the credential content.
    pub id: String,
    #[serde(rename = "kind")]
    pub vc_kind: VcKind,
    pub issuer: Did,
    pub subject: Did,
    /// RFC 3339 UTC issuance instant.
    pub issuance_date: String,
    pub claims: VcClaims,
    pub embedded_refs: Vec<EmbeddedRef>,
    pub proof: VcProof,
}

/// Render a unix timestamp as an RFC 3339 UTC string with second precision.
pub fn rfc3339_utc(secs: u64) -> String {
    chrono::DateTime::<chrono::Utc>::from_timestamp(secs as i64, 0)
        .expect("timestamp within the representable range")
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Parse an RFC 3339 instant back to unix seconds. Pre-epoch instants and
/// unparseable strings return `None`.
pub fn parse_rfc3339_utc(s: &str) -> Option<u64> {
    let parsed = chrono::DateTime::parse_from_rfc3339(s).ok()?;
    u64::try_from(parsed.timestamp()).ok()
}

/// The canonical byte form a credential signature covers: the full envelope
/// minus the `proof` field, serialized with sorted keys and no insignificant
/// whitespace.
pub fn canonical_vc_bytes(vc: &VerifiableCredential) -> Vec<u8> {
    let mut value = serde_json::to_value(vc).expect("credential serializes");
    value
        .as_object_mut()
        .expect("credential serializes to an object")
        .remove("proof");
    to_canonical_bytes(&value).expect("canonical form serializes")
}

/// Digest of the complete credential, proof included. This is the value the
/// ledger registries pin, binding revocation status to the exact signed
/// artifact.
pub fn vc_digest(vc: &VerifiableCredential) -> Digest256 {
    sha256(&to_canonical_bytes(vc).expect("credential serializes"))
}

fn placeholder_proof() -> VcProof {
    VcProof {
        verification_method: String::new(),
        signature: SignatureBytes([0; 64]),
    }
}

/// Assemble, address and sign a credential. The id is the digest of the
/// unsigned envelope (with an empty id slot), so identical content always
/// yields the identical id.
#[allow(clippy::too_many_arguments)]
fn assemble_and_sign(
    signer: &KeyPair,
    issuer: &Did,
    key_version: u64,
    vc_kind: VcKind,
    subject: Did,
    issued_at_secs: u64,
    claims: VcClaims,
    embedded_refs: Vec<EmbeddedRef>,
) -> VerifiableCredential {
    let mut vc = VerifiableCredential {
        id: String::new(),
        vc_kind,
        issuer: issuer.clone(),
        subject,
        issuance_date: rfc3339_utc(issued_at_secs),
        claims,
        embedded_refs,
        proof: placeholder_proof(),
    };
    let pre_id = sha256(&canonical_vc_bytes(&vc));
    vc.id = format!(
        "urn:sbomx:vc:{}:{}",
        vc_kind.as_str(),
        &hex::encode(pre_id.0)[..16]
    );
    let signature = signer.sign(&canonical_vc_bytes(&vc));
    vc.proof = VcProof {
        verification_method: format!("{}#keys-{}", issuer.rendered(), key_version),
        signature,
    };
    vc
}

/// Issue an eligibility credential to a vendor, returning the signed
/// credential and the ledger transaction that registers it.
///
/// Only the genesis oversight authority may issue; the vendor must be a
/// registered, active DID; and `valid_until_secs` must lie strictly after
/// `issued_at_secs`.
pub fn issue_eligibility_vc(
    authority: &KeyPair,
    authority_did: &Did,
    vendor: &Did,
    criteria: Vec<String>,
    valid_until_secs: u64,
    issued_at_secs: u64,
    state: &LedgerState,
) -> Result<(VerifiableCredential, Transaction), CredentialError> {
    if *authority_did != state.oversight {
        return Err(CredentialError::NotAuthority);
    }
    let authority_doc = state
        .current_did_document(authority_did)
        .ok_or(CredentialError::NotAuthority)?;
    let vendor_doc = state
        .current_did_document(vendor)
        .ok_or(CredentialError::UnknownVendor)?;
    if vendor_doc.status != DidStatus::Active {
        return Err(CredentialError::UnknownVendor);
    }
    if valid_until_secs <= issued_at_secs {
        return Err(CredentialError::InvalidExpiry);
    }
    let claims = VcClaims::Eligibility(EligibilityClaims {
        vendor_did: vendor.clone(),
        criteria,
        valid_until: rfc3339_utc(valid_until_secs),
    });
    let vc = assemble_and_sign(
        authority,
        authority_did,
        authority_doc.version,
        VcKind::Eligibility,
        vendor.clone(),
        issued_at_secs,
        claims,
        Vec::new(),
    );
    let payload = EligRegisterPayload {
        vc_id: vc.id.clone(),
        vc_digest: vc_digest(&vc),
        subject: vendor.clone(),
        valid_until_secs,
    };
    let tx = Transaction::signed(
        authority,
        authority_did.clone(),
        TxKind::EligRegister,
        &payload,
    );
    Ok((vc, tx))
}

/// True when the vendor holds at least one active eligibility that has not
/// lapsed at `now_secs`.
fn has_live_eligibility(state: &LedgerState, vendor: &Did, now_secs: u64) -> bool {
    state
        .active_eligibilities_for(vendor)
        .iter()
        .any(|(_, record)| record.valid_until_secs >= now_secs)
}

/// Validate the embedded-reference shape for an SBOM credential and check
/// each reference's digest against the corresponding registry row.
fn check_embedded_refs(
    vendor: &Did,
    kind: VcKind,
    refs: &[EmbeddedRef],
    state: &LedgerState,
) -> Result<(), CredentialError> {
    let mut eligibility_refs = 0usize;
    let mut sbom_refs = 0usize;
    for r in refs {
        if let Some(record) = state.elig_registry.get(&r.vc_id) {
            if record.vc_digest != r.vc_digest {
                return Err(CredentialError::BadEmbeddedDigest(r.vc_id.clone()));
            }
            if record.subject != *vendor {
                return Err(CredentialError::InvalidEmbeddedRefs(
                    "embedded eligibility belongs to another vendor",
                ));
            }
            eligibility_refs += 1;
        } else if let Some(record) = state.sbom_registry.get(&r.vc_id) {
            if record.vc_digest != r.vc_digest {
                return Err(CredentialError::BadEmbeddedDigest(r.vc_id.clone()));
            }
            sbom_refs += 1;
        } else {
            return Err(CredentialError::UnknownVc(r.vc_id.clone()));
        }
    }
    match kind {
        VcKind::ComponentSbom => {
            // Allowed shapes: one eligibility ref (proprietary / modified
            // component), only upstream SBOM refs (unmodified third-party),
            // or nothing at all (declared-unverified).
            if eligibility_refs > 1 || (eligibility_refs == 1 && sbom_refs > 0) {
                return Err(CredentialError::InvalidEmbeddedRefs(
                    "a component credential embeds one eligibility or upstream SBOM credentials",
                ));
            }
        }
        VcKind::SystemSbom => {
            if sbom_refs == 0 {
                return Err(CredentialError::MissingComponents);
            }
            if eligibility_refs > 0 {
                return Err(CredentialError::InvalidEmbeddedRefs(
                    "a system credential embeds component credentials only",
                ));
            }
        }
        VcKind::Eligibility => unreachable!("checked by the caller"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn issue_sbom_inner(
    vendor: &KeyPair,
    vendor_did: &Did,
    kind: VcKind,
    claims: SbomClaims,
    embedded_refs: Vec<EmbeddedRef>,
    supersedes: Option<String>,
    issued_at_secs: u64,
    state: &LedgerState,
) -> Result<(VerifiableCredential, Transaction), CredentialError> {
    if !kind.is_sbom() {
        return Err(CredentialError::WrongKind);
    }
    if !has_live_eligibility(state, vendor_did, issued_at_secs) {
        return Err(CredentialError::NotEligible);
    }
    check_embedded_refs(vendor_did, kind, &embedded_refs, state)?;
    let vc = assemble_and_sign(
        vendor,
        vendor_did,
        state
            .current_did_document(vendor_did)
            .ok_or(CredentialError::UnknownVendor)?
            .version,
        kind,
        vendor_did.clone(),
        issued_at_secs,
        VcClaims::Sbom(claims),
        embedded_refs,
    );
    let tx_kind = if supersedes.is_some() {
        TxKind::SbomUpdate
    } else {
        TxKind::SbomRegister
    };
    let payload = SbomRegisterPayload {
        vc_id: vc.id.clone(),
        vc_digest: vc_digest(&vc),
        supersedes,
    };
    let tx = Transaction::signed(vendor, vendor_did.clone(), tx_kind, &payload);
    Ok((vc, tx))
}

/// Issue a component or system SBOM credential, returning the signed
/// credential and the registering transaction.
///
/// The vendor must hold a live eligibility. `embedded_refs` must match the
/// shape the kind allows and every reference must resolve to a registered
/// credential with the stated digest.
#[allow(clippy::too_many_arguments)]
pub fn issue_sbom_vc(
    vendor: &KeyPair,
    vendor_did: &Did,
    kind: VcKind,
    claims: SbomClaims,
    embedded_refs: Vec<EmbeddedRef>,
    issued_at_secs: u64,
    state: &LedgerState,
) -> Result<(VerifiableCredential, Transaction), CredentialError> {
    issue_sbom_inner(
        vendor,
        vendor_did,
        kind,
        claims,
        embedded_refs,
        None,
        issued_at_secs,
        state,
    )
}

/// Replace an SBOM credential after a product update. The new credential
/// records `supersedes = old_vc_id`; when `retain_old` is false a revocation
/// of the old credential is returned alongside the registration, otherwise
/// the old credential stays active for versioning.
#[allow(clippy::too_many_arguments)]
pub fn update_sbom_vc(
    vendor: &KeyPair,
    vendor_did: &Did,
    old_vc_id: &str,
    kind: VcKind,
    claims: SbomClaims,
    embedded_refs: Vec<EmbeddedRef>,
    retain_old: bool,
    issued_at_secs: u64,
    state: &LedgerState,
) -> Result<(VerifiableCredential, Vec<Transaction>), CredentialError> {
    let old = state
        .sbom_registry
        .get(old_vc_id)
        .ok_or_else(|| CredentialError::UnknownVc(old_vc_id.to_string()))?;
    if old.issuer != *vendor_did {
        return Err(CredentialError::NotIssuer);
    }
    let (vc, register) = issue_sbom_inner(
        vendor,
        vendor_did,
        kind,
        claims,
        embedded_refs,
        Some(old_vc_id.to_string()),
        issued_at_secs,
        state,
    )?;
    let mut transactions = vec![register];
    if !retain_old {
        let reason = format!("superseded by {}", vc.id);
        transactions.push(revoke_vc(vendor, vendor_did, old_vc_id, &reason, state)?);
    }
    Ok((vc, transactions))
}

/// Build the transaction revoking a credential. SBOM credentials can only be
/// revoked by their issuer; eligibility credentials by their issuer or the
/// oversight authority. Revocation is terminal.
pub fn revoke_vc(
    caller: &KeyPair,
    caller_did: &Did,
    vc_id: &str,
    reason: &str,
    state: &LedgerState,
) -> Result<Transaction, CredentialError> {
    let registry = if let Some(record) = state.elig_registry.get(vc_id) {
        if record.status == VcStatus::Revoked {
            return Err(CredentialError::AlreadyRevoked);
        }
        if *caller_did != record.issuer && *caller_did != state.oversight {
            return Err(CredentialError::NotAuthorized);
        }
        VcRegistry::Eligibility
    } else if let Some(record) = state.sbom_registry.get(vc_id) {
        if record.status == VcStatus::Revoked {
            return Err(CredentialError::AlreadyRevoked);
        }
        if *caller_did != record.issuer {
            return Err(CredentialError::NotAuthorized);
        }
        VcRegistry::Sbom
    } else {
        return Err(CredentialError::UnknownVc(vc_id.to_string()));
    };
    let payload = VcRevokePayload {
        vc_id: vc_id.to_string(),
        registry,
        reason: reason.to_string(),
    };
    Ok(Transaction::signed(
        caller,
        caller_did.clone(),
        TxKind::VcRevoke,
        &payload,
    ))
}

/// Names of the individual verification checks, in the order they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Signature,
    IssuerActive,
    NotRevoked,
    NotExpired,
    EligibilityChain,
}

/// One verification check with its result and a human-readable detail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CheckResult {
    pub name: CheckName,
    pub passed: bool,
    pub detail: String,
}

/// Result of verifying a single credential. `valid` holds exactly when every
/// check passed; the check list always contains all five checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VerificationOutcome {
    pub valid: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationOutcome {
    /// The result of a named check. Panics if the name is absent, which
    /// cannot happen for outcomes produced by [`verify_vc`].
    pub fn check(&self, name: CheckName) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .expect("all five checks are always present")
    }
}

fn check_signature(vc: &VerifiableCredential, state: &LedgerState) -> (bool, String) {
    let Some((method_did, key_ref)) = vc.proof.verification_method.split_once('#') else {
        return (false, "malformed verification method".to_string());
    };
    if method_did != vc.issuer.rendered() {
        return (
            false,
            "verification method does not belong to the issuer".to_string(),
        );
    }
    let Some(version) = key_ref
        .strip_prefix("keys-")
        .and_then(|v| v.parse::<u64>().ok())
    else {
        return (false, "malformed key reference".to_string());
    };
    let Some(document) = state
        .did_history(&vc.issuer)
        .and_then(|history| history.iter().find(|d| d.version == version))
    else {
        return (
            false,
            format!("issuer has no registered key version {version}"),
        );
    };
    if verify_signature(
        &document.public_key,
        &canonical_vc_bytes(vc),
        &vc.proof.signature,
    ) {
        (true, format!("signature verifies under keys-{version}"))
    } else {
        (false, "signature does not verify".to_string())
    }
}

fn check_issuer_active(vc: &VerifiableCredential, state: &LedgerState) -> (bool, String) {
    match state.current_did_document(&vc.issuer) {
        Some(doc) if doc.status == DidStatus::Active => (true, "issuer DID is active".to_string()),
        Some(_) => (false, "issuer DID is deactivated".to_string()),
        None => (false, "issuer DID is not registered".to_string()),
    }
}

fn check_not_revoked(vc: &VerifiableCredential, state: &LedgerState) -> (bool, String) {
    let (registered_digest, status, reason) = match vc.vc_kind {
        VcKind::Eligibility => match state.elig_registry.get(&vc.id) {
            Some(r) => (r.vc_digest, r.status, r.reason.clone()),
            None => return (false, "credential is not registered".to_string()),
        },
        VcKind::ComponentSbom | VcKind::SystemSbom => match state.sbom_registry.get(&vc.id) {
            Some(r) => (r.vc_digest, r.status, r.reason.clone()),
            None => return (false, "credential is not registered".to_string()),
        },
    };
    if registered_digest != vc_digest(vc) {
        return (
            false,
            "registered digest does not match this credential".to_string(),
        );
    }
    match status {
        VcStatus::Active => (true, "registry status is active".to_string()),
        VcStatus::Revoked => (
            false,
            format!("revoked: {}", reason.unwrap_or_else(|| "no reason".into())),
        ),
    }
}

fn check_not_expired(vc: &VerifiableCredential, now_secs: u64) -> (bool, String) {
    if vc.vc_kind != VcKind::Eligibility {
        return (true, "SBOM credentials do not expire".to_string());
    }
    let VcClaims::Eligibility(claims) = &vc.claims else {
        return (false, "claims do not match the credential kind".to_string());
    };
    match parse_rfc3339_utc(&claims.valid_until) {
        Some(until) if now_secs <= until => (true, format!("valid until {}", claims.valid_until)),
        Some(_) => (false, format!("lapsed at {}", claims.valid_until)),
        None => (false, "unparseable validUntil claim".to_string()),
    }
}

fn check_eligibility_chain(
    vc: &VerifiableCredential,
    state: &LedgerState,
    now_secs: u64,
) -> (bool, String) {
    if vc.vc_kind == VcKind::Eligibility {
        return (
            true,
            "not applicable to eligibility credentials".to_string(),
        );
    }
    // Prefer the embedded eligibility reference when the credential carries
    // one; otherwise fall back to scanning the registry for the issuer.
    let embedded = vc
        .embedded_refs
        .iter()
        .find(|r| state.elig_registry.contains_key(&r.vc_id));
    if let Some(r) = embedded {
        let record = &state.elig_registry[&r.vc_id];
        if record.vc_digest != r.vc_digest {
            return (false, "embedded eligibility digest mismatch".to_string());
        }
        if record.subject != vc.issuer {
            return (
                false,
                "embedded eligibility belongs to another vendor".to_string(),
            );
        }
        if record.status != VcStatus::Active {
            return (false, "embedded eligibility is revoked".to_string());
        }
        if record.valid_until_secs < now_secs {
            return (false, "embedded eligibility has lapsed".to_string());
        }
        return (true, format!("eligibility {} is live", r.vc_id));
    }
    if has_live_eligibility(state, &vc.issuer, now_secs) {
        (true, "issuer holds a live eligibility".to_string())
    } else {
        (false, "no live eligibility for the issuer".to_string())
    }
}

/// Verify a credential against the current ledger registries.
///
/// Five checks run in a fixed order: the signature over the canonical bytes,
/// the issuer DID's status, the on-ledger revocation status (which also pins
/// the registered digest), expiry (eligibility credentials only) and the
/// issuer's eligibility chain (SBOM credentials only). The outcome lists
/// every check whether it passed or not.
pub fn verify_vc(
    vc: &VerifiableCredential,
    state: &LedgerState,
    now_secs: u64,
) -> VerificationOutcome {
    let (sig_ok, sig_detail) = check_signature(vc, state);
    let (active_ok, active_detail) = check_issuer_active(vc, state);
    let (revoked_ok, revoked_detail) = check_not_revoked(vc, state);
    let (expired_ok, expired_detail) = check_not_expired(vc, now_secs);
    let (chain_ok, chain_detail) = check_eligibility_chain(vc, state, now_secs);
    let checks = vec![
        CheckResult {
            name: CheckName::Signature,
            passed: sig_ok,
            detail: sig_detail,
        },
        CheckResult {
            name: CheckName::IssuerActive,
            passed: active_ok,
            detail: active_detail,
        },
        CheckResult {
            name: CheckName::NotRevoked,
            passed: revoked_ok,
            detail: revoked_detail,
        },
        CheckResult {
            name: CheckName::NotExpired,
            passed: expired_ok,
            detail: expired_detail,
        },
        CheckResult {
            name: CheckName::EligibilityChain,
            passed: chain_ok,
            detail: chain_detail,
        },
    ];
    VerificationOutcome {
        valid: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Full-disclosure integrity check: the raw SBOM bytes hash to the digest the
/// credential claims, and the credential itself verifies.
pub fn verify_full_disclosure(
    sbom_bytes: &[u8],
    vc: &VerifiableCredential,
    state: &LedgerState,
    now_secs: u64,
) -> bool {
    let VcClaims::Sbom(claims) = &vc.claims else {
        return false;
    };
    if !vc.vc_kind.is_sbom() {
        return false;
    }
    sha256(sbom_bytes) == claims.sbom_digest && verify_vc(vc, state, now_secs).valid
}

/// Source of credential bodies for the trust-chain walk. The registries hold
/// only ids and digests; the full envelopes live off-chain.
pub trait VcResolver {
    fn fetch_vc(&self, vc_id: &str) -> Option<VerifiableCredential>;
}

impl VcResolver for BTreeMap<String, VerifiableCredential> {
    fn fetch_vc(&self, vc_id: &str) -> Option<VerifiableCredential> {
        self.get(vc_id).cloned()
    }
}

/// One node of a verified trust chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChainNode {
    pub vc_id: String,
    pub kind: VcKind,
    /// Whether the digest pinned by the parent's embedded reference matches
    /// the resolved credential. Always true for the root.
    pub digest_ok: bool,
    /// A component credential that embeds nothing declares its upstream
    /// composition unverified; that is reported, not failed.
    pub declared_unverified: bool,
    pub outcome: VerificationOutcome,
    pub children: Vec<ChainNode>,
}

/// Tree-shaped report over a whole trust chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChainReport {
    /// True when every node verified and every embedded digest matched.
    pub valid: bool,
    pub root: ChainNode,
}

impl ChainNode {
    fn subtree_valid(&self) -> bool {
        self.digest_ok && self.outcome.valid && self.children.iter().all(ChainNode::subtree_valid)
    }

    /// Depth-first iterator over the node ids of the subtree, for reporting.
    pub fn flatten(&self) -> Vec<&ChainNode> {
        let mut nodes = vec![self];
        for child in &self.children {
            nodes.extend(child.flatten());
        }
        nodes
    }
}

/// Walk a credential's embedded references breadth-first, verifying every
/// node against the ledger, up to `max_depth` levels below the root.
///
/// Referenced credentials are fetched through `resolver` and their digests
/// checked against the parent's pins. A reference that cannot be resolved is
/// a [`CredentialError::DanglingRef`]; references below `max_depth` raise
/// [`CredentialError::DepthExceeded`].
pub fn verify_trust_chain(
    root: &VerifiableCredential,
    resolver: &dyn VcResolver,
    state: &LedgerState,
    max_depth: usize,
    now_secs: u64,
) -> Result<ChainReport, CredentialError> {
    struct Pending {
        vc: VerifiableCredential,
        depth: usize,
        parent: Option<usize>,
        digest_ok: bool,
    }
    let mut queue = VecDeque::new();
    queue.push_back(Pending {
        vc: root.clone(),
        depth: 0,
        parent: None,
        digest_ok: true,
    });
    let mut nodes: Vec<ChainNode> = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    while let Some(pending) = queue.pop_front() {
        let index = nodes.len();
        nodes.push(ChainNode {
            vc_id: pending.vc.id.clone(),
            kind: pending.vc.vc_kind,
            digest_ok: pending.digest_ok,
            declared_unverified: pending.vc.vc_kind == VcKind::ComponentSbom
                && pending.vc.embedded_refs.is_empty(),
            outcome: verify_vc(&pending.vc, state, now_secs),
            children: Vec::new(),
        });
        parents.push(pending.parent);
        for r in &pending.vc.embedded_refs {
            if pending.depth == max_depth {
                return Err(CredentialError::DepthExceeded);
            }
            let child = resolver
                .fetch_vc(&r.vc_id)
                .ok_or_else(|| CredentialError::DanglingRef(r.vc_id.clone()))?;
            let digest_ok = vc_digest(&child) == r.vc_digest;
            queue.push_back(Pending {
                vc: child,
                depth: pending.depth + 1,
                parent: Some(index),
                digest_ok,
            });
        }
    }
    // Fold the arena back into a tree; children always sit at higher indices
    // than their parent, so a reverse sweep can move them in place.
    let mut slots: Vec<Option<ChainNode>> = nodes.into_iter().map(Some).collect();
    for index in (1..slots.len()).rev() {
        let node = slots[index].take().expect("taken once");
        let parent = parents[index].expect("non-root nodes have parents");
        slots[parent]
            .as_mut()
            .expect("parent not yet folded")
            .children
            .insert(0, node);
    }
    let root_node = slots[0].take().expect("root remains");
    Ok(ChainReport {
        valid: root_node.subtree_valid(),
        root: root_node,
    })
}
