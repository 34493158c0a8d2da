//! Deterministic in-process permissioned ledger.
//!
//! One sequencer node orders transactions into blocks on a simulated clock:
//! every call that takes a `now` argument gets its time from the caller, so a
//! whole network history can be replayed — or simulated in a test — without
//! touching the wall clock. The ledger state is a pure fold of the genesis
//! configuration plus the ordered transaction list, which is what makes the
//! append-only block file sufficient for audit: re-applying it must always
//! reproduce both the state hash and each transaction's recorded outcome.
//!
//! Four registries live in the state:
//!
//! * **DID registry** — document history per identifier, monotone versions;
//! * **eligibility registry** — vendor eligibility credentials issued by the
//!   oversight authority (the only party allowed to write here);
//! * **SBOM registry** — credential digests for component/system SBOMs, with
//!   supersession links for updates;
//! * **penalty registry** — oversight-recorded penalty points; crossing the
//!   configured threshold atomically revokes the vendor's active eligibility.
//!
//! Invalid transactions are not dropped: block production records them with
//! a failure flag and leaves the state untouched, so misbehaviour is visible
//! in the audit log without ever influencing a registry.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::canonical::to_canonical_bytes;
use crate::digest::{sha256_parts, Digest256};
use crate::identity::{
    verify_signature, Did, DidDeactivatePayload, DidDocument, DidStatus, DidUpdatePayload, KeyPair,
    SignatureBytes,
};
use crate::merkle::digest_list_root;

/// Reason string attached when a penalty threshold revokes eligibility.
pub const PENALTY_REVOCATION_REASON: &str = "penalty threshold exceeded";

/// The transaction vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxKind {
    DidRegister,
    DidUpdate,
    DidDeactivate,
    EligRegister,
    SbomRegister,
    SbomUpdate,
    VcRevoke,
    PenaltyRecord,
}

impl TxKind {
    fn tag(&self) -> &'static str {
        match self {
            TxKind::DidRegister => "did_register",
            TxKind::DidUpdate => "did_update",
            TxKind::DidDeactivate => "did_deactivate",
            TxKind::EligRegister => "elig_register",
            TxKind::SbomRegister => "sbom_register",
            TxKind::SbomUpdate => "sbom_update",
            TxKind::VcRevoke => "vc_revoke",
            TxKind::PenaltyRecord => "penalty_record",
        }
    }
}

/// Base64 serde for opaque payload bytes.
mod base64_bytes {
    use super::*;

    pub fn serialize<S: Serializer>(bytes: &Vec<u8>, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&BASE64.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(deserializer)?;
        BASE64
            .decode(s.as_bytes())
            .map_err(serde::de::Error::custom)
    }
}

/// A signed, content-addressed transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Transaction {
    pub tx_id: Digest256,
    pub sender: Did,
    pub kind: TxKind,
    /// Canonical JSON bytes of the kind-specific payload.
    #[serde(with = "base64_bytes")]
    pub payload: Vec<u8>,
    /// Sender's Ed25519 signature over the payload bytes.
    #[serde(rename = "signatureHex")]
    pub signature: SignatureBytes,
}

impl Transaction {
    /// Sign a payload and derive the content address. The id covers kind and
    /// sender as well as the payload bytes, so the same payload submitted
    /// under a different kind or sender is a different transaction.
    ///
    /// `sender` is passed explicitly rather than derived from the keypair:
    /// after a key rotation the controlling key is no longer the one the DID
    /// was derived from, but the DID itself is stable.
    pub fn signed<P: Serialize>(
        keypair: &KeyPair,
        sender: Did,
        kind: TxKind,
        payload: &P,
    ) -> Transaction {
        let payload = to_canonical_bytes(payload).expect("payload serializes");
        let signature = keypair.sign(&payload);
        let tx_id = Self::compute_id(kind, &sender, &payload);
        Transaction {
            tx_id,
            sender,
            kind,
            payload,
            signature,
        }
    }

    pub fn compute_id(kind: TxKind, sender: &Did, payload: &[u8]) -> Digest256 {
        sha256_parts(&[
            kind.tag().as_bytes(),
            &[0x1F],
            sender.rendered().as_bytes(),
            &[0x1F],
            payload,
        ])
    }

    fn parse_payload<'a, P: Deserialize<'a>>(&'a self) -> Result<P, ApplyError> {
        serde_json::from_slice(&self.payload)
            .map_err(|e| ApplyError::MalformedPayload(e.to_string()))
    }
}

/// Payload of `did_register`: the version-1 document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DidRegisterPayload {
    pub document: DidDocument,
}

/// Payload of `elig_register`, written only by the oversight authority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EligRegisterPayload {
    pub vc_id: String,
    pub vc_digest: Digest256,
    pub subject: Did,
    pub valid_until_secs: u64,
}

/// Payload of `sbom_register` / `sbom_update`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SbomRegisterPayload {
    pub vc_id: String,
    pub vc_digest: Digest256,
    /// Prior credential this one replaces (required for `sbom_update`).
    pub supersedes: Option<String>,
}

/// Which registry a revocation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VcRegistry {
    Eligibility,
    Sbom,
}

/// Payload of `vc_revoke`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VcRevokePayload {
    pub vc_id: String,
    pub registry: VcRegistry,
    pub reason: String,
}

/// Payload of `penalty_record`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PenaltyPayload {
    pub vendor: Did,
    pub points: u32,
    pub reason: String,
}

/// Lifecycle status of a registered credential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VcStatus {
    Active,
    Revoked,
}

/// Eligibility registry record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EligRecord {
    pub vc_digest: Digest256,
    pub issuer: Did,
    pub subject: Did,
    pub valid_until_secs: u64,
    pub status: VcStatus,
    pub reason: Option<String>,
}

/// SBOM registry record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SbomRecord {
    pub vc_digest: Digest256,
    pub issuer: Did,
    pub status: VcStatus,
    pub supersedes: Option<String>,
    pub reason: Option<String>,
}

/// One penalty entry against a vendor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PenaltyEntry {
    pub points: u32,
    pub reason: String,
    pub recorded_at: u64,
}

/// Genesis-time parameters, bound into the state hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LedgerConfig {
    pub block_interval_secs: u64,
    pub penalty_threshold: u32,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            block_interval_secs: 12,
            penalty_threshold: 100,
        }
    }
}

/// The full registry state. A pure function of genesis plus the ordered
/// transaction history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LedgerState {
    pub config: LedgerConfig,
    /// The pre-seeded oversight authority.
    pub oversight: Did,
    /// Rendered DID → document history; the last entry is current.
    pub did_registry: BTreeMap<String, Vec<DidDocument>>,
    pub elig_registry: BTreeMap<String, EligRecord>,
    pub sbom_registry: BTreeMap<String, SbomRecord>,
    /// Rendered DID → penalty entries.
    pub penalty_registry: BTreeMap<String, Vec<PenaltyEntry>>,
}

/// Errors from applying a transaction to the state.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("sender is not authorized for this transaction")]
    Unauthorized,
    #[error("unknown subject {0}")]
    UnknownSubject(String),
    #[error("invalid state transition: {0}")]
    InvalidTransition(String),
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("transaction signature does not verify")]
    BadSignature,
}

impl LedgerState {
    /// Empty registries under a given configuration and oversight DID. The
    /// oversight document itself arrives via the genesis block's
    /// `did_register` transaction.
    pub fn genesis(config: LedgerConfig, oversight: Did) -> LedgerState {
        LedgerState {
            config,
            oversight,
            did_registry: BTreeMap::new(),
            elig_registry: BTreeMap::new(),
            sbom_registry: BTreeMap::new(),
            penalty_registry: BTreeMap::new(),
        }
    }

    /// The current document for a DID, if registered.
    pub fn current_did_document(&self, did: &Did) -> Option<&DidDocument> {
        self.did_registry.get(&did.rendered())?.last()
    }

    /// Full version history for a DID.
    pub fn did_history(&self, did: &Did) -> Option<&[DidDocument]> {
        self.did_registry.get(&did.rendered()).map(Vec::as_slice)
    }

    /// Sum of penalty points recorded against a vendor.
    pub fn penalty_total(&self, did: &Did) -> u32 {
        self.penalty_registry
            .get(&did.rendered())
            .map(|entries| entries.iter().map(|e| e.points).sum())
            .unwrap_or(0)
    }

    /// The active eligibility records whose subject is `did`.
    pub fn active_eligibilities_for(&self, did: &Did) -> Vec<(&str, &EligRecord)> {
        self.elig_registry
            .iter()
            .filter(|(_, record)| record.status == VcStatus::Active && record.subject == *did)
            .map(|(id, record)| (id.as_str(), record))
            .collect()
    }

    /// SHA-256 over the canonical JSON serialization of the whole state.
    pub fn state_hash(&self) -> Digest256 {
        crate::digest::sha256(&to_canonical_bytes(self).expect("state serializes"))
    }

    fn active_document(&self, did: &Did) -> Result<&DidDocument, ApplyError> {
        let doc = self
            .current_did_document(did)
            .ok_or_else(|| ApplyError::UnknownSubject(did.rendered()))?;
        if !doc.is_active() {
            return Err(ApplyError::InvalidTransition(format!(
                "{} is deactivated",
                did.rendered()
            )));
        }
        Ok(doc)
    }

    /// Verify the transaction signature against the key the state knows for
    /// its sender (or, for registration, the key embedded in the payload).
    fn verify_tx_signature(&self, tx: &Transaction) -> Result<(), ApplyError> {
        let key = match tx.kind {
            TxKind::DidRegister => {
                let payload: DidRegisterPayload = tx.parse_payload()?;
                payload.document.public_key
            }
            _ => self.active_document(&tx.sender)?.public_key,
        };
        if !verify_signature(&key, &tx.payload, &tx.signature) {
            return Err(ApplyError::BadSignature);
        }
        Ok(())
    }
}

/// Apply one transaction, mutating `state` only on success.
pub fn apply_transaction(
    state: &mut LedgerState,
    tx: &Transaction,
    block_time: u64,
) -> Result<(), ApplyError> {
    state.verify_tx_signature(tx)?;
    match tx.kind {
        TxKind::DidRegister => {
            let payload: DidRegisterPayload = tx.parse_payload()?;
            let doc = payload.document;
            if doc.id != tx.sender {
                return Err(ApplyError::Unauthorized);
            }
            if doc.id != Did::from_public_key(&doc.public_key) {
                return Err(ApplyError::MalformedPayload(
                    "DID does not derive from the registered key".into(),
                ));
            }
            if doc.version != 1 || doc.status != DidStatus::Active {
                return Err(ApplyError::InvalidTransition(
                    "registration must carry an active version-1 document".into(),
                ));
            }
            let key = doc.id.rendered();
            if state.did_registry.contains_key(&key) {
                return Err(ApplyError::InvalidTransition(format!(
                    "{key} is already registered"
                )));
            }
            state.did_registry.insert(key, vec![doc]);
        }
        TxKind::DidUpdate => {
            let payload: DidUpdatePayload = tx.parse_payload()?;
            if payload.did != tx.sender {
                return Err(ApplyError::Unauthorized);
            }
            let current = state.active_document(&payload.did)?.clone();
            if payload.from_version != current.version {
                return Err(ApplyError::InvalidTransition(format!(
                    "update targets version {} but current is {}",
                    payload.from_version, current.version
                )));
            }
            let next = DidDocument {
                id: current.id.clone(),
                public_key: payload.new_public_key,
                service_endpoint: current.service_endpoint.clone(),
                version: current.version + 1,
                status: DidStatus::Active,
            };
            state
                .did_registry
                .get_mut(&payload.did.rendered())
                .expect("checked above")
                .push(next);
        }
        TxKind::DidDeactivate => {
            let payload: DidDeactivatePayload = tx.parse_payload()?;
            if payload.did != tx.sender {
                return Err(ApplyError::Unauthorized);
            }
            let current = state.active_document(&payload.did)?.clone();
            if payload.from_version != current.version {
                return Err(ApplyError::InvalidTransition(format!(
                    "deactivation targets version {} but current is {}",
                    payload.from_version, current.version
                )));
            }
            let next = DidDocument {
                version: current.version + 1,
                status: DidStatus::Deactivated,
                ..current
            };
            state
                .did_registry
                .get_mut(&payload.did.rendered())
                .expect("checked above")
                .push(next);
        }
        TxKind::EligRegister => {
            if tx.sender != state.oversight {
                return Err(ApplyError::Unauthorized);
            }
            let payload: EligRegisterPayload = tx.parse_payload()?;
            state.active_document(&payload.subject)?;
            if state.elig_registry.contains_key(&payload.vc_id) {
                return Err(ApplyError::InvalidTransition(format!(
                    "eligibility credential {} already registered",
                    payload.vc_id
                )));
            }
            state.elig_registry.insert(
                payload.vc_id.clone(),
                EligRecord {
                    vc_digest: payload.vc_digest,
                    issuer: tx.sender.clone(),
                    subject: payload.subject,
                    valid_until_secs: payload.valid_until_secs,
                    status: VcStatus::Active,
                    reason: None,
                },
            );
        }
        TxKind::SbomRegister | TxKind::SbomUpdate => {
            let payload: SbomRegisterPayload = tx.parse_payload()?;
            state.active_document(&tx.sender)?;
            if state.active_eligibilities_for(&tx.sender).is_empty() {
                return Err(ApplyError::Unauthorized);
            }
            if state.sbom_registry.contains_key(&payload.vc_id) {
                return Err(ApplyError::InvalidTransition(format!(
                    "SBOM credential {} already registered",
                    payload.vc_id
                )));
            }
            if tx.kind == TxKind::SbomUpdate && payload.supersedes.is_none() {
                return Err(ApplyError::MalformedPayload(
                    "sbom_update must name the credential it supersedes".into(),
                ));
            }
            if let Some(prior_id) = &payload.supersedes {
                let prior = state
                    .sbom_registry
                    .get(prior_id)
                    .ok_or_else(|| ApplyError::UnknownSubject(prior_id.clone()))?;
                if prior.issuer != tx.sender {
                    return Err(ApplyError::Unauthorized);
                }
            }
            state.sbom_registry.insert(
                payload.vc_id.clone(),
                SbomRecord {
                    vc_digest: payload.vc_digest,
                    issuer: tx.sender.clone(),
                    status: VcStatus::Active,
                    supersedes: payload.supersedes,
                    reason: None,
                },
            );
        }
        TxKind::VcRevoke => {
            let payload: VcRevokePayload = tx.parse_payload()?;
            match payload.registry {
                VcRegistry::Eligibility => {
                    let record = state
                        .elig_registry
                        .get_mut(&payload.vc_id)
                        .ok_or_else(|| ApplyError::UnknownSubject(payload.vc_id.clone()))?;
                    // Eligibility may be withdrawn by its issuer or by the
                    // oversight authority (they are usually the same party).
                    if tx.sender != record.issuer && tx.sender != state.oversight {
                        return Err(ApplyError::Unauthorized);
                    }
                    if record.status == VcStatus::Revoked {
                        return Err(ApplyError::InvalidTransition(format!(
                            "{} is already revoked",
                            payload.vc_id
                        )));
                    }
                    record.status = VcStatus::Revoked;
                    record.reason = Some(payload.reason);
                }
                VcRegistry::Sbom => {
                    let record = state
                        .sbom_registry
                        .get_mut(&payload.vc_id)
                        .ok_or_else(|| ApplyError::UnknownSubject(payload.vc_id.clone()))?;
                    if tx.sender != record.issuer {
                        return Err(ApplyError::Unauthorized);
                    }
                    if record.status == VcStatus::Revoked {
                        return Err(ApplyError::InvalidTransition(format!(
                            "{} is already revoked",
                            payload.vc_id
                        )));
                    }
                    record.status = VcStatus::Revoked;
                    record.reason = Some(payload.reason);
                }
            }
        }
        TxKind::PenaltyRecord => {
            if tx.sender != state.oversight {
                return Err(ApplyError::Unauthorized);
            }
            let payload: PenaltyPayload = tx.parse_payload()?;
            if payload.points == 0 {
                return Err(ApplyError::MalformedPayload(
                    "penalty must carry at least one point".into(),
                ));
            }
            if state.current_did_document(&payload.vendor).is_none() {
                return Err(ApplyError::UnknownSubject(payload.vendor.rendered()));
            }
            state
                .penalty_registry
                .entry(payload.vendor.rendered())
                .or_default()
                .push(PenaltyEntry {
                    points: payload.points,
                    reason: payload.reason,
                    recorded_at: block_time,
                });
            // Threshold crossing revokes every active eligibility of the
            // vendor in the same state transition.
            if state.penalty_total(&payload.vendor) >= state.config.penalty_threshold {
                let ids: Vec<String> = state
                    .active_eligibilities_for(&payload.vendor)
                    .into_iter()
                    .map(|(id, _)| id.to_string())
                    .collect();
                for id in ids {
                    let record = state.elig_registry.get_mut(&id).expect("listed above");
                    record.status = VcStatus::Revoked;
                    record.reason = Some(PENALTY_REVOCATION_REASON.to_string());
                }
            }
        }
    }
    Ok(())
}

/// A transaction as recorded in a block, with its execution outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExecutedTransaction {
    pub tx: Transaction,
    pub applied: bool,
    pub error: Option<String>,
}

/// One block of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Block {
    pub height: u64,
    pub timestamp: u64,
    pub prev_hash: Digest256,
    pub tx_root: Digest256,
    pub transactions: Vec<ExecutedTransaction>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BlockHeader<'a> {
    height: u64,
    timestamp: u64,
    prev_hash: &'a Digest256,
    tx_root: &'a Digest256,
}

impl Block {
    /// Hash of the canonical header serialization; the next block's
    /// `prev_hash` commits to it.
    pub fn header_hash(&self) -> Digest256 {
        let header = BlockHeader {
            height: self.height,
            timestamp: self.timestamp,
            prev_hash: &self.prev_hash,
            tx_root: &self.tx_root,
        };
        crate::digest::sha256(&to_canonical_bytes(&header).expect("header serializes"))
    }

    fn compute_tx_root(transactions: &[ExecutedTransaction]) -> Digest256 {
        let ids: Vec<Digest256> = transactions.iter().map(|t| t.tx.tx_id).collect();
        digest_list_root(&ids).unwrap_or(Digest256::ZERO)
    }
}

/// Errors from submitting a transaction to the pool.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubmitError {
    #[error("transaction signature does not verify")]
    BadSignature,
    #[error("transaction was already submitted")]
    DuplicateTx,
    #[error("sender DID is not registered and active")]
    InactiveSender,
}

/// Acknowledgement for an accepted transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Receipt {
    pub accepted: bool,
    pub tx_id: Digest256,
    pub queued_at: u64,
}

/// Structural chain-verification failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain is empty")]
    Empty,
    #[error("block {0} has the wrong height")]
    BadHeight(u64),
    #[error("block {0} does not link to its predecessor")]
    BadLink(u64),
    #[error("block {0} transaction root does not match its transactions")]
    BadTxRoot(u64),
    #[error("block {height} transaction {index} id does not match its content")]
    BadTxId { height: u64, index: usize },
    #[error("block {0} timestamp is not monotone")]
    BadTimestamp(u64),
}

/// Errors from replaying a persisted chain.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("block {height} transaction {index}: recorded outcome does not match replay")]
    ExecutionMismatch { height: u64, index: usize },
}

/// The single sequencer: pending pool, block history, and materialized state.
#[derive(Debug, Clone)]
pub struct LedgerNode {
    state: LedgerState,
    blocks: Vec<Block>,
    pending: VecDeque<Transaction>,
    seen: BTreeSet<Digest256>,
}

impl LedgerNode {
    /// Create a chain whose genesis block registers the oversight DID.
    pub fn genesis(
        config: LedgerConfig,
        oversight_registration: Transaction,
        genesis_time: u64,
    ) -> Result<LedgerNode, ApplyError> {
        let mut state = LedgerState::genesis(config, oversight_registration.sender.clone());
        apply_transaction(&mut state, &oversight_registration, genesis_time)?;
        let transactions = vec![ExecutedTransaction {
            tx: oversight_registration,
            applied: true,
            error: None,
        }];
        let genesis = Block {
            height: 0,
            timestamp: genesis_time,
            prev_hash: Digest256::ZERO,
            tx_root: Block::compute_tx_root(&transactions),
            transactions,
        };
        let mut seen = BTreeSet::new();
        seen.insert(genesis.transactions[0].tx.tx_id);
        Ok(LedgerNode {
            state,
            blocks: vec![genesis],
            pending: VecDeque::new(),
            seen,
        })
    }

    pub fn state(&self) -> &LedgerState {
        &self.state
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn tip(&self) -> &Block {
        self.blocks.last().expect("chain always has genesis")
    }

    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// Validate and enqueue a transaction.
    pub fn submit_transaction(
        &mut self,
        tx: Transaction,
        now: u64,
    ) -> Result<Receipt, SubmitError> {
        if self.seen.contains(&tx.tx_id) {
            return Err(SubmitError::DuplicateTx);
        }
        if tx.tx_id != Transaction::compute_id(tx.kind, &tx.sender, &tx.payload) {
            return Err(SubmitError::BadSignature);
        }
        let key = match tx.kind {
            TxKind::DidRegister => {
                let payload: Result<DidRegisterPayload, _> = serde_json::from_slice(&tx.payload);
                match payload {
                    Ok(p) if p.document.id == tx.sender => p.document.public_key,
                    _ => return Err(SubmitError::BadSignature),
                }
            }
            _ => match self.state.current_did_document(&tx.sender) {
                Some(doc) if doc.is_active() => doc.public_key,
                _ => return Err(SubmitError::InactiveSender),
            },
        };
        if !verify_signature(&key, &tx.payload, &tx.signature) {
            return Err(SubmitError::BadSignature);
        }
        let receipt = Receipt {
            accepted: true,
            tx_id: tx.tx_id,
            queued_at: now,
        };
        self.seen.insert(tx.tx_id);
        self.pending.push_back(tx);
        Ok(receipt)
    }

    /// Produce the next block if the interval has elapsed. Drains the whole
    /// pool in FIFO order; failed transactions are recorded but change
    /// nothing.
    pub fn produce_block(&mut self, now: u64) -> Option<Block> {
        let due = self.tip().timestamp + self.state.config.block_interval_secs;
        if now < due {
            return None;
        }
        let mut transactions = Vec::with_capacity(self.pending.len());
        while let Some(tx) = self.pending.pop_front() {
            let outcome = apply_transaction(&mut self.state, &tx, now);
            transactions.push(ExecutedTransaction {
                applied: outcome.is_ok(),
                error: outcome.err().map(|e| e.to_string()),
                tx,
            });
        }
        let tip = self.tip();
        let block = Block {
            height: tip.height + 1,
            timestamp: now,
            prev_hash: tip.header_hash(),
            tx_root: Block::compute_tx_root(&transactions),
            transactions,
        };
        self.blocks.push(block.clone());
        Some(block)
    }
}

/// Check the structural integrity of a block sequence: contiguous heights,
/// hash links, transaction roots, and content-derived transaction ids.
pub fn verify_chain(blocks: &[Block]) -> Result<(), ChainError> {
    let first = blocks.first().ok_or(ChainError::Empty)?;
    if first.height != 0 {
        return Err(ChainError::BadHeight(first.height));
    }
    if first.prev_hash != Digest256::ZERO {
        return Err(ChainError::BadLink(0));
    }
    for (i, block) in blocks.iter().enumerate() {
        if block.height != i as u64 {
            return Err(ChainError::BadHeight(block.height));
        }
        if i > 0 {
            let prev = &blocks[i - 1];
            if block.prev_hash != prev.header_hash() {
                return Err(ChainError::BadLink(block.height));
            }
            if block.timestamp < prev.timestamp {
                return Err(ChainError::BadTimestamp(block.height));
            }
        }
        if block.tx_root != Block::compute_tx_root(&block.transactions) {
            return Err(ChainError::BadTxRoot(block.height));
        }
        for (index, executed) in block.transactions.iter().enumerate() {
            let tx = &executed.tx;
            if tx.tx_id != Transaction::compute_id(tx.kind, &tx.sender, &tx.payload) {
                return Err(ChainError::BadTxId {
                    height: block.height,
                    index,
                });
            }
        }
    }
    Ok(())
}

/// Rebuild a node from persisted blocks, verifying the chain structure and
/// that every recorded execution outcome reproduces exactly.
pub fn replay(blocks: Vec<Block>, config: LedgerConfig) -> Result<LedgerNode, ReplayError> {
    verify_chain(&blocks)?;
    let genesis_tx = blocks[0]
        .transactions
        .first()
        .ok_or(ChainError::BadTxRoot(0))?;
    let mut state = LedgerState::genesis(config, genesis_tx.tx.sender.clone());
    let mut seen = BTreeSet::new();
    for block in &blocks {
        for (index, executed) in block.transactions.iter().enumerate() {
            let outcome = apply_transaction(&mut state, &executed.tx, block.timestamp);
            let recorded_error = executed.error.clone();
            let replayed_error = outcome.err().map(|e| e.to_string());
            if executed.applied != replayed_error.is_none() || recorded_error != replayed_error {
                return Err(ReplayError::ExecutionMismatch {
                    height: block.height,
                    index,
                });
            }
            seen.insert(executed.tx.tx_id);
        }
    }
    Ok(LedgerNode {
        state,
        blocks,
        pending: VecDeque::new(),
        seen,
    })
}

/// Append one block to a JSONL file (one JSON document per line).
pub fn append_block(path: &Path, block: &Block) -> std::io::Result<()> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let line = serde_json::to_string(block).expect("block serializes");
    writeln!(file, "{line}")
}

/// Write a whole chain, replacing the file.
pub fn write_blocks(path: &Path, blocks: &[Block]) -> std::io::Result<()> {
    let mut out = String::new();
    for block in blocks {
        out.push_str(&serde_json::to_string(block).expect("block serializes"));
        out.push('\n');
    }
    std::fs::write(path, out)
}

/// Read a JSONL chain file.
pub fn read_blocks(path: &Path) -> std::io::Result<Vec<Block>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut blocks = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let block: Block = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// Registry selector for queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegistryKind {
    Did,
    Eligibility,
    Sbom,
    Penalty,
}

/// A query result, self-describing for CLI output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", untagged)]
pub enum RegistryEntry {
    Did {
        history: Vec<DidDocument>,
    },
    Eligibility(EligRecord),
    Sbom(SbomRecord),
    Penalty {
        total: u32,
        entries: Vec<PenaltyEntry>,
    },
}

/// Look up one key in one registry.
pub fn query_registry(
    state: &LedgerState,
    registry: RegistryKind,
    key: &str,
) -> Option<RegistryEntry> {
    match registry {
        RegistryKind::Did => state
            .did_registry
            .get(key)
            .map(|history| RegistryEntry::Did {
                history: history.clone(),
            }),
        RegistryKind::Eligibility => state
            .elig_registry
            .get(key)
            .cloned()
            .map(RegistryEntry::Eligibility),
        RegistryKind::Sbom => state
            .sbom_registry
            .get(key)
            .cloned()
            .map(RegistryEntry::Sbom),
        RegistryKind::Penalty => {
            let entries = state.penalty_registry.get(key)?.clone();
            Some(RegistryEntry::Penalty {
                total: entries.iter().map(|e| e.points).sum(),
                entries,
            })
        }
    }
}
