//! Salted Merkle commitments over canonical SBOMs, with selective-disclosure,
//! presence, and absence proofs.
//!
//! Two trees are built per SBOM, both SHA-256 with domain-separated node
//! hashing:
//!
//! * the **attribute tree** commits to every `(path, value)` attribute — its
//!   leaves are `H(0x00 ‖ salt ‖ path ‖ 0x1F ‖ value)`;
//! * the **component index tree** commits to the sorted `name@version` list,
//!   bracketed by `\x00MIN` / `\xFFMAX` sentinel leaves, so that both
//!   membership ("is component X listed?") and non-membership ("X does not
//!   appear") can be proven without revealing the rest of the inventory.
//!
//! Each leaf gets its own salt, derived as `H(salt_seed ‖ leaf content key)`
//! from a per-SBOM secret seed. Sibling digests in an authentication path
//! therefore reveal nothing about undisclosed attributes, and equal values at
//! different paths (or across SBOMs with different seeds) hash differently.
//!
//! Internal nodes are `H(0x01 ‖ left ‖ right)`; when a level has an odd node
//! count the last node is promoted unchanged to the next level. Promotion
//! (rather than duplicating the lonely node) keeps every authentication path
//! at most `ceil(log2(leaf_count))` steps and avoids committing to a phantom
//! leaf.
//!
//! Verification is strict: proofs carry the leaf index and total leaf count,
//! and the verifier recomputes the exact sibling-side sequence that shape
//! implies before folding a single hash. A proof whose structure cannot occur
//! in a tree of the stated shape is rejected as malformed rather than merely
//! failing the root comparison.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::digest::{decode_strict_hex, sha256_parts, Digest256};
use crate::sbom::{CanonicalSbom, ComponentId};

/// Domain tag for leaf hashes.
const LEAF_TAG: u8 = 0x00;
/// Domain tag for internal-node hashes.
const NODE_TAG: u8 = 0x01;
/// Separator between path and value inside an attribute leaf. Paths are
/// escaped so this byte can never appear in them.
const PATH_VALUE_SEPARATOR: u8 = 0x1F;

/// Sentinel leaf contents bracketing the component index tree. `MAX` starts
/// with 0xFF, which no UTF-8 `name@version` rendering can produce, and real
/// identifiers always contain `@`, so neither sentinel collides with a
/// component.
pub const INDEX_MIN_SENTINEL: &[u8] = b"\x00MIN";
pub const INDEX_MAX_SENTINEL: &[u8] = b"\xFFMAX";

/// Errors from commitment construction and proof handling.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MerkleError {
    /// The SBOM has no attributes, so there is nothing to commit to.
    #[error("cannot commit to an SBOM with zero attributes")]
    EmptySbom,
    /// A disclosure request named a path the SBOM does not contain.
    #[error("attribute path {0:?} not present in SBOM")]
    UnknownPath(String),
    /// Presence was requested for a component the SBOM does not list.
    #[error("component {0:?} not present in SBOM")]
    NotPresent(String),
    /// Absence was requested for a component the SBOM does list.
    #[error("component {0:?} is present in SBOM")]
    ActuallyPresent(String),
    /// A recomputed root does not match the committed root.
    #[error("recomputed root does not match expected root")]
    RootMismatch,
    /// The proof is structurally impossible for the tree shape it claims.
    #[error("malformed proof: {0}")]
    MalformedProof(&'static str),
    /// The proof was issued for a different query than the one verified.
    #[error("proof does not answer the verified query")]
    QueryMismatch,
    /// A component identifier sorts outside the sentinel bracket (its name
    /// begins with a NUL byte) and cannot be indexed.
    #[error("component {0:?} cannot be placed inside the index sentinels")]
    UnindexableComponent(String),
}

/// Per-SBOM secret from which every leaf salt is derived.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SaltSeed(pub [u8; 32]);

impl SaltSeed {
    /// Derive a seed by hashing arbitrary secret material.
    pub fn derive(material: &[u8]) -> SaltSeed {
        SaltSeed(crate::digest::sha256(material).0)
    }
}

impl std::fmt::Debug for SaltSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Never print the secret itself.
        write!(f, "SaltSeed(…)")
    }
}

impl Serialize for SaltSeed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for SaltSeed {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = decode_strict_hex(&s, 32).map_err(serde::de::Error::custom)?;
        let mut out = [0u8; 32];
        out.copy_from_slice(&bytes);
        Ok(SaltSeed(out))
    }
}

/// Hex-encoded byte strings for index-leaf contents (which may contain the
/// non-UTF-8 sentinel bytes). Decoding is strict lowercase hex.
mod hex_bytes {
    use super::*;

    pub fn serialize<S: Serializer>(bytes: &Vec<u8>, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.len() % 2 != 0 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(serde::de::Error::custom("expected lowercase hex"));
        }
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// The public commitment to one SBOM plus the secret needed to open it.
///
/// `attribute_root` and `index_root` go into the SBOM credential; `salt_seed`
/// stays with the vendor and is required to generate proofs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SbomCommitment {
    pub attribute_root: Digest256,
    pub index_root: Digest256,
    pub salt_seed: SaltSeed,
    pub leaf_count: u64,
    pub index_leaf_count: u64,
}

/// Which side of the running node a sibling digest sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One step of an authentication path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SiblingStep {
    pub digest: Digest256,
    pub side: Side,
}

/// One disclosed attribute with its opening.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProofEntry {
    pub path: String,
    pub value: String,
    pub salt: Digest256,
    pub leaf_index: u64,
    pub sibling_path: Vec<SiblingStep>,
}

/// A selective-disclosure proof for one or more attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DisclosureProof {
    pub entries: Vec<ProofEntry>,
    pub attribute_root: Digest256,
    pub leaf_count: u64,
}

/// A membership opening for one leaf of the component index tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IndexEntry {
    /// The exact leaf content (hex: sentinels are not valid UTF-8).
    #[serde(with = "hex_bytes")]
    pub rendered: Vec<u8>,
    pub salt: Digest256,
    pub leaf_index: u64,
    pub sibling_path: Vec<SiblingStep>,
}

/// Proof that a component is listed in the SBOM's index tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PresenceProof {
    pub entry: IndexEntry,
    pub index_root: Digest256,
    pub leaf_count: u64,
}

/// Proof that a component is *not* listed: two adjacent index leaves that
/// bracket the query in sort order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AbsenceProof {
    /// The queried `name@version`, bound into the proof so a transcript for
    /// one query cannot be replayed for another.
    pub query: String,
    pub left_neighbor: IndexEntry,
    pub right_neighbor: IndexEntry,
    pub index_root: Digest256,
    pub leaf_count: u64,
}

fn leaf_salt(seed: &SaltSeed, content_key: &[u8]) -> Digest256 {
    sha256_parts(&[&seed.0, content_key])
}

fn leaf_hash(salt: &Digest256, content: &[u8]) -> Digest256 {
    sha256_parts(&[&[LEAF_TAG], salt.as_bytes(), content])
}

fn node_hash(left: &Digest256, right: &Digest256) -> Digest256 {
    sha256_parts(&[&[NODE_TAG], left.as_bytes(), right.as_bytes()])
}

fn attribute_content(path: &str, value: &str) -> Vec<u8> {
    let mut content = Vec::with_capacity(path.len() + 1 + value.len());
    content.extend_from_slice(path.as_bytes());
    content.push(PATH_VALUE_SEPARATOR);
    content.extend_from_slice(value.as_bytes());
    content
}

/// Build every level of a tree, bottom-up. `levels[0]` is the leaf row and
/// the last level holds exactly the root.
fn build_levels(leaves: Vec<Digest256>) -> Vec<Vec<Digest256>> {
    assert!(!leaves.is_empty(), "caller guarantees at least one leaf");
    let mut levels = vec![leaves];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(prev.len().div_ceil(2));
        for pair in prev.chunks(2) {
            next.push(match pair {
                [left, right] => node_hash(left, right),
                [lonely] => *lonely, // odd node promoted unchanged
                _ => unreachable!(),
            });
        }
        levels.push(next);
    }
    levels
}

fn root_of(levels: &[Vec<Digest256>]) -> Digest256 {
    levels.last().unwrap()[0]
}

/// Collect the authentication path for `leaf_index`, skipping levels where
/// the running node was promoted without a sibling.
fn sibling_path(levels: &[Vec<Digest256>], leaf_index: usize) -> Vec<SiblingStep> {
    let mut path = Vec::new();
    let mut idx = leaf_index;
    for level in &levels[..levels.len() - 1] {
        let promoted = level.len() % 2 == 1 && idx == level.len() - 1;
        if !promoted {
            let (digest, side) = if idx.is_multiple_of(2) {
                (level[idx + 1], Side::Right)
            } else {
                (level[idx - 1], Side::Left)
            };
            path.push(SiblingStep { digest, side });
        }
        idx /= 2;
    }
    path
}

/// Recompute the root from a leaf and its authentication path, first checking
/// that the path's shape (length and side sequence) is exactly what a tree of
/// `leaf_count` leaves dictates for `leaf_index`.
fn fold_checked(
    leaf: Digest256,
    leaf_index: u64,
    leaf_count: u64,
    steps: &[SiblingStep],
) -> Result<Digest256, MerkleError> {
    if leaf_count == 0 {
        return Err(MerkleError::MalformedProof("leaf count is zero"));
    }
    if leaf_index >= leaf_count {
        return Err(MerkleError::MalformedProof("leaf index out of range"));
    }
    let mut node = leaf;
    let mut idx = leaf_index;
    let mut size = leaf_count;
    let mut remaining = steps.iter();
    while size > 1 {
        let promoted = size % 2 == 1 && idx == size - 1;
        if !promoted {
            let step = remaining
                .next()
                .ok_or(MerkleError::MalformedProof("sibling path too short"))?;
            let expected = if idx.is_multiple_of(2) {
                Side::Right
            } else {
                Side::Left
            };
            if step.side != expected {
                return Err(MerkleError::MalformedProof("sibling on the wrong side"));
            }
            node = match step.side {
                Side::Right => node_hash(&node, &step.digest),
                Side::Left => node_hash(&step.digest, &node),
            };
        }
        idx /= 2;
        size = size.div_ceil(2);
    }
    if remaining.next().is_some() {
        return Err(MerkleError::MalformedProof("sibling path too long"));
    }
    Ok(node)
}

/// The sorted index-leaf contents: `\x00MIN`, every component rendering,
/// `\xFFMAX`.
/// Root of a plain (unsalted) tree over a list of digests, under the same
/// leaf/node domain separation and promotion rules as the SBOM trees. Used by
/// the ledger for block transaction roots. `None` when the list is empty.
pub fn digest_list_root(items: &[Digest256]) -> Option<Digest256> {
    if items.is_empty() {
        return None;
    }
    let leaves = items.iter().map(|d| leaf_hash_raw(d.as_bytes())).collect();
    Some(root_of(&build_levels(leaves)))
}

fn leaf_hash_raw(content: &[u8]) -> Digest256 {
    sha256_parts(&[&[LEAF_TAG], content])
}

fn index_contents(sbom: &CanonicalSbom) -> Result<Vec<Vec<u8>>, MerkleError> {
    let mut contents: Vec<Vec<u8>> = Vec::with_capacity(sbom.component_ids.len() + 2);
    contents.push(INDEX_MIN_SENTINEL.to_vec());
    for id in &sbom.component_ids {
        let rendered = id.rendered().into_bytes();
        if rendered.as_slice() <= INDEX_MIN_SENTINEL || rendered.as_slice() >= INDEX_MAX_SENTINEL {
            return Err(MerkleError::UnindexableComponent(id.rendered()));
        }
        contents.push(rendered);
    }
    contents.push(INDEX_MAX_SENTINEL.to_vec());
    contents.sort();
    contents.dedup();
    Ok(contents)
}

fn attribute_levels(sbom: &CanonicalSbom, seed: &SaltSeed) -> Vec<Vec<Digest256>> {
    let leaves = sbom
        .attributes
        .iter()
        .map(|(path, value)| {
            let salt = leaf_salt(seed, path.as_bytes());
            leaf_hash(&salt, &attribute_content(path, value))
        })
        .collect();
    build_levels(leaves)
}

fn index_levels(contents: &[Vec<u8>], seed: &SaltSeed) -> Vec<Vec<Digest256>> {
    let leaves = contents
        .iter()
        .map(|content| leaf_hash(&leaf_salt(seed, content), content))
        .collect();
    build_levels(leaves)
}

/// Commit to a canonical SBOM under a fresh salt seed.
pub fn build_commitment(
    sbom: &CanonicalSbom,
    salt_seed: SaltSeed,
) -> Result<SbomCommitment, MerkleError> {
    if sbom.attributes.is_empty() {
        return Err(MerkleError::EmptySbom);
    }
    let attr_levels = attribute_levels(sbom, &salt_seed);
    let contents = index_contents(sbom)?;
    let idx_levels = index_levels(&contents, &salt_seed);
    Ok(SbomCommitment {
        attribute_root: root_of(&attr_levels),
        index_root: root_of(&idx_levels),
        salt_seed,
        leaf_count: sbom.attributes.len() as u64,
        index_leaf_count: contents.len() as u64,
    })
}

/// Re-derive the attribute tree and check it matches the commitment. Proof
/// generation refuses to run against a mismatched SBOM/commitment pair, since
/// the resulting proofs could never verify.
fn checked_attribute_levels(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
) -> Result<Vec<Vec<Digest256>>, MerkleError> {
    if sbom.attributes.is_empty() {
        return Err(MerkleError::EmptySbom);
    }
    let levels = attribute_levels(sbom, &commitment.salt_seed);
    if root_of(&levels) != commitment.attribute_root
        || sbom.attributes.len() as u64 != commitment.leaf_count
    {
        return Err(MerkleError::RootMismatch);
    }
    Ok(levels)
}

/// Rendered index contents plus the tree levels built over them.
type IndexTree = (Vec<Vec<u8>>, Vec<Vec<Digest256>>);

fn checked_index_levels(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
) -> Result<IndexTree, MerkleError> {
    let contents = index_contents(sbom)?;
    let levels = index_levels(&contents, &commitment.salt_seed);
    if root_of(&levels) != commitment.index_root
        || contents.len() as u64 != commitment.index_leaf_count
    {
        return Err(MerkleError::RootMismatch);
    }
    Ok((contents, levels))
}

/// Open the named attribute paths.
pub fn prove_disclosure(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
    paths: &[String],
) -> Result<DisclosureProof, MerkleError> {
    let levels = checked_attribute_levels(sbom, commitment)?;
    let mut indices = Vec::with_capacity(paths.len());
    for path in paths {
        let index = sbom
            .attributes
            .binary_search_by(|(p, _)| p.as_str().cmp(path))
            .map_err(|_| MerkleError::UnknownPath(path.clone()))?;
        indices.push(index);
    }
    indices.sort_unstable();
    indices.dedup();

    let entries = indices
        .into_iter()
        .map(|index| {
            let (path, value) = &sbom.attributes[index];
            ProofEntry {
                path: path.clone(),
                value: value.clone(),
                salt: leaf_salt(&commitment.salt_seed, path.as_bytes()),
                leaf_index: index as u64,
                sibling_path: sibling_path(&levels, index),
            }
        })
        .collect();

    Ok(DisclosureProof {
        entries,
        attribute_root: commitment.attribute_root,
        leaf_count: commitment.leaf_count,
    })
}

/// Verify a disclosure proof against the committed attribute root, returning
/// the attribute pairs the proof establishes. Nothing in the result may be
/// trusted unless the call succeeds.
pub fn verify_disclosure(
    proof: &DisclosureProof,
    expected_root: &Digest256,
) -> Result<Vec<(String, String)>, MerkleError> {
    if proof.entries.is_empty() {
        return Err(MerkleError::MalformedProof("proof discloses nothing"));
    }
    if proof.attribute_root != *expected_root {
        return Err(MerkleError::RootMismatch);
    }
    let mut verified = Vec::with_capacity(proof.entries.len());
    for entry in &proof.entries {
        let leaf = leaf_hash(&entry.salt, &attribute_content(&entry.path, &entry.value));
        let root = fold_checked(
            leaf,
            entry.leaf_index,
            proof.leaf_count,
            &entry.sibling_path,
        )?;
        if root != *expected_root {
            return Err(MerkleError::RootMismatch);
        }
        verified.push((entry.path.clone(), entry.value.clone()));
    }
    Ok(verified)
}

fn index_entry(
    contents: &[Vec<u8>],
    levels: &[Vec<Digest256>],
    seed: &SaltSeed,
    index: usize,
) -> IndexEntry {
    let content = &contents[index];
    IndexEntry {
        rendered: content.clone(),
        salt: leaf_salt(seed, content),
        leaf_index: index as u64,
        sibling_path: sibling_path(levels, index),
    }
}

/// Prove that `component` is listed in the SBOM.
pub fn prove_presence(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
    component: &ComponentId,
) -> Result<PresenceProof, MerkleError> {
    let (contents, levels) = checked_index_levels(sbom, commitment)?;
    let rendered = component.rendered().into_bytes();
    let index = contents
        .binary_search(&rendered)
        .map_err(|_| MerkleError::NotPresent(component.rendered()))?;
    Ok(PresenceProof {
        entry: index_entry(&contents, &levels, &commitment.salt_seed, index),
        index_root: commitment.index_root,
        leaf_count: commitment.index_leaf_count,
    })
}

/// Verify a presence proof for `query` against the committed index root.
pub fn verify_presence(
    proof: &PresenceProof,
    expected_root: &Digest256,
    query: &ComponentId,
) -> Result<(), MerkleError> {
    if proof.entry.rendered != query.rendered().into_bytes() {
        return Err(MerkleError::QueryMismatch);
    }
    if proof.index_root != *expected_root {
        return Err(MerkleError::RootMismatch);
    }
    let leaf = leaf_hash(&proof.entry.salt, &proof.entry.rendered);
    let root = fold_checked(
        leaf,
        proof.entry.leaf_index,
        proof.leaf_count,
        &proof.entry.sibling_path,
    )?;
    if root != *expected_root {
        return Err(MerkleError::RootMismatch);
    }
    Ok(())
}

/// Prove that `query` is *not* listed, by opening the two adjacent index
/// leaves that bracket it.
pub fn prove_absence(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
    query: &ComponentId,
) -> Result<AbsenceProof, MerkleError> {
    let (contents, levels) = checked_index_levels(sbom, commitment)?;
    let rendered = query.rendered().into_bytes();
    let right = match contents.binary_search(&rendered) {
        Ok(_) => return Err(MerkleError::ActuallyPresent(query.rendered())),
        Err(insertion) => insertion,
    };
    // The sentinels guarantee 0 < insertion < contents.len() for any UTF-8
    // query, so both neighbours exist.
    debug_assert!(right > 0 && right < contents.len());
    Ok(AbsenceProof {
        query: query.rendered(),
        left_neighbor: index_entry(&contents, &levels, &commitment.salt_seed, right - 1),
        right_neighbor: index_entry(&contents, &levels, &commitment.salt_seed, right),
        index_root: commitment.index_root,
        leaf_count: commitment.index_leaf_count,
    })
}

/// Verify an absence proof for `query` against the committed index root.
pub fn verify_absence(
    proof: &AbsenceProof,
    expected_root: &Digest256,
    query: &ComponentId,
) -> Result<(), MerkleError> {
    if proof.query != query.rendered() {
        return Err(MerkleError::QueryMismatch);
    }
    if proof.index_root != *expected_root {
        return Err(MerkleError::RootMismatch);
    }
    let (left, right) = (&proof.left_neighbor, &proof.right_neighbor);
    if left.leaf_index + 1 != right.leaf_index {
        return Err(MerkleError::MalformedProof("neighbours are not adjacent"));
    }
    let query_bytes = query.rendered().into_bytes();
    if !(left.rendered < query_bytes && query_bytes < right.rendered) {
        return Err(MerkleError::MalformedProof(
            "neighbours do not bracket query",
        ));
    }
    for entry in [left, right] {
        let leaf = leaf_hash(&entry.salt, &entry.rendered);
        let root = fold_checked(
            leaf,
            entry.leaf_index,
            proof.leaf_count,
            &entry.sibling_path,
        )?;
        if root != *expected_root {
            return Err(MerkleError::RootMismatch);
        }
    }
    Ok(())
}
