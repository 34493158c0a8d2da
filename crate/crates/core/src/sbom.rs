//! SPDX 2.2 JSON ingestion into a canonical attribute list.
//!
//! Merkle commitments need a stable, order-independent view of an SBOM: two
//! documents that differ only in JSON key order or whitespace must commit to
//! the same root. [`parse_spdx`] therefore flattens a document into a sorted
//! list of `(path, value)` pairs:
//!
//! * paths are the slash-joined route from the document root to a scalar,
//!   with array elements addressed by their decimal index
//!   (`packages/0/versionInfo`);
//! * only scalars become attributes — strings are taken verbatim, numbers are
//!   rendered in shortest round-trip decimal form, booleans as `true`/`false`,
//!   and `null` as the empty string;
//! * key segments are percent-escaped so that a path never contains
//!   whitespace, control bytes, or an unescaped `/`, keeping the
//!   path/value separator used by the leaf hash unambiguous.
//!
//! The module also extracts `name@version` component identifiers from the
//! `packages` array (they feed the component index tree) and checks the NTIA
//! minimum-elements baseline. NTIA's guidance is often summarised as "eight
//! pivotal data fields" but enumerates seven concrete ones; the seven
//! enumerated fields are what [`check_ntia_minimum`] tests for.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::digest::{sha256, Digest256};

/// The only SPDX version the ingester accepts.
pub const SUPPORTED_SPDX_VERSION: &str = "SPDX-2.2";

/// Errors produced while ingesting an SPDX document.
#[derive(Debug, Error)]
pub enum SbomError {
    /// The input was not parseable JSON (or not valid UTF-8).
    #[error("input is not valid JSON: {0}")]
    MalformedJson(String),
    /// The JSON parsed but carries no top-level `spdxVersion` string.
    #[error("document is not an SPDX document (missing spdxVersion)")]
    NotSpdx,
    /// The document declares an SPDX version other than `SPDX-2.2`.
    #[error("unsupported SPDX version {0:?} (expected {SUPPORTED_SPDX_VERSION:?})")]
    UnsupportedVersion(String),
}

/// A `name@version` identifier for one package in the SBOM.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId {
    name: String,
    version: String,
}

impl ComponentId {
    /// Build an identifier; `name` must be non-empty, `version` may be empty
    /// (SPDX packages are not required to carry `versionInfo`).
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Option<ComponentId> {
        let name = name.into();
        let version = version.into();
        if name.is_empty() || version.contains('@') {
            return None;
        }
        Some(ComponentId { name, version })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// The `name@version` form used everywhere a component is hashed,
    /// compared, or displayed.
    pub fn rendered(&self) -> String {
        format!("{}@{}", self.name, self.version)
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.version)
    }
}

impl Serialize for ComponentId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.rendered())
    }
}

impl<'de> Deserialize<'de> for ComponentId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        // The version never contains '@', so the last '@' is the separator.
        let (name, version) = s
            .rsplit_once('@')
            .ok_or_else(|| serde::de::Error::custom("component id must be name@version"))?;
        ComponentId::new(name, version)
            .ok_or_else(|| serde::de::Error::custom("component id has an empty name"))
    }
}

/// The canonical, order-independent form of one SBOM document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CanonicalSbom {
    /// `(path, value)` pairs, strictly sorted by path bytes, no duplicates.
    pub attributes: Vec<(String, String)>,
    /// Sorted, deduplicated `name@version` identifiers from `packages`.
    pub component_ids: Vec<ComponentId>,
    /// SHA-256 of the exact source bytes the document was parsed from.
    pub source_digest: Digest256,
}

impl CanonicalSbom {
    /// Look up the value at `path`, if the attribute exists.
    pub fn value_at(&self, path: &str) -> Option<&str> {
        self.attributes
            .binary_search_by(|(p, _)| p.as_str().cmp(path))
            .ok()
            .map(|i| self.attributes[i].1.as_str())
    }
}

/// One NTIA minimum field, with its mapping onto SPDX 2.2 locations.
///
/// Per-package fields count as present only when the document has at least
/// one package and *every* package carries the field.
const NTIA_FIELDS: [(&str, NtiaRule); 7] = [
    ("supplier name", NtiaRule::PerPackage("supplier")),
    ("component name", NtiaRule::PerPackage("name")),
    ("component version", NtiaRule::PerPackage("versionInfo")),
    ("unique identifier", NtiaRule::PerPackage("SPDXID")),
    (
        "dependency relationship",
        NtiaRule::PathPrefix("relationships/"),
    ),
    (
        "SBOM author",
        NtiaRule::PathPrefix("creationInfo/creators/"),
    ),
    ("timestamp", NtiaRule::ExactPath("creationInfo/created")),
];

enum NtiaRule {
    PerPackage(&'static str),
    PathPrefix(&'static str),
    ExactPath(&'static str),
}

/// Result of the NTIA minimum-elements check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplianceReport {
    pub compliant: bool,
    /// Human-readable names of the fields that are absent, in the fixed
    /// order of the checklist.
    pub missing: Vec<String>,
}

/// SHA-256 of raw SBOM bytes, exactly as shared.
pub fn sbom_digest(bytes: &[u8]) -> Digest256 {
    sha256(bytes)
}

/// Parse an SPDX 2.2 JSON document into its canonical form.
pub fn parse_spdx(bytes: &[u8]) -> Result<CanonicalSbom, SbomError> {
    let doc: Value =
        serde_json::from_slice(bytes).map_err(|e| SbomError::MalformedJson(e.to_string()))?;
    let version = doc
        .as_object()
        .and_then(|o| o.get("spdxVersion"))
        .ok_or(SbomError::NotSpdx)?;
    let version = version.as_str().ok_or(SbomError::NotSpdx)?;
    if version != SUPPORTED_SPDX_VERSION {
        return Err(SbomError::UnsupportedVersion(version.to_string()));
    }

    let mut attributes = Vec::new();
    flatten(&doc, String::new(), &mut attributes);
    attributes.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
    debug_assert!(
        attributes.windows(2).all(|w| w[0].0 < w[1].0),
        "escaped paths must be unique"
    );

    let mut component_ids: Vec<ComponentId> = doc
        .get("packages")
        .and_then(Value::as_array)
        .map(|packages| {
            packages
                .iter()
                .filter_map(|pkg| {
                    let name = pkg.get("name")?.as_str()?;
                    let version = pkg
                        .get("versionInfo")
                        .and_then(Value::as_str)
                        .unwrap_or_default();
                    ComponentId::new(name, version)
                })
                .collect()
        })
        .unwrap_or_default();
    component_ids.sort();
    component_ids.dedup();

    Ok(CanonicalSbom {
        attributes,
        component_ids,
        source_digest: sbom_digest(bytes),
    })
}

/// Check the seven enumerated NTIA minimum fields against a canonical SBOM.
pub fn check_ntia_minimum(sbom: &CanonicalSbom) -> ComplianceReport {
    // Recover the set of package indices and which per-package keys each has.
    let mut packages: std::collections::BTreeMap<&str, Vec<&str>> = Default::default();
    for (path, _) in &sbom.attributes {
        let mut parts = path.splitn(3, '/');
        if parts.next() == Some("packages") {
            if let (Some(index), Some(field)) = (parts.next(), parts.next()) {
                packages.entry(index).or_default().push(field);
            }
        }
    }

    let has_path = |p: &str| sbom.attributes.iter().any(|(path, _)| path == p);
    let has_prefix = |p: &str| sbom.attributes.iter().any(|(path, _)| path.starts_with(p));

    let mut missing = Vec::new();
    for (label, rule) in NTIA_FIELDS {
        let present = match rule {
            NtiaRule::PerPackage(field) => {
                !packages.is_empty()
                    && packages.values().all(|fields| {
                        fields
                            .iter()
                            .any(|f| *f == field || f.starts_with(&format!("{field}/")))
                    })
            }
            NtiaRule::PathPrefix(prefix) => has_prefix(prefix),
            NtiaRule::ExactPath(path) => has_path(path),
        };
        if !present {
            missing.push(label.to_string());
        }
    }

    ComplianceReport {
        compliant: missing.is_empty(),
        missing,
    }
}

/// Recursively collect scalar attributes under `prefix`.
fn flatten(value: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let segment = escape_segment(key);
                let path = if prefix.is_empty() {
                    segment
                } else {
                    format!("{prefix}/{segment}")
                };
                flatten(child, path, out);
            }
        }
        Value::Array(items) => {
            for (index, child) in items.iter().enumerate() {
                let path = if prefix.is_empty() {
                    index.to_string()
                } else {
                    format!("{prefix}/{index}")
                };
                flatten(child, path, out);
            }
        }
        Value::Null => out.push((prefix, String::new())),
        Value::Bool(b) => out.push((prefix, b.to_string())),
        Value::Number(n) => out.push((prefix, n.to_string())),
        Value::String(s) => out.push((prefix, s.clone())),
    }
}

/// Percent-escape a key so the joined path stays unambiguous: `/`, `%`,
/// space, DEL, and all C0 control bytes are written as `%XX`.
fn escape_segment(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    for &byte in key.as_bytes() {
        match byte {
            0x00..=0x20 | 0x7F | b'%' | b'/' => {
                out.push_str(&format!("%{byte:02X}"));
            }
            _ => out.push(byte as char),
        }
    }
    out
}
