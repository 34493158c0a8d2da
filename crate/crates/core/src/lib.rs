//! Supply-chain transparency toolkit built around verifiable SBOM credentials.
//!
//! The crate is organised as a pipeline:
//!
//! * [`sbom`] ingests SPDX 2.2 JSON documents into a canonical, order-independent
//!   attribute list and checks the NTIA minimum-field baseline.
//! * [`merkle`] commits to a canonical SBOM with salted Merkle trees and produces
//!   selective-disclosure, presence, and absence proofs.
//! * [`identity`] provides Ed25519-backed decentralized identifiers
//!   (`did:sbomx:…`) and DID document lifecycle payloads.
//! * [`credentials`] wraps commitments into signed verifiable credentials
//!   (eligibility, component SBOM, system SBOM) and walks trust chains.
//! * [`ledger`] is a deterministic, in-process permissioned ledger holding the
//!   DID / eligibility / SBOM / penalty registries with append-only persistence.
//!
//! All hashing is SHA-256, all signatures are Ed25519, and every byte that is
//! hashed or signed goes through the canonical JSON rules in [`canonical`], so
//! roots, digests, and signatures are reproducible across processes.

pub mod canonical;
pub mod credentials;
pub mod digest;
pub mod identity;
pub mod ledger;
pub mod merkle;
pub mod sbom;

pub use digest::{sha256, Digest256};
