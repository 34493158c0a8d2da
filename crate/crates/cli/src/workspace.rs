//! On-disk workspace: one simulated deployment per directory.
//!
//! A workspace holds the shared ledger (block log plus a persisted mempool),
//! a simulated clock, and one off-chain store per vendor. Vendors control
//! their own store directory — SBOM documents, salt seeds and issued
//! credentials never touch the ledger; only digests and roots do.
//!
//! Everything is deterministic given the workspace seed: identities derive
//! from `sha256("trustchain:<role>:<name>:<seed>")`, the genesis instant is
//! fixed, and time only moves when `ledger tick` is invoked.
//!
//! ```text
//! <workspace>/
//!   config.json             genesis parameters + workspace seed
//!   clock.json              simulated time, seconds since the unix epoch
//!   ledger/blocks.jsonl     the chain, one block per line
//!   ledger/pending.jsonl    submitted but not yet sealed transactions
//!   keys/<name>.json        signing seeds (plaintext: this is a simulation)
//!   vendors/<name>/         per-vendor off-chain store
//!     sboms/<label>.spdx.json
//!     commitments/<label>.json
//!     vcs/<vc-id>.json
//!   outbox/                 artifacts "in transit" between parties
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use trustchain_core::credentials::VerifiableCredential;
use trustchain_core::identity::{create_identity, Did, DidDocument, KeyPair};
use trustchain_core::ledger::{
    append_block, read_blocks, replay, DidRegisterPayload, LedgerConfig, LedgerNode, Transaction,
    TxKind,
};
use trustchain_core::merkle::{SaltSeed, SbomCommitment};
use trustchain_core::sha256;

use crate::CliError;

/// Genesis instant for every workspace: 2026-01-01T00:00:00Z.
pub const GENESIS_TIME: u64 = 1_767_225_600;

/// Workspace-level configuration written at `oversight init` time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub seed: u64,
    pub genesis_time: u64,
    pub oversight_did: Did,
    pub block_interval_secs: u64,
    pub penalty_threshold: u32,
}

impl WorkspaceConfig {
    pub fn ledger_config(&self) -> LedgerConfig {
        LedgerConfig {
            block_interval_secs: self.block_interval_secs,
            penalty_threshold: self.penalty_threshold,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClockFile {
    now: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct KeyFile {
    seed_hex: String,
    did: Did,
}

/// One pending (submitted, unsealed) transaction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PendingEntry {
    pub tx: Transaction,
    pub queued_at: u64,
}

/// An opened workspace.
pub struct Workspace {
    root: PathBuf,
    pub config: WorkspaceConfig,
}

fn io_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {e}"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(&path.display().to_string(), e))?;
    serde_json::from_slice(&bytes).map_err(|e| io_err(&path.display().to_string(), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializes");
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| io_err(&path.display().to_string(), e))
}

/// Derive a deterministic 32-byte signing seed for a named identity.
fn identity_seed(workspace_seed: u64, role: &str, name: &str) -> [u8; 32] {
    sha256(format!("trustchain:{role}:{name}:{workspace_seed}").as_bytes()).0
}

/// Credential ids contain `:` which is awkward in filenames; keep the
/// readable tail and replace separators.
pub fn vc_file_name(vc_id: &str) -> String {
    format!("{}.json", vc_id.replace(':', "_"))
}

impl Workspace {
    /// Initialize a fresh workspace: genesis block, oversight identity,
    /// clock at the genesis instant. Fails if one already exists here.
    pub fn init(
        root: &Path,
        seed: u64,
        block_interval_secs: u64,
        penalty_threshold: u32,
    ) -> Result<Workspace, CliError> {
        if root.join("config.json").exists() {
            return Err(CliError::Usage(format!(
                "workspace already initialized at {}",
                root.display()
            )));
        }
        for dir in ["ledger", "keys", "vendors", "outbox"] {
            fs::create_dir_all(root.join(dir)).map_err(|e| io_err("creating workspace", e))?;
        }

        let oversight_seed = identity_seed(seed, "oversight", "oversight");
        let (keypair, did, document) = create_identity(
            &oversight_seed,
            Some("https://oversight.example/api".into()),
        );
        let config = WorkspaceConfig {
            seed,
            genesis_time: GENESIS_TIME,
            oversight_did: did.clone(),
            block_interval_secs,
            penalty_threshold,
        };
        let registration = Transaction::signed(
            &keypair,
            did.clone(),
            TxKind::DidRegister,
            &DidRegisterPayload { document },
        );
        let node = LedgerNode::genesis(config.ledger_config(), registration, GENESIS_TIME)
            .map_err(|e| CliError::Verification(format!("genesis rejected: {e}")))?;

        write_json(&root.join("config.json"), &config)?;
        write_json(&root.join("clock.json"), &ClockFile { now: GENESIS_TIME })?;
        write_json(
            &root.join("keys/oversight.json"),
            &KeyFile {
                seed_hex: hex::encode(oversight_seed),
                did,
            },
        )?;
        append_block(&root.join("ledger/blocks.jsonl"), &node.blocks()[0])
            .map_err(|e| io_err("writing genesis block", e))?;
        fs::write(root.join("ledger/pending.jsonl"), b"")
            .map_err(|e| io_err("creating mempool", e))?;

        Ok(Workspace {
            root: root.to_path_buf(),
            config,
        })
    }

    /// Open an existing workspace.
    pub fn open(root: &Path) -> Result<Workspace, CliError> {
        let config_path = root.join("config.json");
        if !config_path.exists() {
            return Err(CliError::Usage(format!(
                "no workspace at {} (run `trustchain oversight init` first)",
                root.display()
            )));
        }
        let config = read_json(&config_path)?;
        Ok(Workspace {
            root: root.to_path_buf(),
            config,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    // ---- clock ----

    pub fn now(&self) -> Result<u64, CliError> {
        Ok(read_json::<ClockFile>(&self.root.join("clock.json"))?.now)
    }

    pub fn set_now(&self, now: u64) -> Result<(), CliError> {
        write_json(&self.root.join("clock.json"), &ClockFile { now })
    }

    // ---- keys ----

    /// The oversight keypair and its stable DID.
    pub fn oversight_key(&self) -> Result<(KeyPair, Did), CliError> {
        self.load_key("oversight")
    }

    /// A vendor's keypair and stable DID; the key file must exist (created
    /// by `vendor register`).
    pub fn vendor_key(&self, name: &str) -> Result<(KeyPair, Did), CliError> {
        self.load_key(name)
    }

    fn load_key(&self, name: &str) -> Result<(KeyPair, Did), CliError> {
        let path = self.root.join("keys").join(format!("{name}.json"));
        if !path.exists() {
            return Err(CliError::Usage(format!("no key registered for {name:?}")));
        }
        let file: KeyFile = read_json(&path)?;
        let seed: [u8; 32] = hex::decode(&file.seed_hex)
            .ok()
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| CliError::Io(format!("corrupt key file for {name:?}")))?;
        Ok((KeyPair::from_seed(&seed), file.did))
    }

    /// Create (or re-derive) a named vendor identity. Deterministic in the
    /// workspace seed, so re-running yields the same DID.
    pub fn create_vendor_identity(
        &self,
        name: &str,
    ) -> Result<(KeyPair, Did, DidDocument), CliError> {
        let seed = identity_seed(self.config.seed, "vendor", name);
        let (keypair, did, document) =
            create_identity(&seed, Some(format!("https://{name}.example/sbom-api")));
        write_json(
            &self.root.join("keys").join(format!("{name}.json")),
            &KeyFile {
                seed_hex: hex::encode(seed),
                did: did.clone(),
            },
        )?;
        Ok((keypair, did, document))
    }

    // ---- ledger ----

    fn blocks_path(&self) -> PathBuf {
        self.root.join("ledger/blocks.jsonl")
    }

    fn pending_path(&self) -> PathBuf {
        self.root.join("ledger/pending.jsonl")
    }

    /// Rebuild the node from the block log alone (pending txs stay in the
    /// on-disk mempool until [`Workspace::tick`] seals them).
    pub fn load_node(&self) -> Result<LedgerNode, CliError> {
        let blocks = read_blocks(&self.blocks_path()).map_err(|e| io_err("reading chain", e))?;
        replay(blocks, self.config.ledger_config())
            .map_err(|e| CliError::Verification(format!("chain replay failed: {e}")))
    }

    pub fn pending(&self) -> Result<Vec<PendingEntry>, CliError> {
        let text =
            fs::read_to_string(self.pending_path()).map_err(|e| io_err("reading mempool", e))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| io_err("parsing mempool", e)))
            .collect()
    }

    /// Queue a transaction in the on-disk mempool after checking it against
    /// current state (signature, duplicate, sender status).
    pub fn submit(&self, tx: Transaction) -> Result<(), CliError> {
        let mut node = self.load_node()?;
        let now = self.now()?;
        for entry in self.pending()? {
            node.submit_transaction(entry.tx, entry.queued_at)
                .map_err(|e| CliError::Verification(format!("mempool replay: {e}")))?;
        }
        node.submit_transaction(tx.clone(), now)
            .map_err(|e| CliError::Verification(format!("transaction rejected: {e}")))?;
        let line = serde_json::to_string(&PendingEntry { tx, queued_at: now }).expect("serializes");
        let mut file = fs::OpenOptions::new()
            .append(true)
            .open(self.pending_path())
            .map_err(|e| io_err("opening mempool", e))?;
        writeln!(file, "{line}").map_err(|e| io_err("appending to mempool", e))?;
        Ok(())
    }

    /// Advance the simulated clock one second at a time, sealing blocks as
    /// they fall due. Returns the blocks produced.
    pub fn tick(&self, seconds: u64) -> Result<Vec<trustchain_core::ledger::Block>, CliError> {
        let mut node = self.load_node()?;
        let pending = self.pending()?;
        for entry in &pending {
            node.submit_transaction(entry.tx.clone(), entry.queued_at)
                .map_err(|e| CliError::Verification(format!("mempool replay: {e}")))?;
        }
        let mut now = self.now()?;
        let mut produced = Vec::new();
        for _ in 0..seconds {
            now += 1;
            if let Some(block) = node.produce_block(now) {
                append_block(&self.blocks_path(), &block)
                    .map_err(|e| io_err("appending block", e))?;
                produced.push(block);
            }
        }
        self.set_now(now)?;
        let sealed: Vec<_> = produced
            .iter()
            .flat_map(|b| b.transactions.iter().map(|t| t.tx.tx_id))
            .collect();
        let remaining: Vec<&PendingEntry> = pending
            .iter()
            .filter(|e| !sealed.contains(&e.tx.tx_id))
            .collect();
        let mut out = String::new();
        for entry in remaining {
            out.push_str(&serde_json::to_string(entry).expect("serializes"));
            out.push('\n');
        }
        fs::write(self.pending_path(), out).map_err(|e| io_err("rewriting mempool", e))?;
        Ok(produced)
    }

    // ---- vendor off-chain store ----

    pub fn vendor_dir(&self, name: &str) -> PathBuf {
        self.root.join("vendors").join(name)
    }

    pub fn store_sbom(&self, vendor: &str, label: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let dir = self.vendor_dir(vendor).join("sboms");
        fs::create_dir_all(&dir).map_err(|e| io_err("creating sbom store", e))?;
        let path = dir.join(format!("{label}.spdx.json"));
        fs::write(&path, bytes).map_err(|e| io_err("storing sbom", e))?;
        Ok(path)
    }

    pub fn load_sbom_bytes(&self, vendor: &str, label: &str) -> Result<Vec<u8>, CliError> {
        let path = self
            .vendor_dir(vendor)
            .join("sboms")
            .join(format!("{label}.spdx.json"));
        fs::read(&path).map_err(|e| io_err(&path.display().to_string(), e))
    }

    pub fn store_commitment(
        &self,
        vendor: &str,
        label: &str,
        commitment: &SbomCommitment,
    ) -> Result<(), CliError> {
        let dir = self.vendor_dir(vendor).join("commitments");
        fs::create_dir_all(&dir).map_err(|e| io_err("creating commitment store", e))?;
        write_json(&dir.join(format!("{label}.json")), commitment)
    }

    pub fn load_commitment(&self, vendor: &str, label: &str) -> Result<SbomCommitment, CliError> {
        read_json(
            &self
                .vendor_dir(vendor)
                .join("commitments")
                .join(format!("{label}.json")),
        )
    }

    /// Deterministic per-document salt seed, private to the vendor's store.
    pub fn salt_seed(&self, vendor: &str, label: &str) -> SaltSeed {
        SaltSeed::derive(
            format!("trustchain:salt:{vendor}:{label}:{}", self.config.seed).as_bytes(),
        )
    }

    pub fn store_vc(&self, vendor: &str, vc: &VerifiableCredential) -> Result<PathBuf, CliError> {
        let dir = self.vendor_dir(vendor).join("vcs");
        fs::create_dir_all(&dir).map_err(|e| io_err("creating vc store", e))?;
        let path = dir.join(vc_file_name(&vc.id));
        write_json(&path, vc)?;
        Ok(path)
    }

    /// Find a stored credential by id, searching every vendor store.
    pub fn find_vc(&self, vc_id: &str) -> Result<Option<VerifiableCredential>, CliError> {
        Ok(self.all_vcs()?.remove(vc_id))
    }

    /// Every credential stored in any vendor's off-chain store, keyed by id.
    /// This doubles as the resolver for trust-chain walks.
    pub fn all_vcs(&self) -> Result<BTreeMap<String, VerifiableCredential>, CliError> {
        let mut out = BTreeMap::new();
        let vendors_dir = self.root.join("vendors");
        let vendors = match fs::read_dir(&vendors_dir) {
            Ok(iter) => iter,
            Err(_) => return Ok(out),
        };
        for vendor in vendors.flatten() {
            let vcs = vendor.path().join("vcs");
            let Ok(files) = fs::read_dir(&vcs) else {
                continue;
            };
            for file in files.flatten() {
                if file.path().extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let vc: VerifiableCredential = read_json(&file.path())?;
                out.insert(vc.id.clone(), vc);
            }
        }
        Ok(out)
    }

    /// Path for an artifact "sent" between parties.
    pub fn outbox_path(&self, name: &str) -> PathBuf {
        self.root.join("outbox").join(name)
    }
}
