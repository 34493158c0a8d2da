//! The operations behind each `trustchain <role> <verb>` command.
//!
//! Every function here both prints its human-readable result and returns the
//! produced artifact, so the scenario runner and the test suite can drive the
//! exact code the binary runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use trustchain_core::credentials::{
    issue_eligibility_vc, issue_sbom_vc, revoke_vc, rfc3339_utc, update_sbom_vc, vc_digest,
    verify_trust_chain, verify_vc, ChainNode, ChainReport, CheckName, EmbeddedRef, SbomClaims,
    SbomMetadata, VcClaims, VcKind, VerifiableCredential, VerificationOutcome,
};
use trustchain_core::identity::Did;
use trustchain_core::ledger::{
    query_registry, read_blocks, replay, Block, DidRegisterPayload, LedgerState, PenaltyPayload,
    RegistryKind, Transaction, TxKind,
};
use trustchain_core::merkle::{
    build_commitment, prove_absence, prove_disclosure, prove_presence, verify_absence,
    verify_disclosure, verify_presence, AbsenceProof, DisclosureProof, MerkleError, PresenceProof,
    SbomCommitment,
};
use trustchain_core::sbom::{check_ntia_minimum, parse_spdx, CanonicalSbom, ComponentId};
use trustchain_core::sha256;

use crate::workspace::Workspace;
use crate::CliError;

/// Membership proof envelope written by `vendor prove-component`: the two
/// proof shapes share a file format, discriminated by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "proof", rename_all = "snake_case")]
pub enum ComponentProof {
    Presence(PresenceProof),
    Absence(AbsenceProof),
}

fn io_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {e}"))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializes");
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| io_err(&path.display().to_string(), e))
}

fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(&path.display().to_string(), e))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Stable snake_case label for a verification check, used in output lines.
pub fn check_label(name: CheckName) -> &'static str {
    match name {
        CheckName::Signature => "signature",
        CheckName::IssuerActive => "issuer_active",
        CheckName::NotRevoked => "not_revoked",
        CheckName::NotExpired => "not_expired",
        CheckName::EligibilityChain => "eligibility_chain",
    }
}

/// Print the five credential checks; return the first failure as
/// `"<label>: <detail>"`.
fn print_outcome(outcome: &VerificationOutcome) -> Option<String> {
    let mut first_failure = None;
    for check in &outcome.checks {
        let label = check_label(check.name);
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("check {label}: {status} — {}", check.detail);
        if !check.passed && first_failure.is_none() {
            first_failure = Some(format!("{label}: {}", check.detail));
        }
    }
    first_failure
}

fn resolve_vc(ws: &Workspace, vc_id: &str) -> Result<VerifiableCredential, CliError> {
    ws.find_vc(vc_id)?
        .ok_or_else(|| CliError::Usage(format!("no stored credential with id {vc_id}")))
}

fn sbom_claims_of(vc: &VerifiableCredential) -> Result<&SbomClaims, CliError> {
    match &vc.claims {
        VcClaims::Sbom(claims) => Ok(claims),
        VcClaims::Eligibility(_) => Err(CliError::Usage(format!(
            "{} is an eligibility credential, not an SBOM credential",
            vc.id
        ))),
    }
}

/// Parse `name@version` (the version may be empty: `name@`). A bare name is
/// also accepted and means an empty version.
pub fn parse_component(s: &str) -> Result<ComponentId, CliError> {
    let (name, version) = match s.rsplit_once('@') {
        Some(pair) => pair,
        None => (s, ""),
    };
    ComponentId::new(name, version)
        .ok_or_else(|| CliError::Usage(format!("invalid component id {s:?}")))
}

// ---------------------------------------------------------------- oversight

/// `oversight init` — create the workspace, genesis block and authority key.
pub fn oversight_init(
    root: &Path,
    seed: u64,
    block_interval_secs: u64,
    penalty_threshold: u32,
) -> Result<Workspace, CliError> {
    if block_interval_secs == 0 {
        return Err(CliError::Usage("block interval must be positive".into()));
    }
    let ws = Workspace::init(root, seed, block_interval_secs, penalty_threshold)?;
    println!(
        "initialized workspace at {} (oversight {}, block interval {}s, penalty threshold {})",
        root.display(),
        ws.config.oversight_did.rendered(),
        block_interval_secs,
        penalty_threshold
    );
    Ok(ws)
}

/// `oversight grant-eligibility` — issue an eligibility credential to a
/// registered vendor and queue its registration.
pub fn grant_eligibility(
    ws: &Workspace,
    vendor_name: &str,
    criteria: &[String],
    valid_days: u64,
) -> Result<VerifiableCredential, CliError> {
    let (authority, authority_did) = ws.oversight_key()?;
    let (_, vendor_did) = ws.vendor_key(vendor_name)?;
    let node = ws.load_node()?;
    let now = ws.now()?;
    let (vc, tx) = issue_eligibility_vc(
        &authority,
        &authority_did,
        &vendor_did,
        criteria.to_vec(),
        now + valid_days * 86_400,
        now,
        node.state(),
    )
    .map_err(|e| CliError::Verification(e.to_string()))?;
    ws.submit(tx)?;
    let path = ws.store_vc(vendor_name, &vc)?;
    println!(
        "granted eligibility {} to {} (valid until {}), stored at {}",
        vc.id,
        vendor_did.rendered(),
        rfc3339_utc(now + valid_days * 86_400),
        path.display()
    );
    Ok(vc)
}

/// `oversight revoke` / `vendor revoke` — queue a revocation of a registered
/// credential. `actor` is a key name (`oversight` or a vendor).
pub fn revoke(ws: &Workspace, actor: &str, vc_id: &str, reason: &str) -> Result<(), CliError> {
    let (keypair, did) = ws.vendor_key(actor)?;
    let node = ws.load_node()?;
    let tx = revoke_vc(&keypair, &did, vc_id, reason, node.state())
        .map_err(|e| CliError::Verification(e.to_string()))?;
    ws.submit(tx)?;
    println!("queued revocation of {vc_id}: {reason}");
    Ok(())
}

/// `oversight penalty` — record penalty points against a vendor.
pub fn penalty(
    ws: &Workspace,
    vendor_name: &str,
    points: u32,
    reason: &str,
) -> Result<(), CliError> {
    let (authority, authority_did) = ws.oversight_key()?;
    let (_, vendor_did) = ws.vendor_key(vendor_name)?;
    let tx = Transaction::signed(
        &authority,
        authority_did,
        TxKind::PenaltyRecord,
        &PenaltyPayload {
            vendor: vendor_did.clone(),
            points,
            reason: reason.to_string(),
        },
    );
    ws.submit(tx)?;
    println!(
        "queued {points} penalty point(s) against {}: {reason}",
        vendor_did.rendered()
    );
    Ok(())
}

// ------------------------------------------------------------------- vendor

/// `vendor register` — create a vendor identity and queue its registration.
pub fn vendor_register(ws: &Workspace, name: &str) -> Result<Did, CliError> {
    let (keypair, did, document) = ws.create_vendor_identity(name)?;
    let tx = Transaction::signed(
        &keypair,
        did.clone(),
        TxKind::DidRegister,
        &DidRegisterPayload { document },
    );
    ws.submit(tx)?;
    println!("registered vendor {name} as {}", did.rendered());
    Ok(did)
}

/// `vendor import-sbom` — parse an SPDX document into the vendor's store,
/// gate it on the seven-field minimum, and commit to it.
pub fn import_sbom(
    ws: &Workspace,
    vendor: &str,
    file: &Path,
    label: &str,
    allow_noncompliant: bool,
) -> Result<SbomCommitment, CliError> {
    ws.vendor_key(vendor)?; // fail early if the vendor does not exist
    let bytes = fs::read(file).map_err(|e| io_err(&file.display().to_string(), e))?;
    let sbom = parse_spdx(&bytes).map_err(|e| CliError::Usage(format!("parsing SPDX: {e}")))?;
    let report = check_ntia_minimum(&sbom);
    if report.compliant {
        println!("minimum-element check: PASS (7/7 fields present)");
    } else {
        println!(
            "minimum-element check: FAIL — missing {}",
            report.missing.join(", ")
        );
        if !allow_noncompliant {
            return Err(CliError::Verification(format!(
                "SBOM is missing minimum fields: {}",
                report.missing.join(", ")
            )));
        }
        println!("importing anyway (--allow-noncompliant)");
    }
    let stored = ws.store_sbom(vendor, label, &bytes)?;
    let commitment = build_commitment(&sbom, ws.salt_seed(vendor, label))
        .map_err(|e| CliError::Verification(e.to_string()))?;
    ws.store_commitment(vendor, label, &commitment)?;
    println!(
        "imported {} as {label}: digest {}, {} attributes, {} components",
        stored.display(),
        sbom.source_digest.to_hex(),
        sbom.attributes.len(),
        sbom.component_ids.len()
    );
    println!(
        "attribute root {}, index root {}",
        commitment.attribute_root.to_hex(),
        commitment.index_root.to_hex()
    );
    Ok(commitment)
}

fn load_sbom_and_commitment(
    ws: &Workspace,
    vendor: &str,
    label: &str,
) -> Result<(Vec<u8>, CanonicalSbom, SbomCommitment), CliError> {
    let bytes = ws.load_sbom_bytes(vendor, label)?;
    let sbom = parse_spdx(&bytes).map_err(|e| CliError::Io(format!("stored SBOM: {e}")))?;
    let commitment = ws.load_commitment(vendor, label)?;
    Ok((bytes, sbom, commitment))
}

/// Options for `vendor issue-vc`.
pub struct IssueOptions {
    pub kind: VcKind,
    pub product: String,
    pub product_version: String,
    pub supplier: Option<String>,
    pub storage_uri: Option<String>,
    /// Embed the vendor's live eligibility credential by reference.
    pub embed_eligibility: bool,
    /// Upstream SBOM credentials to embed by id.
    pub embed: Vec<String>,
    /// Id of the credential this one replaces, if any.
    pub supersedes: Option<String>,
    /// With `supersedes`: keep the old credential active for versioning.
    pub retain_old: bool,
}

/// The vendor's newest live eligibility credential, from its own store.
fn live_eligibility(
    ws: &Workspace,
    vendor_did: &Did,
    state: &LedgerState,
    now: u64,
) -> Result<VerifiableCredential, CliError> {
    let mut best: Option<(u64, VerifiableCredential)> = None;
    for vc in ws.all_vcs()?.into_values() {
        if vc.vc_kind != VcKind::Eligibility || vc.subject != *vendor_did {
            continue;
        }
        let Some(record) = state.elig_registry.get(&vc.id) else {
            continue;
        };
        if record.status != trustchain_core::ledger::VcStatus::Active
            || record.valid_until_secs < now
            || record.vc_digest != vc_digest(&vc)
        {
            continue;
        }
        if best
            .as_ref()
            .is_none_or(|(v, _)| *v < record.valid_until_secs)
        {
            best = Some((record.valid_until_secs, vc));
        }
    }
    best.map(|(_, vc)| vc).ok_or_else(|| {
        CliError::Verification(format!(
            "no live eligibility credential stored for {}",
            vendor_did.rendered()
        ))
    })
}

/// `vendor issue-vc` — issue a component or system SBOM credential over an
/// imported document and queue its registration.
pub fn issue_vc(
    ws: &Workspace,
    vendor: &str,
    label: &str,
    options: IssueOptions,
) -> Result<VerifiableCredential, CliError> {
    let (keypair, vendor_did) = ws.vendor_key(vendor)?;
    let node = ws.load_node()?;
    let state = node.state();
    let now = ws.now()?;
    let (_, sbom, commitment) = load_sbom_and_commitment(ws, vendor, label)?;

    let mut embedded_refs = Vec::new();
    if options.embed_eligibility {
        let elig = live_eligibility(ws, &vendor_did, state, now)?;
        embedded_refs.push(EmbeddedRef {
            vc_id: elig.id.clone(),
            vc_digest: vc_digest(&elig),
        });
    }
    for id in &options.embed {
        let vc = resolve_vc(ws, id)?;
        embedded_refs.push(EmbeddedRef {
            vc_id: vc.id.clone(),
            vc_digest: vc_digest(&vc),
        });
    }

    let created = sbom
        .value_at("creationInfo/created")
        .map(str::to_string)
        .unwrap_or_else(|| rfc3339_utc(now));
    let claims = SbomClaims {
        sbom_digest: sbom.source_digest,
        attribute_root: commitment.attribute_root,
        index_root: commitment.index_root,
        metadata: SbomMetadata {
            supplier: options.supplier.unwrap_or_else(|| vendor.to_string()),
            product_name: options.product,
            product_version: options.product_version,
            author_did: vendor_did.clone(),
            created,
        },
        storage_uri: options
            .storage_uri
            .unwrap_or_else(|| format!("file://vendors/{vendor}/sboms/{label}.spdx.json")),
    };

    let (vc, transactions) = match &options.supersedes {
        None => {
            let (vc, tx) = issue_sbom_vc(
                &keypair,
                &vendor_did,
                options.kind,
                claims,
                embedded_refs,
                now,
                state,
            )
            .map_err(|e| CliError::Verification(e.to_string()))?;
            (vc, vec![tx])
        }
        Some(old_id) => update_sbom_vc(
            &keypair,
            &vendor_did,
            old_id,
            options.kind,
            claims,
            embedded_refs,
            options.retain_old,
            now,
            state,
        )
        .map_err(|e| CliError::Verification(e.to_string()))?,
    };
    for tx in transactions {
        ws.submit(tx)?;
    }
    let path = ws.store_vc(vendor, &vc)?;
    println!(
        "issued {} ({}) for {label}, stored at {}",
        vc.id,
        vc.vc_kind.as_str(),
        path.display()
    );
    if let Some(old_id) = &options.supersedes {
        println!(
            "supersedes {old_id}{}",
            if options.retain_old {
                " (old credential retained)"
            } else {
                " (old credential revoked)"
            }
        );
    }
    Ok(vc)
}

/// `vendor disclose` — open the named attribute paths into a proof file.
pub fn disclose(
    ws: &Workspace,
    vendor: &str,
    label: &str,
    paths: &[String],
    out: &Path,
) -> Result<DisclosureProof, CliError> {
    let (_, sbom, commitment) = load_sbom_and_commitment(ws, vendor, label)?;
    let proof = prove_disclosure(&sbom, &commitment, paths)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    write_json_file(out, &proof)?;
    println!(
        "disclosed {} attribute(s) of {label} ({} sibling digests) to {}",
        proof.entries.len(),
        proof
            .entries
            .iter()
            .map(|e| e.sibling_path.len())
            .sum::<usize>(),
        out.display()
    );
    Ok(proof)
}

/// `vendor prove-component` — prove a component present or absent. The proof
/// kind is chosen by what the SBOM actually contains.
pub fn prove_component(
    ws: &Workspace,
    vendor: &str,
    label: &str,
    component: &ComponentId,
    out: &Path,
) -> Result<ComponentProof, CliError> {
    let (_, sbom, commitment) = load_sbom_and_commitment(ws, vendor, label)?;
    let proof = match prove_presence(&sbom, &commitment, component) {
        Ok(presence) => ComponentProof::Presence(presence),
        Err(MerkleError::NotPresent(_)) => ComponentProof::Absence(
            prove_absence(&sbom, &commitment, component)
                .map_err(|e| CliError::Verification(e.to_string()))?,
        ),
        Err(e) => return Err(CliError::Verification(e.to_string())),
    };
    let kind = match &proof {
        ComponentProof::Presence(_) => "presence",
        ComponentProof::Absence(_) => "absence",
    };
    write_json_file(out, &proof)?;
    println!(
        "{kind} proof for {} written to {}",
        component.rendered(),
        out.display()
    );
    Ok(proof)
}

/// `vendor send-sbom` — place the exact stored SBOM bytes at `out`,
/// simulating an off-chain transfer to a procurer.
pub fn send_sbom(ws: &Workspace, vendor: &str, label: &str, out: &Path) -> Result<(), CliError> {
    let bytes = ws.load_sbom_bytes(vendor, label)?;
    fs::write(out, &bytes).map_err(|e| io_err(&out.display().to_string(), e))?;
    println!(
        "sent {label} ({} bytes, digest {}) to {}",
        bytes.len(),
        sha256(&bytes).to_hex(),
        out.display()
    );
    Ok(())
}

// ----------------------------------------------------------------- procurer

fn verified_state(ws: &Workspace) -> Result<(LedgerState, u64), CliError> {
    let node = ws.load_node()?;
    Ok((node.state().clone(), ws.now()?))
}

/// `procurer verify-full` — full-disclosure flow: the received document must
/// hash to the credential's pinned digest, and the credential must verify.
pub fn verify_full(ws: &Workspace, vc_id: &str, sbom_file: &Path) -> Result<(), CliError> {
    let vc = resolve_vc(ws, vc_id)?;
    let claims = sbom_claims_of(&vc)?;
    let (state, now) = verified_state(ws)?;
    let bytes = fs::read(sbom_file).map_err(|e| io_err(&sbom_file.display().to_string(), e))?;

    let digest = sha256(&bytes);
    let digest_ok = digest == claims.sbom_digest;
    println!(
        "check sbom_digest: {} — received {}, credential pins {}",
        if digest_ok { "PASS" } else { "FAIL" },
        digest.to_hex(),
        claims.sbom_digest.to_hex()
    );
    let outcome = verify_vc(&vc, &state, now);
    let vc_failure = print_outcome(&outcome);
    if !digest_ok {
        return Err(CliError::Verification(
            "sbom_digest: received document does not match the credential".into(),
        ));
    }
    if let Some(failure) = vc_failure {
        return Err(CliError::Verification(failure));
    }
    println!("full disclosure of {vc_id}: VERIFIED");
    Ok(())
}

/// `procurer verify-disclosure` — check a selective-disclosure proof against
/// the credential's committed attribute root, then the credential itself.
pub fn verify_disclosure_cmd(
    ws: &Workspace,
    vc_id: &str,
    proof_file: &Path,
) -> Result<(), CliError> {
    let vc = resolve_vc(ws, vc_id)?;
    let claims = sbom_claims_of(&vc)?;
    let (state, now) = verified_state(ws)?;
    let proof: DisclosureProof = read_json_file(proof_file)?;

    match verify_disclosure(&proof, &claims.attribute_root) {
        Ok(pairs) => {
            println!(
                "check merkle_proof: PASS — {} attribute(s) verified",
                pairs.len()
            );
            for (path, value) in &pairs {
                println!("  {path} = {value}");
            }
        }
        Err(e) => {
            println!("check merkle_proof: FAIL — {e:?}: {e}");
            return Err(CliError::Verification(format!("merkle_proof: {e}")));
        }
    }
    let outcome = verify_vc(&vc, &state, now);
    if let Some(failure) = print_outcome(&outcome) {
        return Err(CliError::Verification(failure));
    }
    println!("selective disclosure against {vc_id}: VERIFIED");
    Ok(())
}

/// `procurer verify-component` — check a presence or absence proof against
/// the credential's committed index root.
pub fn verify_component(
    ws: &Workspace,
    vc_id: &str,
    proof_file: &Path,
    component: &ComponentId,
) -> Result<(), CliError> {
    let vc = resolve_vc(ws, vc_id)?;
    let claims = sbom_claims_of(&vc)?;
    let (state, now) = verified_state(ws)?;
    let proof: ComponentProof = read_json_file(proof_file)?;

    let (kind, result) = match &proof {
        ComponentProof::Presence(p) => (
            "presence",
            verify_presence(p, &claims.index_root, component),
        ),
        ComponentProof::Absence(p) => ("absence", verify_absence(p, &claims.index_root, component)),
    };
    match result {
        Ok(()) => println!(
            "check index_proof: PASS — {kind} of {}",
            component.rendered()
        ),
        Err(e) => {
            println!("check index_proof: FAIL — {e:?}: {e}");
            return Err(CliError::Verification(format!("index_proof: {e}")));
        }
    }
    let outcome = verify_vc(&vc, &state, now);
    if let Some(failure) = print_outcome(&outcome) {
        return Err(CliError::Verification(failure));
    }
    println!(
        "component {} of {vc_id}: {} (VERIFIED)",
        component.rendered(),
        if kind == "presence" {
            "present"
        } else {
            "absent"
        }
    );
    Ok(())
}

fn print_chain_node(node: &ChainNode, depth: usize) {
    let indent = "  ".repeat(depth);
    let mut notes = Vec::new();
    if !node.digest_ok {
        notes.push("embedded digest mismatch".to_string());
    }
    let failing: Vec<&str> = node
        .outcome
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| check_label(c.name))
        .collect();
    if !failing.is_empty() {
        notes.push(format!("failing: {}", failing.join(", ")));
    }
    if node.declared_unverified {
        notes.push("upstream declared unverified".to_string());
    }
    let verdict = if node.digest_ok && node.outcome.valid {
        "valid"
    } else {
        "INVALID"
    };
    let suffix = if notes.is_empty() {
        String::new()
    } else {
        format!(" [{}]", notes.join("; "))
    };
    println!(
        "{indent}{} ({}) — {verdict}{suffix}",
        node.vc_id,
        node.kind.as_str()
    );
    for child in &node.children {
        print_chain_node(child, depth + 1);
    }
}

/// `procurer verify-chain` — resolve and verify the whole embedded-reference
/// tree below a credential.
pub fn verify_chain(
    ws: &Workspace,
    vc_id: &str,
    max_depth: usize,
) -> Result<ChainReport, CliError> {
    let vc = resolve_vc(ws, vc_id)?;
    let (state, now) = verified_state(ws)?;
    let resolver = ws.all_vcs()?;
    let report = verify_trust_chain(&vc, &resolver, &state, max_depth, now)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    print_chain_node(&report.root, 0);
    if report.valid {
        println!(
            "trust chain of {vc_id}: VALID ({} credential(s))",
            report.root.flatten().len()
        );
        Ok(report)
    } else {
        let first_bad = report
            .root
            .flatten()
            .into_iter()
            .find(|n| !n.digest_ok || !n.outcome.valid)
            .expect("an invalid chain has an invalid node");
        let detail = if !first_bad.digest_ok {
            format!("{}: embedded digest mismatch", first_bad.vc_id)
        } else {
            let failing = first_bad
                .outcome
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {}", check_label(c.name), c.detail))
                .collect::<Vec<_>>()
                .join("; ");
            format!("{}: {failing}", first_bad.vc_id)
        };
        println!("trust chain of {vc_id}: INVALID");
        Err(CliError::Verification(detail))
    }
}

// ------------------------------------------------------------------- ledger

/// `ledger tick` — advance the simulated clock, sealing due blocks.
pub fn ledger_tick(ws: &Workspace, seconds: u64) -> Result<Vec<Block>, CliError> {
    let produced = ws.tick(seconds)?;
    for block in &produced {
        println!(
            "sealed block {} at t={} with {} transaction(s)",
            block.height,
            block.timestamp,
            block.transactions.len()
        );
    }
    println!("clock now {}", ws.now()?);
    Ok(produced)
}

/// `ledger status` — chain tip, clock and registry sizes.
pub fn ledger_status(ws: &Workspace) -> Result<(), CliError> {
    let node = ws.load_node()?;
    let state = node.state();
    let tip = node.tip();
    println!("height {} (tip {})", tip.height, tip.header_hash().to_hex());
    println!("clock {}", ws.now()?);
    println!("pending transactions: {}", ws.pending()?.len());
    println!(
        "registries: {} did(s), {} eligibility, {} sbom, {} penalized vendor(s)",
        state.did_registry.len(),
        state.elig_registry.len(),
        state.sbom_registry.len(),
        state.penalty_registry.len()
    );
    println!("state hash {}", state.state_hash().to_hex());
    Ok(())
}

/// `ledger replay` — rebuild state from the block log alone and print the
/// resulting state hash. Any tampering with the log fails the replay.
pub fn ledger_replay(ws: &Workspace) -> Result<(), CliError> {
    ledger_replay_file(ws, &ws.root().join("ledger/blocks.jsonl"))
}

/// `ledger replay --ledger-file` — replay an arbitrary block log under this
/// workspace's chain parameters.
pub fn ledger_replay_file(ws: &Workspace, path: &Path) -> Result<(), CliError> {
    let blocks = read_blocks(path).map_err(|e| io_err(&path.display().to_string(), e))?;
    let count = blocks.len();
    let node = replay(blocks, ws.config.ledger_config())
        .map_err(|e| CliError::Verification(format!("replay failed: {e}")))?;
    println!(
        "replay: OK — {count} block(s), state hash {}",
        node.state().state_hash().to_hex()
    );
    Ok(())
}

/// `ledger query` — look one key up in one registry. A miss exits with the
/// verification code so scripts can branch on it.
pub fn ledger_query(ws: &Workspace, registry: RegistryKind, key: &str) -> Result<(), CliError> {
    let node = ws.load_node()?;
    match query_registry(node.state(), registry, key) {
        Some(entry) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&entry).expect("serializes")
            );
            Ok(())
        }
        None => Err(CliError::Verification(format!("no entry for {key}"))),
    }
}

// ----------------------------------------------------------------- plumbing

/// Copy a file, flipping one bit of the byte at `offset` — the adversary in
/// the tampering scenarios.
pub fn flip_byte(path: &Path, offset: usize) -> Result<(), CliError> {
    let mut bytes = fs::read(path).map_err(|e| io_err(&path.display().to_string(), e))?;
    if bytes.is_empty() {
        return Err(CliError::Usage("cannot tamper with an empty file".into()));
    }
    let i = offset % bytes.len();
    bytes[i] ^= 0x01;
    fs::write(path, bytes).map_err(|e| io_err(&path.display().to_string(), e))
}

pub fn outbox_file(ws: &Workspace, name: &str) -> PathBuf {
    ws.outbox_path(name)
}
