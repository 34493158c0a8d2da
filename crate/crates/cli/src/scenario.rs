//! End-to-end scripted exchanges between oversight, vendors and a procurer.
//!
//! Each scenario builds a fresh workspace under the given root, runs a
//! deterministic sequence of the same commands the binary exposes, and ends
//! with a single `scenario N: PASS` or `scenario N: FAIL (<reason>)` line.
//! With `tamper` set, an adversarial step is injected and the procurer's
//! verification is expected to catch it — the scenario then reports the
//! failing check and exits nonzero.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use trustchain_core::credentials::{VcKind, VerifiableCredential};
use trustchain_core::merkle::DisclosureProof;
use trustchain_core::sha256;

use crate::commands::{
    self, disclose, grant_eligibility, import_sbom, issue_vc, ledger_tick, oversight_init, revoke,
    send_sbom, vendor_register, verify_chain, verify_disclosure_cmd, verify_full, IssueOptions,
};
use crate::workspace::Workspace;
use crate::CliError;

/// The SPDX document exchanged in scenarios 1 and 2.
const SAMPLE_SPDX: &[u8] = include_bytes!("../fixtures/componentA.spdx.json");

const BLOCK_INTERVAL: u64 = 12;
const SEED: u64 = 7;

/// Run one scenario. The workspace is created at
/// `<root>/scenario<N>[-tamper]`, replacing any previous run's directory.
pub fn run(root: &Path, number: u8, tamper: bool) -> Result<(), CliError> {
    let dir = root.join(format!(
        "scenario{number}{}",
        if tamper { "-tamper" } else { "" }
    ));
    if dir.exists() {
        fs::remove_dir_all(&dir)
            .map_err(|e| CliError::Io(format!("clearing {}: {e}", dir.display())))?;
    }
    let result = match number {
        1 => scenario_full_exchange(&dir, tamper),
        2 => scenario_selective_disclosure(&dir, tamper),
        3 => scenario_trust_chain(&dir, tamper),
        _ => {
            return Err(CliError::Usage(format!(
                "no scenario number {number} (available: 1, 2, 3)"
            )))
        }
    };
    match result {
        Ok(()) => {
            println!("scenario {number}: PASS");
            Ok(())
        }
        Err(CliError::Verification(reason)) => {
            println!("scenario {number}: FAIL ({reason})");
            Err(CliError::Verification(reason))
        }
        Err(other) => Err(other),
    }
}

/// `[t=+Ns]` stamp relative to the genesis instant.
fn stamp(ws: &Workspace) -> Result<String, CliError> {
    Ok(format!("[t=+{}s]", ws.now()? - ws.config.genesis_time))
}

fn stage(ws: &Workspace, actor: &str, text: &str) -> Result<(), CliError> {
    println!("{} {actor}: {text}", stamp(ws)?);
    Ok(())
}

/// Shared opening for scenarios 1 and 2: one vendor registered, certified,
/// with an imported SBOM and a component credential over it.
fn single_vendor_setup(dir: &Path) -> Result<(Workspace, VerifiableCredential), CliError> {
    let ws = oversight_init(dir, SEED, BLOCK_INTERVAL, 10)?;

    stage(&ws, "vendor", "registering as acme")?;
    vendor_register(&ws, "acme")?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(&ws, "oversight", "granting eligibility to acme")?;
    grant_eligibility(&ws, "acme", &["iso-27001".into(), "ssdf-v1.1".into()], 365)?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(&ws, "vendor", "importing the componentA SBOM")?;
    let incoming = dir.join("incoming.spdx.json");
    fs::write(&incoming, SAMPLE_SPDX)
        .map_err(|e| CliError::Io(format!("writing sample SBOM: {e}")))?;
    import_sbom(&ws, "acme", &incoming, "componentA", false)?;

    stage(&ws, "vendor", "issuing a component SBOM credential")?;
    let vc = issue_vc(
        &ws,
        "acme",
        "componentA",
        IssueOptions {
            kind: VcKind::ComponentSbom,
            product: "componentA".into(),
            product_version: "1".into(),
            supplier: Some("Acme Software GmbH".into()),
            storage_uri: None,
            embed_eligibility: true,
            embed: Vec::new(),
            supersedes: None,
            retain_old: false,
        },
    )?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;
    Ok((ws, vc))
}

/// Scenario 1 — a full-disclosure exchange. The vendor sends the whole SBOM
/// document; the procurer checks it against the credential's pinned digest
/// and verifies the credential on the ledger. The tampered variant flips one
/// byte of the document in transit.
fn scenario_full_exchange(dir: &Path, tamper: bool) -> Result<(), CliError> {
    println!("=== scenario 1: full SBOM exchange ===");
    let (ws, vc) = single_vendor_setup(dir)?;

    stage(&ws, "vendor", "sending the full SBOM to the procurer")?;
    let transferred = ws.outbox_path("componentA.spdx.json");
    send_sbom(&ws, "acme", "componentA", &transferred)?;

    if tamper {
        stage(
            &ws,
            "adversary",
            "flipping one byte of the document in transit",
        )?;
        commands::flip_byte(&transferred, 100)?;
    }

    stage(
        &ws,
        "procurer",
        "verifying the received document against the credential",
    )?;
    verify_full(&ws, &vc.id, &transferred)
}

/// Scenario 2 — selective disclosure. The vendor opens three attributes under
/// a Merkle proof; the procurer verifies the proof against the committed root
/// without seeing the rest of the document. The tampered variant rewrites one
/// disclosed value inside the proof.
fn scenario_selective_disclosure(dir: &Path, tamper: bool) -> Result<(), CliError> {
    println!("=== scenario 2: selective disclosure ===");
    let (ws, vc) = single_vendor_setup(dir)?;

    stage(&ws, "vendor", "disclosing three attributes under proof")?;
    let proof_path = ws.outbox_path("disclosure.json");
    disclose(
        &ws,
        "acme",
        "componentA",
        &[
            "packages/0/name".into(),
            "packages/0/supplier".into(),
            "packages/0/versionInfo".into(),
        ],
        &proof_path,
    )?;

    if tamper {
        stage(
            &ws,
            "adversary",
            "rewriting a disclosed value inside the proof",
        )?;
        let bytes = fs::read(&proof_path).map_err(|e| CliError::Io(e.to_string()))?;
        let mut proof: DisclosureProof =
            serde_json::from_slice(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
        proof.entries[0].value = format!("{}-tampered", proof.entries[0].value);
        let rewritten = serde_json::to_vec_pretty(&proof).expect("serializes");
        fs::write(&proof_path, rewritten).map_err(|e| CliError::Io(e.to_string()))?;
    }

    stage(
        &ws,
        "procurer",
        "verifying the disclosure proof against the credential",
    )?;
    verify_disclosure_cmd(&ws, &vc.id, &proof_path)
}

/// Minimal NTIA-compliant SPDX 2.2 document for a product and its immediate
/// dependencies.
pub fn synthetic_spdx(
    product: &str,
    version: &str,
    supplier: &str,
    deps: &[(&str, &str)],
) -> Vec<u8> {
    let mut packages = vec![json!({
        "SPDXID": "SPDXRef-Package-0",
        "name": product,
        "versionInfo": version,
        "supplier": format!("Organization: {supplier}"),
        "downloadLocation": format!("https://{supplier}.example/{product}-{version}.tar.gz"),
        "checksums": [{
            "algorithm": "SHA256",
            "value": sha256(format!("{product}-{version}").as_bytes()).to_hex(),
        }],
        "licenseConcluded": "Apache-2.0",
    })];
    let mut relationships = vec![json!({
        "spdxElementId": "SPDXRef-DOCUMENT",
        "relationshipType": "DESCRIBES",
        "relatedSpdxElement": "SPDXRef-Package-0",
    })];
    for (i, (name, dep_version)) in deps.iter().enumerate() {
        let id = format!("SPDXRef-Package-{}", i + 1);
        packages.push(json!({
            "SPDXID": id,
            "name": name,
            "versionInfo": dep_version,
            "supplier": "Organization: Upstream Supplier",
            "downloadLocation": "NOASSERTION",
        }));
        relationships.push(json!({
            "spdxElementId": "SPDXRef-Package-0",
            "relationshipType": "DEPENDS_ON",
            "relatedSpdxElement": id,
        }));
    }
    let document = json!({
        "spdxVersion": "SPDX-2.2",
        "dataLicense": "CC0-1.0",
        "SPDXID": "SPDXRef-DOCUMENT",
        "name": format!("{product}-{version}"),
        "documentNamespace": format!("https://{supplier}.example/spdx/{product}/{version}"),
        "creationInfo": {
            "created": "2026-02-01T00:00:00Z",
            "creators": [format!("Organization: {supplier}"), "Tool: trustchain"],
        },
        "packages": packages,
        "relationships": relationships,
    });
    let mut bytes = serde_json::to_vec_pretty(&document).expect("serializes");
    bytes.push(b'\n');
    bytes
}

/// Register a vendor, import a synthetic SBOM for it and return nothing; the
/// eligibility grant happens separately so registrations can share a block.
fn import_product(
    ws: &Workspace,
    dir: &Path,
    vendor: &str,
    product: &str,
    version: &str,
    deps: &[(&str, &str)],
) -> Result<(), CliError> {
    let path = dir.join(format!("{vendor}-{product}.spdx.json"));
    fs::write(&path, synthetic_spdx(product, version, vendor, deps))
        .map_err(|e| CliError::Io(e.to_string()))?;
    import_sbom(ws, vendor, &path, product, false)?;
    Ok(())
}

/// Scenario 3 — a three-vendor trust chain. An upstream library feeds a
/// middleware component which feeds a system integrator's product; the
/// procurer walks the whole chain. The untampered run then has the upstream
/// vendor revoke its credential after a vulnerability and checks that the
/// chain verdict flips; the tampered variant instead has oversight revoke the
/// integrator's eligibility, which the final verification must catch.
fn scenario_trust_chain(dir: &Path, tamper: bool) -> Result<(), CliError> {
    println!("=== scenario 3: three-vendor trust chain ===");
    let ws = oversight_init(dir, SEED, BLOCK_INTERVAL, 10)?;

    stage(&ws, "vendors", "registering upstream, midstream and sysint")?;
    vendor_register(&ws, "upstream")?;
    vendor_register(&ws, "midstream")?;
    vendor_register(&ws, "sysint")?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(
        &ws,
        "oversight",
        "granting eligibility to all three vendors",
    )?;
    for vendor in ["upstream", "midstream", "sysint"] {
        grant_eligibility(&ws, vendor, &["iso-27001".into()], 365)?;
    }
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(
        &ws,
        "upstream",
        "publishing libfoo 2.1 with a component credential",
    )?;
    import_product(&ws, dir, "upstream", "libfoo", "2.1", &[])?;
    let up_vc = issue_vc(
        &ws,
        "upstream",
        "libfoo",
        IssueOptions {
            kind: VcKind::ComponentSbom,
            product: "libfoo".into(),
            product_version: "2.1".into(),
            supplier: None,
            storage_uri: None,
            embed_eligibility: true,
            embed: Vec::new(),
            supersedes: None,
            retain_old: false,
        },
    )?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(
        &ws,
        "midstream",
        "publishing middleware 1.0 on top of libfoo",
    )?;
    import_product(
        &ws,
        dir,
        "midstream",
        "middleware",
        "1.0",
        &[("libfoo", "2.1")],
    )?;
    let mid_vc = issue_vc(
        &ws,
        "midstream",
        "middleware",
        IssueOptions {
            kind: VcKind::ComponentSbom,
            product: "middleware".into(),
            product_version: "1.0".into(),
            supplier: None,
            storage_uri: None,
            embed_eligibility: false,
            embed: vec![up_vc.id.clone()],
            supersedes: None,
            retain_old: false,
        },
    )?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(
        &ws,
        "sysint",
        "publishing platform 3.0 with a system credential",
    )?;
    import_product(
        &ws,
        dir,
        "sysint",
        "platform",
        "3.0",
        &[("middleware", "1.0")],
    )?;
    let sys_vc = issue_vc(
        &ws,
        "sysint",
        "platform",
        IssueOptions {
            kind: VcKind::SystemSbom,
            product: "platform".into(),
            product_version: "3.0".into(),
            supplier: None,
            storage_uri: None,
            embed_eligibility: false,
            embed: vec![mid_vc.id.clone()],
            supersedes: None,
            retain_old: false,
        },
    )?;
    ledger_tick(&ws, BLOCK_INTERVAL)?;

    stage(&ws, "procurer", "walking the trust chain at onboarding")?;
    verify_chain(&ws, &sys_vc.id, 8)?;

    if tamper {
        stage(&ws, "adversary", "the integrator's certification is pulled")?;
        revoke(
            &ws,
            "oversight",
            &elig_id_of(&ws, "sysint")?,
            "certification audit failed",
        )?;
        ledger_tick(&ws, BLOCK_INTERVAL)?;

        stage(&ws, "procurer", "re-verifying the chain before purchase")?;
        verify_chain(&ws, &sys_vc.id, 8).map(|_| ())
    } else {
        stage(
            &ws,
            "upstream",
            "revoking libfoo's credential after a vulnerability",
        )?;
        revoke(
            &ws,
            "upstream",
            &up_vc.id,
            "critical vulnerability in libfoo 2.1",
        )?;
        ledger_tick(&ws, BLOCK_INTERVAL)?;

        stage(&ws, "procurer", "re-verifying the chain before purchase")?;
        match verify_chain(&ws, &sys_vc.id, 8) {
            Ok(_) => Err(CliError::Verification(
                "revoked upstream credential still verifies".into(),
            )),
            Err(CliError::Verification(detail))
                if detail.contains(&up_vc.id) && detail.contains("not_revoked") =>
            {
                println!("revocation propagated to the chain verdict, as expected");
                Ok(())
            }
            Err(CliError::Verification(detail)) => Err(CliError::Verification(format!(
                "chain failed for an unexpected reason: {detail}"
            ))),
            Err(other) => Err(other),
        }
    }
}

/// The id of a vendor's stored eligibility credential.
fn elig_id_of(ws: &Workspace, vendor: &str) -> Result<String, CliError> {
    let (_, did) = ws.vendor_key(vendor)?;
    ws.all_vcs()?
        .into_values()
        .find(|vc| vc.vc_kind == VcKind::Eligibility && vc.subject == did)
        .map(|vc| vc.id)
        .ok_or_else(|| CliError::Usage(format!("no eligibility credential stored for {vendor}")))
}

/// Where a scenario's workspace lands, for tests that inspect the artifacts.
pub fn scenario_dir(root: &Path, number: u8, tamper: bool) -> PathBuf {
    root.join(format!(
        "scenario{number}{}",
        if tamper { "-tamper" } else { "" }
    ))
}
