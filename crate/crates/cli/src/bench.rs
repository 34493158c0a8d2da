//! Scaling benchmark over SBOM size.
//!
//! For each attribute count `n` the harness measures three protocol phases
//! over a synthetic canonical SBOM of `n` attributes:
//!
//! * `vc_gen` — the vendor pipeline: build the salted commitment and issue a
//!   signed credential over it (linear in `n`);
//! * `proof_gen` — open a fixed one-attribute disclosure;
//! * `proof_verify` — the procurer pipeline: check the disclosure proof
//!   against the committed root and verify the credential on the ledger
//!   (logarithmic in `n` plus a constant signature check).
//!
//! Each figure is the median of `runs` samples; a sample times a batch of
//! iterations sized so that it lasts long enough to measure reliably. The
//! `siblings` column reports the authentication-path length of the first
//! disclosed attribute, which grows with `ceil(log2 n)`.

use std::hint::black_box;
use std::time::Instant;

use trustchain_core::credentials::{
    issue_eligibility_vc, issue_sbom_vc, rfc3339_utc, verify_vc, SbomClaims, SbomMetadata, VcKind,
    VerifiableCredential,
};
use trustchain_core::identity::{create_identity, Did, KeyPair};
use trustchain_core::ledger::{
    DidRegisterPayload, LedgerConfig, LedgerNode, LedgerState, Transaction, TxKind,
};
use trustchain_core::merkle::{
    build_commitment, prove_disclosure, verify_disclosure, SaltSeed, SbomCommitment,
};
use trustchain_core::sbom::{CanonicalSbom, ComponentId};
use trustchain_core::sha256;

use crate::CliError;

/// Attribute counts measured by default.
pub const DEFAULT_COUNTS: [usize; 10] = [1, 5, 10, 25, 50, 100, 150, 200, 250, 500];

/// Default number of samples per figure.
pub const DEFAULT_RUNS: usize = 21;

/// One CSV row of results.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub vc_gen_ms: f64,
    pub proof_gen_ms: f64,
    pub proof_verify_ms: f64,
    pub siblings: usize,
}

/// A synthetic canonical SBOM with exactly `n` attributes. Paths use a
/// zero-padded index so they are already in byte order.
pub fn synthetic_sbom(n: usize) -> CanonicalSbom {
    CanonicalSbom {
        attributes: (0..n)
            .map(|i| (format!("pkg/{i:04}/field"), format!("value{i}")))
            .collect(),
        component_ids: vec![ComponentId::new("bench-product", "1").expect("valid id")],
        source_digest: sha256(format!("bench-sbom:{n}").as_bytes()),
    }
}

/// A running ledger with one certified vendor, as every phase needs one.
struct BenchEnv {
    node: LedgerNode,
    vendor: KeyPair,
    vendor_did: Did,
    now: u64,
}

impl BenchEnv {
    /// Seal a transaction into the next block and advance the clock.
    fn seal(&mut self, tx: Transaction) {
        self.node
            .submit_transaction(tx, self.now)
            .expect("accepted");
        self.now += 12;
        let block = self.node.produce_block(self.now).expect("block due");
        assert!(
            block.transactions.iter().all(|t| t.applied),
            "benchmark transactions must apply"
        );
    }
}

fn bench_env() -> BenchEnv {
    const T0: u64 = 1_767_225_600;
    let (oversight, oversight_did, oversight_doc) =
        create_identity(&[0xB0; 32], Some("https://oversight.example".into()));
    let registration = Transaction::signed(
        &oversight,
        oversight_did.clone(),
        TxKind::DidRegister,
        &DidRegisterPayload {
            document: oversight_doc,
        },
    );
    let node = LedgerNode::genesis(LedgerConfig::default(), registration, T0).expect("genesis");

    let (vendor, vendor_did, vendor_doc) = create_identity(&[0xB1; 32], None);
    let tx = Transaction::signed(
        &vendor,
        vendor_did.clone(),
        TxKind::DidRegister,
        &DidRegisterPayload {
            document: vendor_doc,
        },
    );
    let mut env = BenchEnv {
        node,
        vendor,
        vendor_did,
        now: T0,
    };
    env.seal(tx);

    let (_, elig_tx) = issue_eligibility_vc(
        &oversight,
        &oversight_did,
        &env.vendor_did,
        vec!["iso-27001".into()],
        T0 + 365 * 86_400,
        env.now,
        env.node.state(),
    )
    .expect("eligibility issues");
    env.seal(elig_tx);
    env
}

fn claims_for(
    sbom: &CanonicalSbom,
    commitment: &SbomCommitment,
    vendor_did: &Did,
    now: u64,
) -> SbomClaims {
    SbomClaims {
        sbom_digest: sbom.source_digest,
        attribute_root: commitment.attribute_root,
        index_root: commitment.index_root,
        metadata: SbomMetadata {
            supplier: "Bench Vendor".into(),
            product_name: "bench-product".into(),
            product_version: "1".into(),
            author_did: vendor_did.clone(),
            created: rfc3339_utc(now),
        },
        storage_uri: "file://bench/bench-product.spdx.json".into(),
    }
}

/// Median of `runs` samples of `op`, in milliseconds. Each sample times a
/// batch of iterations sized from a calibration call so that short operations
/// still produce stable figures.
fn measure<F: FnMut()>(runs: usize, mut op: F) -> f64 {
    const TARGET_NANOS: u128 = 2_000_000; // 2ms per sample
    let start = Instant::now();
    op();
    let single = start.elapsed().as_nanos().max(1);
    let iters = (TARGET_NANOS / single).clamp(1, 20_000) as usize;

    let mut samples = Vec::with_capacity(runs);
    for _ in 0..runs {
        let start = Instant::now();
        for _ in 0..iters {
            op();
        }
        samples.push(start.elapsed().as_nanos() as f64 / iters as f64 / 1_000_000.0);
    }
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

/// Issue a credential over a fresh commitment — the timed vendor pipeline.
fn generate_vc(
    sbom: &CanonicalSbom,
    seed: &SaltSeed,
    state: &LedgerState,
    vendor: &KeyPair,
    vendor_did: &Did,
    now: u64,
) -> (SbomCommitment, VerifiableCredential, Transaction) {
    let commitment = build_commitment(sbom, *seed).expect("commitment builds");
    let claims = claims_for(sbom, &commitment, vendor_did, now);
    let (vc, tx) = issue_sbom_vc(
        vendor,
        vendor_did,
        VcKind::ComponentSbom,
        claims,
        Vec::new(),
        now,
        state,
    )
    .expect("credential issues");
    (commitment, vc, tx)
}

/// Run the benchmark. `counts` are attribute counts, `runs` the number of
/// samples per figure (the median is reported).
pub fn run_bench(counts: &[usize], runs: usize) -> Result<Vec<BenchRow>, CliError> {
    if counts.is_empty() || runs == 0 {
        return Err(CliError::Usage(
            "need at least one count and one run".into(),
        ));
    }
    if let Some(zero) = counts.iter().find(|&&n| n == 0) {
        return Err(CliError::Usage(format!(
            "cannot benchmark {zero} attributes"
        )));
    }
    let mut env = bench_env();
    let mut rows = Vec::with_capacity(counts.len());
    for &n in counts {
        let sbom = synthetic_sbom(n);
        let seed = SaltSeed::derive(format!("bench:{n}").as_bytes());

        let state = env.node.state().clone();
        let vc_gen_ms = measure(runs, || {
            black_box(generate_vc(
                &sbom,
                &seed,
                &state,
                &env.vendor,
                &env.vendor_did,
                env.now,
            ));
        });

        // Register one credential for this size so the verification phase
        // runs against a live ledger entry, as a procurer would.
        let (commitment, vc, tx) =
            generate_vc(&sbom, &seed, &state, &env.vendor, &env.vendor_did, env.now);
        env.seal(tx);
        let state = env.node.state().clone();
        let now = env.now;

        // A fixed one-attribute disclosure keeps the proof phases comparable
        // across sizes: only the authentication-path length may grow.
        let paths = vec![sbom.attributes[0].0.clone()];
        let proof_gen_ms = measure(runs, || {
            black_box(prove_disclosure(&sbom, &commitment, &paths).expect("proof builds"));
        });

        let proof = prove_disclosure(&sbom, &commitment, &paths).expect("proof builds");
        assert!(
            verify_disclosure(&proof, &commitment.attribute_root).is_ok()
                && verify_vc(&vc, &state, now).valid,
            "benchmark artifacts must verify"
        );
        let proof_verify_ms = measure(runs, || {
            black_box(verify_disclosure(&proof, &commitment.attribute_root).expect("verifies"));
            black_box(verify_vc(&vc, &state, now));
        });

        rows.push(BenchRow {
            n,
            vc_gen_ms,
            proof_gen_ms,
            proof_verify_ms,
            siblings: proof.entries[0].sibling_path.len(),
        });
    }
    Ok(rows)
}

/// Render rows as the CSV the `bench run` command emits.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,vc_gen_ms,proof_gen_ms,proof_verify_ms,siblings\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{}\n",
            row.n, row.vc_gen_ms, row.proof_gen_ms, row.proof_verify_ms, row.siblings
        ));
    }
    out
}

/// Informational throughput figure: how fast the node signs, admits and
/// seals a block of penalty transactions. Not part of the CSV contract.
pub fn throughput_info() -> String {
    const T0: u64 = 1_767_225_600;
    let (oversight, oversight_did, oversight_doc) =
        create_identity(&[0xB2; 32], Some("https://oversight.example".into()));
    let registration = Transaction::signed(
        &oversight,
        oversight_did.clone(),
        TxKind::DidRegister,
        &DidRegisterPayload {
            document: oversight_doc,
        },
    );
    let mut node = LedgerNode::genesis(LedgerConfig::default(), registration, T0).expect("genesis");
    let (vendor, vendor_did, vendor_doc) = create_identity(&[0xB3; 32], None);
    let tx = Transaction::signed(
        &vendor,
        vendor_did.clone(),
        TxKind::DidRegister,
        &DidRegisterPayload {
            document: vendor_doc,
        },
    );
    node.submit_transaction(tx, T0 + 1)
        .expect("vendor registers");
    node.produce_block(T0 + 12).expect("block 1");

    const COUNT: usize = 100;
    let start = Instant::now();
    for i in 0..COUNT {
        let tx = Transaction::signed(
            &oversight,
            oversight_did.clone(),
            TxKind::PenaltyRecord,
            &trustchain_core::ledger::PenaltyPayload {
                vendor: vendor_did.clone(),
                points: 1,
                reason: format!("bench-{i}"),
            },
        );
        node.submit_transaction(tx, T0 + 13).expect("accepted");
    }
    let block = node.produce_block(T0 + 24).expect("block 2");
    let elapsed = start.elapsed();
    let applied = block.transactions.iter().filter(|t| t.applied).count();
    format!(
        "info: signed, submitted and sealed {applied} transactions in {:.2} ms (~{:.0} tx/s, informational)",
        elapsed.as_secs_f64() * 1_000.0,
        applied as f64 / elapsed.as_secs_f64()
    )
}
