//! `trustchain` — a workbench for ledger-anchored SBOM credentials.
//!
//! Commands are grouped by role: `oversight` runs the authority, `vendor`
//! publishes SBOMs and credentials, `procurer` verifies what it receives,
//! `ledger` drives the simulated chain, and `scenario`/`bench` script whole
//! exchanges and measure scaling.
//!
//! Exit codes: 0 success, 2 a verification check failed, 3 usage error,
//! 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trustchain_cli::commands::{self, IssueOptions};
use trustchain_cli::workspace::Workspace;
use trustchain_cli::{bench, scenario, CliError};
use trustchain_core::credentials::VcKind;
use trustchain_core::ledger::RegistryKind;

#[derive(Parser)]
#[command(
    name = "trustchain",
    version,
    about = "Ledger-anchored SBOM credential workbench"
)]
struct Cli {
    /// Workspace directory (holds the ledger, keys and vendor stores).
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    #[command(subcommand)]
    role: Role,
}

#[derive(Subcommand)]
enum Role {
    /// Authority operations: workspace setup, eligibility, penalties.
    Oversight {
        #[command(subcommand)]
        verb: OversightCmd,
    },
    /// Vendor operations: identities, SBOM imports, credentials, proofs.
    Vendor {
        #[command(subcommand)]
        verb: VendorCmd,
    },
    /// Procurer operations: verify received artifacts against the ledger.
    Procurer {
        #[command(subcommand)]
        verb: ProcurerCmd,
    },
    /// Chain operations: advance time, inspect and replay the block log.
    Ledger {
        #[command(subcommand)]
        verb: LedgerCmd,
    },
    /// Scripted multi-party exchanges.
    Scenario {
        #[command(subcommand)]
        verb: ScenarioCmd,
    },
    /// Scaling measurements.
    Bench {
        #[command(subcommand)]
        verb: BenchCmd,
    },
}

#[derive(Subcommand)]
enum OversightCmd {
    /// Create a workspace with a genesis block and the authority identity.
    Init {
        /// Workspace seed; all identities and salts derive from it.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Seconds between blocks of the simulated chain.
        #[arg(long = "block-interval", default_value_t = 12)]
        block_interval: u64,
        /// Accumulated penalty points at which eligibility is revoked.
        #[arg(long = "penalty-threshold", default_value_t = 10)]
        penalty_threshold: u32,
    },
    /// Issue an eligibility credential to a registered vendor.
    GrantEligibility {
        /// Vendor name (as registered in this workspace).
        #[arg(long)]
        vendor: String,
        /// Comma-separated certification criteria.
        #[arg(long, value_delimiter = ',', required = true)]
        criteria: Vec<String>,
        /// Validity in days from the current simulated time.
        #[arg(long = "valid-days", default_value_t = 365)]
        valid_days: u64,
    },
    /// Revoke any credential by id.
    Revoke {
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long)]
        reason: String,
    },
    /// Record penalty points against a vendor.
    Penalty {
        #[arg(long)]
        vendor: String,
        #[arg(long)]
        points: u32,
        #[arg(long)]
        reason: String,
    },
}

#[derive(Subcommand)]
enum VendorCmd {
    /// Create a vendor identity and queue its registration.
    Register {
        #[arg(long)]
        name: String,
    },
    /// Parse an SPDX document into the vendor store and commit to it.
    ImportSbom {
        #[arg(long)]
        name: String,
        #[arg(long)]
        file: PathBuf,
        /// Label the document is stored under.
        #[arg(long)]
        label: String,
        /// Import even when minimum fields are missing.
        #[arg(long = "allow-noncompliant")]
        allow_noncompliant: bool,
    },
    /// Issue a component or system SBOM credential over an imported SBOM.
    IssueVc {
        #[arg(long)]
        name: String,
        #[arg(long)]
        label: String,
        #[arg(long, value_enum, default_value_t = KindArg::Component)]
        kind: KindArg,
        #[arg(long)]
        product: String,
        #[arg(long = "product-version")]
        product_version: String,
        /// Supplier string for the credential metadata (default: the vendor).
        #[arg(long)]
        supplier: Option<String>,
        /// Where the full document is published (default: the store path).
        #[arg(long = "storage-uri")]
        storage_uri: Option<String>,
        /// Embed the vendor's live eligibility credential by reference.
        #[arg(long = "embed-eligibility")]
        embed_eligibility: bool,
        /// Embed an upstream SBOM credential by id (repeatable).
        #[arg(long = "embed")]
        embed: Vec<String>,
        /// Id of the credential this one replaces.
        #[arg(long)]
        supersedes: Option<String>,
        /// With --supersedes: keep the old credential active.
        #[arg(long = "retain-old")]
        retain_old: bool,
    },
    /// Open named attribute paths into a selective-disclosure proof file.
    Disclose {
        #[arg(long)]
        name: String,
        #[arg(long)]
        label: String,
        /// Comma-separated attribute paths to open.
        #[arg(long, value_delimiter = ',', required = true)]
        paths: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prove a component present in (or absent from) an imported SBOM.
    ProveComponent {
        #[arg(long)]
        name: String,
        #[arg(long)]
        label: String,
        /// Component as `name@version`.
        #[arg(long)]
        component: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Copy the stored SBOM bytes to a file, as an off-chain transfer.
    SendSbom {
        #[arg(long)]
        name: String,
        #[arg(long)]
        label: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Revoke one of the vendor's own credentials.
    Revoke {
        #[arg(long)]
        name: String,
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long)]
        reason: String,
    },
}

// The variants are the subcommand names; `verify-*` is the procurer's whole
// vocabulary.
#[allow(clippy::enum_variant_names)]
#[derive(Subcommand)]
enum ProcurerCmd {
    /// Verify a fully disclosed SBOM document against its credential.
    VerifyFull {
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long)]
        sbom: PathBuf,
    },
    /// Verify a selective-disclosure proof against its credential.
    VerifyDisclosure {
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Verify a component presence/absence proof against its credential.
    VerifyComponent {
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long)]
        proof: PathBuf,
        /// Component as `name@version`; must match what the proof answers.
        #[arg(long)]
        component: String,
    },
    /// Resolve and verify the whole embedded-reference tree of a credential.
    VerifyChain {
        #[arg(long = "vc-id")]
        vc_id: String,
        #[arg(long = "max-depth", default_value_t = 8)]
        max_depth: usize,
    },
}

#[derive(Subcommand)]
enum LedgerCmd {
    /// Advance the simulated clock, sealing blocks as they fall due.
    Tick {
        /// Seconds to advance (default: one block interval).
        #[arg(long)]
        seconds: Option<u64>,
    },
    /// Show the chain tip, clock, mempool and registry sizes.
    Status,
    /// Rebuild state from a block log and print the state hash.
    Replay {
        /// Block log to replay (default: this workspace's chain).
        #[arg(long = "ledger-file")]
        ledger_file: Option<PathBuf>,
    },
    /// Look up one key in one registry.
    Query {
        #[arg(long, value_enum)]
        registry: RegistryArg,
        /// DID (did/penalty registries) or credential id (eligibility/sbom).
        #[arg(long)]
        key: String,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Run a scripted exchange in a fresh `scenario<N>` subdirectory.
    Run {
        /// Scenario number: 1 full exchange, 2 selective disclosure,
        /// 3 three-vendor trust chain.
        #[arg(long)]
        number: u8,
        /// Inject the scenario's adversarial step; verification must catch
        /// it and the run exits nonzero naming the failing check.
        #[arg(long)]
        tamper: bool,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Measure credential generation and proof verification across sizes.
    Run {
        /// Comma-separated attribute counts.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        /// Samples per figure (the median is reported).
        #[arg(long, default_value_t = bench::DEFAULT_RUNS)]
        runs: usize,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Component,
    System,
}

impl From<KindArg> for VcKind {
    fn from(kind: KindArg) -> VcKind {
        match kind {
            KindArg::Component => VcKind::ComponentSbom,
            KindArg::System => VcKind::SystemSbom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegistryArg {
    Did,
    Eligibility,
    Sbom,
    Penalty,
}

impl From<RegistryArg> for RegistryKind {
    fn from(registry: RegistryArg) -> RegistryKind {
        match registry {
            RegistryArg::Did => RegistryKind::Did,
            RegistryArg::Eligibility => RegistryKind::Eligibility,
            RegistryArg::Sbom => RegistryKind::Sbom,
            RegistryArg::Penalty => RegistryKind::Penalty,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let root = &cli.workspace;
    match cli.role {
        Role::Oversight { verb } => match verb {
            OversightCmd::Init {
                seed,
                block_interval,
                penalty_threshold,
            } => {
                commands::oversight_init(root, seed, block_interval, penalty_threshold)?;
                Ok(())
            }
            OversightCmd::GrantEligibility {
                vendor,
                criteria,
                valid_days,
            } => {
                let ws = Workspace::open(root)?;
                commands::grant_eligibility(&ws, &vendor, &criteria, valid_days)?;
                Ok(())
            }
            OversightCmd::Revoke { vc_id, reason } => {
                let ws = Workspace::open(root)?;
                commands::revoke(&ws, "oversight", &vc_id, &reason)
            }
            OversightCmd::Penalty {
                vendor,
                points,
                reason,
            } => {
                let ws = Workspace::open(root)?;
                commands::penalty(&ws, &vendor, points, &reason)
            }
        },
        Role::Vendor { verb } => match verb {
            VendorCmd::Register { name } => {
                let ws = Workspace::open(root)?;
                commands::vendor_register(&ws, &name)?;
                Ok(())
            }
            VendorCmd::ImportSbom {
                name,
                file,
                label,
                allow_noncompliant,
            } => {
                let ws = Workspace::open(root)?;
                commands::import_sbom(&ws, &name, &file, &label, allow_noncompliant)?;
                Ok(())
            }
            VendorCmd::IssueVc {
                name,
                label,
                kind,
                product,
                product_version,
                supplier,
                storage_uri,
                embed_eligibility,
                embed,
                supersedes,
                retain_old,
            } => {
                let ws = Workspace::open(root)?;
                commands::issue_vc(
                    &ws,
                    &name,
                    &label,
                    IssueOptions {
                        kind: kind.into(),
                        product,
                        product_version,
                        supplier,
                        storage_uri,
                        embed_eligibility,
                        embed,
                        supersedes,
                        retain_old,
                    },
                )?;
                Ok(())
            }
            VendorCmd::Disclose {
                name,
                label,
                paths,
                out,
            } => {
                let ws = Workspace::open(root)?;
                commands::disclose(&ws, &name, &label, &paths, &out)?;
                Ok(())
            }
            VendorCmd::ProveComponent {
                name,
                label,
                component,
                out,
            } => {
                let ws = Workspace::open(root)?;
                let component = commands::parse_component(&component)?;
                commands::prove_component(&ws, &name, &label, &component, &out)?;
                Ok(())
            }
            VendorCmd::SendSbom { name, label, out } => {
                let ws = Workspace::open(root)?;
                commands::send_sbom(&ws, &name, &label, &out)
            }
            VendorCmd::Revoke {
                name,
                vc_id,
                reason,
            } => {
                let ws = Workspace::open(root)?;
                commands::revoke(&ws, &name, &vc_id, &reason)
            }
        },
        Role::Procurer { verb } => match verb {
            ProcurerCmd::VerifyFull { vc_id, sbom } => {
                let ws = Workspace::open(root)?;
                commands::verify_full(&ws, &vc_id, &sbom)
            }
            ProcurerCmd::VerifyDisclosure { vc_id, proof } => {
                let ws = Workspace::open(root)?;
                commands::verify_disclosure_cmd(&ws, &vc_id, &proof)
            }
            ProcurerCmd::VerifyComponent {
                vc_id,
                proof,
                component,
            } => {
                let ws = Workspace::open(root)?;
                let component = commands::parse_component(&component)?;
                commands::verify_component(&ws, &vc_id, &proof, &component)
            }
            ProcurerCmd::VerifyChain { vc_id, max_depth } => {
                let ws = Workspace::open(root)?;
                commands::verify_chain(&ws, &vc_id, max_depth)?;
                Ok(())
            }
        },
        Role::Ledger { verb } => match verb {
            LedgerCmd::Tick { seconds } => {
                let ws = Workspace::open(root)?;
                let seconds = seconds.unwrap_or(ws.config.block_interval_secs);
                commands::ledger_tick(&ws, seconds)?;
                Ok(())
            }
            LedgerCmd::Status => {
                let ws = Workspace::open(root)?;
                commands::ledger_status(&ws)
            }
            LedgerCmd::Replay { ledger_file } => {
                let ws = Workspace::open(root)?;
                match ledger_file {
                    None => commands::ledger_replay(&ws),
                    Some(path) => commands::ledger_replay_file(&ws, &path),
                }
            }
            LedgerCmd::Query { registry, key } => {
                let ws = Workspace::open(root)?;
                commands::ledger_query(&ws, registry.into(), &key)
            }
        },
        Role::Scenario { verb } => match verb {
            ScenarioCmd::Run { number, tamper } => scenario::run(root, number, tamper),
        },
        Role::Bench { verb } => match verb {
            BenchCmd::Run { counts, runs, out } => {
                let counts = counts.unwrap_or_else(|| bench::DEFAULT_COUNTS.to_vec());
                let rows = bench::run_bench(&counts, runs)?;
                let csv = bench::to_csv(&rows);
                print!("{csv}");
                if let Some(path) = out {
                    std::fs::write(&path, &csv)
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                }
                eprintln!("{}", bench::throughput_info());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not usage errors.
            let is_error = e.use_stderr();
            let _ = e.print();
            return if is_error {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
