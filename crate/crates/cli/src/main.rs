//! Command-line front door: evaluate primitives, run privacy-amplification
//! sessions locally or over TCP with adversary profiles, and execute the
//! verification sweeps.
//!
//! Exit codes: 0 = all bounds held, 1 = usage or parse error, 2 = a bound
//! was violated or a regime precondition failed. Machine-readable output
//! goes to stdout or --out; diagnostics go to stderr.

mod report;
mod verify;

use std::net::TcpListener;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use extractorlab::bits;
use extractorlab::dist::WeakSourceSpec;
use extractorlab::ff::{Gf2m, PrimeField};
use extractorlab::mac::{mac_tag, MacKey};
use extractorlab::pa::{
    adversary_by_name, default_sources, extraction_audit, run_alice, run_bob, run_mitm,
    run_session, NetConfig, ProtocolParams,
};
use extractorlab::xtr::{ip_ext, nm_ext, trevisan_ext, NmExtParams, TrevisanParams};

use report::{OutputSink, ReportMeta};

#[derive(Parser)]
#[command(name = "extractorlab", version, about = "randomness-extraction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single primitive on explicit inputs.
    Eval {
        #[command(subcommand)]
        which: EvalCommand,
    },
    /// Run privacy-amplification sessions.
    Pa {
        #[command(subcommand)]
        role: PaCommand,
    },
    /// Run a verification suite and emit a report.
    Verify {
        #[command(subcommand)]
        suite: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Inner product over F_p: `eval ip --p 3 --x 1,2 --y 2,2`.
    Ip {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Non-malleable extractor: `eval nmext --p 3 --n 2 --x 1,2 --y 2`.
    Nmext {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// One-time MAC tag: `eval mac --m 4 --poly 0x13 --key 0x3,0x5 --msg 0x7`.
    Mac {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        key: String,
        #[arg(long)]
        msg: String,
    },
    /// Trevisan-style extraction: `eval tre --n 8 --l 2 --t 2 --x 10110011 --seed-bits 0110`.
    Tre {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        x: String,
        #[arg(long = "seed-bits")]
        seed_bits: String,
    },
}

#[derive(Args, Clone)]
struct PaCommon {
    /// Builtin profile name (desk32, mini8), a JSON file path, or a name
    /// resolved under --profile-dir.
    #[arg(long, default_value = "desk32")]
    profile: String,
    #[arg(long = "profile-dir")]
    profile_dir: Option<String>,
    #[arg(long, default_value_t = 1000)]
    sessions: u64,
    /// Run seed; the EXTRACTORLAB_SEED environment variable overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum PaCommand {
    /// Both parties in process, with a named adversary on the channel.
    Local {
        #[command(flatten)]
        common: PaCommon,
        #[arg(long, default_value = "identity")]
        adv: String,
    },
    /// Alice over TCP: one session per connection.
    Alice {
        #[command(flatten)]
        common: PaCommon,
        #[arg(long)]
        connect: String,
    },
    /// Bob over TCP: listens, one session per connection.
    Bob {
        #[command(flatten)]
        common: PaCommon,
        #[arg(long)]
        listen: String,
    },
    /// MITM proxy applying a named adversary to the deframed byte stream.
    Mitm {
        #[command(flatten)]
        common: PaCommon,
        #[arg(long)]
        listen: String,
        #[arg(long)]
        connect: String,
        #[arg(long, default_value = "identity")]
        adv: String,
    },
    /// Extraction audit: empirical distance of (R_B, transcript) from
    /// (uniform, transcript).
    Audit {
        #[command(flatten)]
        common: PaCommon,
        #[arg(long, default_value = "identity")]
        adv: String,
        /// Min-entropy floor for the X source (flat source; default
        /// uniform).
        #[arg(long = "x-entropy")]
        x_entropy: Option<f64>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exhaustive two-wise independence of IP_p^n.
    Twowise {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Two-source error sweep over flat X sources against the CG-style
    /// bound.
    ExtSweep {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Non-malleability sweep over all no-fixed-point tampering tables.
    NmSweep {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Exact exhaustive MAC forgery probability.
    Mac {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Random c-q states against the hashed-collision inequality.
    Renner {
        #[arg(long, default_value_t = 100)]
        instances: u64,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Random postselected instances against the extraction inequality.
    Thm31 {
        #[arg(long, default_value_t = 100)]
        instances: u64,
        /// Also dump each instance as replayable JSON to stderr-separate
        /// detail rows.
        #[arg(long)]
        dump_instances: bool,
        #[command(flatten)]
        common: VerifyCommon,
    },
}

#[derive(Args, Clone)]
struct VerifyCommon {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn env_seed(cli_seed: u64) -> u64 {
    match std::env::var("EXTRACTORLAB_SEED") {
        Ok(v) => v.parse().unwrap_or(cli_seed),
        Err(_) => cli_seed,
    }
}

fn resolve_profile(name: &str, dir: &Option<String>) -> anyhow::Result<ProtocolParams> {
    if let Some(dir) = dir {
        let candidate = std::path::Path::new(dir).join(format!("{name}.json"));
        if candidate.exists() {
            let text = std::fs::read_to_string(&candidate)?;
            let params: ProtocolParams = serde_json::from_str(&text)?;
            params.validate()?;
            return Ok(params);
        }
    }
    if std::path::Path::new(name).exists() {
        let text = std::fs::read_to_string(name)?;
        let params: ProtocolParams = serde_json::from_str(&text)?;
        params.validate()?;
        return Ok(params);
    }
    Ok(ProtocolParams::by_name(name)?)
}

fn parse_vec(s: &str) -> anyhow::Result<Vec<u64>> {
    s.split(',')
        .map(|t| bits::parse_u64(t).map_err(Into::into))
        .collect()
}

fn main() -> ExitCode {
    // die silently on a closed pipe instead of panicking mid-report
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(held) => {
            if held {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let usage = e.downcast_ref::<extractorlab::Error>().map_or(false, |err| {
                matches!(err, extractorlab::Error::Parse(_) | extractorlab::Error::InvalidParameter(_))
            });
            // regime violations and runtime failures exit 2; parse-ish
            // problems exit 1
            ExitCode::from(if usage { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Eval { which } => run_eval(which).map(|_| true),
        Command::Pa { role } => run_pa(role),
        Command::Verify { suite } => verify::run(suite),
    }
}

fn run_eval(which: EvalCommand) -> anyhow::Result<()> {
    match which {
        EvalCommand::Ip { p, x, y } => {
            let field = PrimeField::new(p)?;
            let x = parse_vec(&x)?;
            let y = parse_vec(&y)?;
            println!("{}", ip_ext(&field, &x, &y)?);
        }
        EvalCommand::Nmext { p, n, x, y } => {
            let params = NmExtParams::new(p, n)?;
            let x = parse_vec(&x)?;
            let y = parse_vec(&y)?;
            println!("{}", nm_ext(&params, &x, &y)?);
        }
        EvalCommand::Mac { m, poly, key, msg } => {
            let field = Gf2m::new(m, bits::parse_u64(&poly)?)?;
            let parts = parse_vec(&key)?;
            if parts.len() != 2 {
                anyhow::bail!("--key expects k1,k2");
            }
            let key = MacKey::new(&field, parts[0], parts[1])?;
            let tag = mac_tag(&field, &key, field.check(bits::parse_u64(&msg)?)?);
            println!("{:#X}", tag);
        }
        EvalCommand::Tre { n, l, t, x, seed_bits } => {
            let params = TrevisanParams::new(n, l, t)?;
            let (xv, xw) = bits::parse_bin(&x)?;
            if xw != n {
                anyhow::bail!("--x must have exactly {n} bits");
            }
            let (sv, sw) = bits::parse_bin(&seed_bits)?;
            if sw != params.d {
                anyhow::bail!("--seed-bits must have exactly {} bits", params.d);
            }
            let out = trevisan_ext(xv, sv, &params)?;
            println!("{}", bits::to_bin(out, l));
        }
    }
    Ok(())
}

fn run_pa(role: PaCommand) -> anyhow::Result<bool> {
    match role {
        PaCommand::Local { common, adv } => {
            let params = resolve_profile(&common.profile, &common.profile_dir)?;
            let seed = env_seed(common.seed);
            let (x_src, a_src, b_src) = default_sources(&params);
            let mut adversary = adversary_by_name(&adv, seed)?;
            let meta = ReportMeta::new(seed, &params.name);
            let mut sink = OutputSink::create(&common.out, &common.format, &meta)?;
            sink.csv_header(extractorlab::pa::SessionOutcome::csv_header())?;
            let mut all_correct = true;
            for session in 0..common.sessions {
                let out = run_session(
                    &params,
                    &x_src,
                    &a_src,
                    &b_src,
                    adversary.as_mut(),
                    seed,
                    session,
                )?;
                all_correct &= out.correct;
                sink.row(&out.csv_row(), &out)?;
            }
            sink.finish()?;
            // session streams always exit 0 unless the run itself failed
            let _ = all_correct;
            Ok(true)
        }
        PaCommand::Alice { common, connect } => {
            let cfg = net_config(&common)?;
            let outcomes = run_alice(&connect, &cfg)?;
            emit_outcomes(&common, &cfg.params.name, &outcomes)?;
            Ok(true)
        }
        PaCommand::Bob { common, listen } => {
            let cfg = net_config(&common)?;
            let listener = TcpListener::bind(&listen)?;
            eprintln!("bob: listening on {}", listener.local_addr()?);
            let outcomes = run_bob(&listener, &cfg)?;
            emit_outcomes(&common, &cfg.params.name, &outcomes)?;
            Ok(true)
        }
        PaCommand::Mitm { common, listen, connect, adv } => {
            let params = resolve_profile(&common.profile, &common.profile_dir)?;
            let seed = env_seed(common.seed);
            let mut adversary = adversary_by_name(&adv, seed)?;
            let listener = TcpListener::bind(&listen)?;
            eprintln!("mitm: listening on {}", listener.local_addr()?);
            run_mitm(&listener, &connect, &params, adversary.as_mut(), common.sessions)?;
            Ok(true)
        }
        PaCommand::Audit { common, adv, x_entropy } => {
            let params = resolve_profile(&common.profile, &common.profile_dir)?;
            let seed = env_seed(common.seed);
            let x_src = match x_entropy {
                None => WeakSourceSpec::uniform(1u64 << params.n),
                Some(k) => WeakSourceSpec::flat_with_entropy(1u64 << params.n, k)?,
            };
            let mut adversary = adversary_by_name(&adv, seed)?;
            let report =
                extraction_audit(&params, &x_src, adversary.as_mut(), common.sessions, seed)?;
            let meta = ReportMeta::new(seed, &params.name);
            let mut sink = OutputSink::create(&common.out, &common.format, &meta)?;
            sink.csv_header(extractorlab::pa::AuditReport::csv_header())?;
            sink.row(&report.csv_row(), &report)?;
            sink.finish()?;
            Ok(report.holds)
        }
    }
}

fn net_config(common: &PaCommon) -> anyhow::Result<NetConfig> {
    let params = resolve_profile(&common.profile, &common.profile_dir)?;
    let seed = env_seed(common.seed);
    let (x_src, a_src, b_src) = default_sources(&params);
    Ok(NetConfig { params, x_src, a_src, b_src, seed, sessions: common.sessions })
}

fn emit_outcomes(
    common: &PaCommon,
    profile: &str,
    outcomes: &[extractorlab::pa::SessionOutcome],
) -> anyhow::Result<()> {
    let meta = ReportMeta::new(env_seed(common.seed), profile);
    let mut sink = OutputSink::create(&common.out, &common.format, &meta)?;
    sink.csv_header(extractorlab::pa::SessionOutcome::csv_header())?;
    for out in outcomes {
        sink.row(&out.csv_row(), out)?;
    }
    sink.finish()?;
    Ok(())
}
