mod envelope;
mod store;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use envelope::{Envelope, Payload, Provenance, TargetDescriptor};
use store::{Store, DEFAULT_STORE};
use symrank::ranksearch::{cp_als, flattening_bound_all, hyperdet_222, symmetric_als, AlsConfig, Certificate};
use symrank::slocc::{
    epr_relabel_witness, ghz_to_state_operators, lemma_elimination, slot_pattern_state, smlocc_w_demo_with_level,
    strassen_certificate, symmetric_to_product, w_catalysis, w_simple_catalysis, SlotPattern,
};
use symrank::sympoly::{dicke_state, monomial_decompose, ExponentVector};
use symrank::tensors::{equal_up_to_scale, Scalar, SparseState};
use symrank::wpower::{
    bounds_table_csv, dicke_decomposition, merge_last_pair, w3_cubed_certificate, w3_cubed_reduction,
    wn_constructive_decomposition, wpower_expansion, BoundReport,
};

#[derive(Parser)]
#[command(name = "symrank", version, about = "Rank certificates and SLOCC witnesses for symmetric states")]
struct Cli {
    /// Directory for content-addressed certificates.
    #[arg(long, global = true, default_value = DEFAULT_STORE)]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// (m+1)-term certificate for the Dicke state D(m, n).
    Dicke {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
    /// W_N^{⊗n}: decomposition (default), expansion or rank bounds.
    #[command(group(ArgGroup::new("mode").args(["expand", "decompose", "bounds"])))]
    Wpower {
        #[arg(long = "N")]
        parties: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        expand: bool,
        #[arg(long)]
        decompose: bool,
        #[arg(long)]
        bounds: bool,
    },
    /// Waring certificate for a monomial given by its exponents.
    Monomial {
        #[arg(long, value_delimiter = ',', required = true)]
        exps: Vec<u32>,
    },
    /// CSV of W-power rank bounds over a grid.
    BoundsTable {
        #[arg(long = "N-range", value_parser = parse_range)]
        parties: (u32, u32),
        #[arg(long = "n-range", value_parser = parse_range)]
        copies: (u32, u32),
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// W_3^{⊗3}: exact 16-term certificate, or a numerical search.
    W3cubed {
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 16)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Strassen's rank-7 certificate and the EPR-triangle relabeling.
    Strassen,
    /// Re-verifies a stored certificate from its envelope alone.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Turns a decomposition certificate into GHZ → target operators.
    GhzConvert {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Catalytic conversion GHZ_N^{N−1} ⊗ c → W_N ⊗ c.
    Catalyst {
        #[arg(long = "N")]
        parties: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Use the catalyst W_N ⊕ GHZ_N^{N−1}.
        #[arg(long)]
        simple: bool,
    },
    /// Two-copy conversion (GHZ_N^{L})^{⊗2} → W_N^{⊗2}, L = N − 1 by default.
    SmloccDemo {
        #[arg(long = "N")]
        parties: usize,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Removes cross terms from W^{⊗n} + Σ c_B Ψ_B on N − 1 parties.
    Eliminate {
        #[arg(long = "N")]
        parties: usize,
        #[arg(long)]
        n: usize,
        /// JSON list of {"slots": [...], "q": "p/q"} or {"perm": [...], "k": k, "q": "p/q"}.
        #[arg(long)]
        coeffs: PathBuf,
    },
    /// Numerical rank search on a generated or stored target.
    RankSearch {
        /// `gen:key=value,...` (e.g. `w_power:N=3,n=1`, `monomial:exps=2.1.1`) or `file:path.json`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Search for a symmetric (Waring) decomposition instead of a CP one.
        #[arg(long)]
        symmetric: bool,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Hyperdeterminant class of a 2×2×2 state.
    Hyperdet {
        #[arg(long)]
        state: PathBuf,
    },
}

fn parse_range(text: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = text.split_once(':').ok_or("expected a:b")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// Command line as typed, minus the store location.
fn command_line() -> String {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--store" {
            args.next();
        } else if !a.starts_with("--store=") {
            out.push(a);
        }
    }
    out.join(" ")
}

struct Ctx {
    store: Store,
}

impl Ctx {
    fn emit(&self, env: &Envelope) -> Result<Value> {
        let path = self.store.put(env)?;
        Ok(json!({
            "kind": env.kind,
            "terms": env.terms(),
            "scalar_field": env.scalar_field,
            "path": path,
        }))
    }
}

fn provenance(seed: Option<u64>) -> Provenance {
    Provenance {
        command: command_line(),
        seed,
    }
}

fn print(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffEntry {
    #[serde(default)]
    slots: Option<Vec<usize>>,
    #[serde(default)]
    perm: Option<Vec<usize>>,
    #[serde(default)]
    k: Option<usize>,
    q: String,
}

fn read_coeffs(path: &Path) -> Result<BTreeMap<SlotPattern, Scalar>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let entries: Vec<CoeffEntry> = serde_json::from_str(&text).context("parsing coefficient list")?;
    let mut out = BTreeMap::new();
    for e in entries {
        let pattern = match (e.slots, e.perm, e.k) {
            (Some(s), None, None) => SlotPattern::new(s),
            (None, Some(p), Some(k)) => SlotPattern::from_permutation(&p, k)?,
            _ => bail!("each coefficient needs either \"slots\" or \"perm\" with \"k\""),
        };
        let c = Scalar::parse_rational(&e.q)?;
        if out.insert(pattern.clone(), c).is_some() {
            bail!("pattern {:?} given twice", pattern.slots().collect::<Vec<_>>());
        }
    }
    Ok(out)
}

/// `gen:key=value,...` as a descriptor; list values use `.` as separator.
fn parse_target(text: &str) -> Result<TargetDescriptor> {
    let (gen, params) = text.split_once(':').unwrap_or((text, ""));
    if gen == "file" {
        let body = fs::read_to_string(params).with_context(|| format!("reading {params}"))?;
        let state: SparseState = serde_json::from_str(&body).context("parsing state")?;
        return Ok(TargetDescriptor::State { state });
    }
    let mut obj = serde_json::Map::new();
    obj.insert("gen".into(), Value::String(gen.into()));
    for kv in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("expected key=value in {kv:?}"))?;
        let value = if v.contains('.') || k == "exps" {
            Value::Array(
                v.split('.')
                    .map(|x| x.parse::<u64>().map(Value::from))
                    .collect::<std::result::Result<_, _>>()?,
            )
        } else if let Ok(b) = v.parse::<bool>() {
            Value::Bool(b)
        } else {
            Value::from(v.parse::<u64>().with_context(|| format!("bad value in {kv:?}"))?)
        };
        obj.insert(k.into(), value);
    }
    serde_json::from_value(Value::Object(obj)).with_context(|| format!("unknown target {text:?}"))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let ctx = Ctx {
        store: Store::new(&cli.store),
    };
    match cli.command {
        Command::Dicke { m, n } => {
            let dec = dicke_decomposition(m, n)?;
            let env = Envelope::new(TargetDescriptor::Dicke { m, n }, Payload::Symmetric(dec), provenance(None));
            let stored = ctx.emit(&env)?;
            let merge = if n >= 1 && m + n >= 3 {
                let merged = merge_last_pair(&dicke_state(&ExponentVector::new(vec![m, n]))?)?;
                let lower = dicke_state(&ExponentVector::new(vec![m, n - 1]))?;
                let s = equal_up_to_scale(&merged, &lower, 0.0)?;
                json!({ "equal_up_to_scale": s.equal, "scale": s.scale })
            } else {
                Value::Null
            };
            print(&json!({ "certificate": stored, "verify": env.verify()?, "pair_merge": merge }))?;
        }
        Command::Wpower {
            parties,
            n,
            expand,
            bounds,
            ..
        } => {
            if expand {
                let e = wpower_expansion(parties, n)?;
                let h = e.polynomial()?;
                print(&json!({ "monomials": h.num_terms(), "expansion": e }))?;
            } else if bounds {
                print(&serde_json::to_value(BoundReport::new(parties, n)?)?)?;
            } else {
                let dec = wn_constructive_decomposition(parties, n)?;
                let env = Envelope::new(
                    TargetDescriptor::WPower { parties, n },
                    Payload::Symmetric(dec),
                    provenance(None),
                );
                print(&json!({ "certificate": ctx.emit(&env)?, "verify": env.verify()? }))?;
            }
        }
        Command::Monomial { exps } => {
            let dec = monomial_decompose(&ExponentVector::new(exps.clone()))?;
            let env = Envelope::new(TargetDescriptor::Monomial { exps }, Payload::Symmetric(dec), provenance(None));
            print(&json!({ "certificate": ctx.emit(&env)?, "verify": env.verify()? }))?;
        }
        Command::BoundsTable { parties, copies, out } => {
            let ns: Vec<u32> = (copies.0..=copies.1).collect();
            let csv = bounds_table_csv(parties.0..=parties.1, &ns)?;
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
        }
        Command::W3cubed {
            search,
            r,
            seed,
            restarts,
            tol,
        } => {
            let target = TargetDescriptor::WPower { parties: 3, n: 3 };
            if search {
                let mut cfg = AlsConfig::new(r);
                cfg.seed = seed;
                cfg.restarts = restarts;
                cfg.tol = tol;
                let out = symmetric_als(&target.polynomial()?, &cfg)?;
                return finish_search(&ctx, target, out, Some(seed));
            }
            let red = w3_cubed_reduction()?;
            let identity = red.identity_holds()?;
            let env = Envelope::new(target, Payload::Symmetric(w3_cubed_certificate()?), provenance(None));
            print(&json!({
                "reduction_identity": identity,
                "certificate": ctx.emit(&env)?,
                "verify": env.verify()?,
            }))?;
        }
        Command::Strassen => {
            let target = TargetDescriptor::Matmul { d: 2 };
            let bound = flattening_bound_all(&target.state()?)?;
            let cert = Envelope::new(target.clone(), Payload::Product(strassen_certificate()?), provenance(None));
            let relabel = Envelope::new(target, Payload::Witness(epr_relabel_witness()?), provenance(None));
            print(&json!({
                "flattening_bound": bound,
                "certificate": ctx.emit(&cert)?,
                "verify": cert.verify()?,
                "epr_relabel": ctx.emit(&relabel)?,
                "epr_relabel_verify": relabel.verify()?,
            }))?;
        }
        Command::Verify { cert } => {
            let env = store::load(&cert)?;
            let report = env.verify()?;
            print(&serde_json::to_value(&report)?)?;
            if !report.ok {
                bail!(symrank::Error::Verification {
                    what: format!("{:?} certificate {}", env.kind, cert.display()),
                    residual: report.residual,
                });
            }
        }
        Command::GhzConvert { cert } => {
            let env = store::load(&cert)?;
            let check = env.verify()?;
            if !check.ok {
                bail!(symrank::Error::Verification {
                    what: format!("input certificate {}", cert.display()),
                    residual: check.residual,
                });
            }
            let product = match &env.payload {
                Payload::Product(p) => p.clone(),
                Payload::Symmetric(d) => symmetric_to_product(d)?,
                Payload::Witness(_) => bail!("ghz-convert needs a decomposition certificate, got a witness"),
            };
            let witness = ghz_to_state_operators(&product, &env.target.state()?)?;
            let out = Envelope::new(env.target.clone(), Payload::Witness(witness), provenance(None));
            print(&json!({ "witness": ctx.emit(&out)?, "verify": out.verify()? }))?;
        }
        Command::Catalyst { parties, n, simple } => {
            let witness = if simple {
                w_simple_catalysis(parties)?
            } else {
                w_catalysis(parties, n)?
            };
            let n = if simple { 2 } else { n };
            let env = Envelope::new(
                TargetDescriptor::WCatalysis { parties, n, simple },
                Payload::Witness(witness),
                provenance(None),
            );
            print(&json!({ "witness": ctx.emit(&env)?, "verify": env.verify()? }))?;
        }
        Command::SmloccDemo { parties, level } => {
            let level = level.unwrap_or(parties.saturating_sub(1));
            if level == parties.saturating_sub(1) && parties < 5 {
                // same diagnostic as the library's default-level entry point
                symrank::slocc::smlocc_w_demo(parties)?;
            }
            let report = smlocc_w_demo_with_level(parties, level)?;
            let env = Envelope::new(
                TargetDescriptor::WPower {
                    parties: parties as u32,
                    n: 2,
                },
                Payload::Witness(report.witness.clone()),
                provenance(None),
            );
            print(&json!({ "report": report, "witness": ctx.emit(&env)?, "verify": env.verify()? }))?;
        }
        Command::Eliminate { parties, n, coeffs } => {
            let coeffs = read_coeffs(&coeffs)?;
            let elim = lemma_elimination(parties, n, &coeffs)?;
            let target = slot_pattern_state(parties - 1, n, &SlotPattern::new(0..n))?;
            let env = Envelope::new(
                TargetDescriptor::State { state: target },
                Payload::Witness(elim.witness.clone()),
                provenance(None),
            );
            print(&json!({ "steps": elim.steps, "witness": ctx.emit(&env)?, "verify": env.verify()? }))?;
        }
        Command::RankSearch {
            target,
            r,
            seed,
            symmetric,
            restarts,
            max_iters,
            tol,
        } => {
            let target = parse_target(&target)?;
            let mut cfg = AlsConfig::new(r);
            cfg.seed = seed;
            cfg.restarts = restarts;
            cfg.max_iters = max_iters;
            cfg.tol = tol;
            let out = if symmetric {
                symmetric_als(&target.polynomial()?, &cfg)?
            } else {
                cp_als(&target.state()?, &cfg)?
            };
            return finish_search(&ctx, target, out, Some(seed));
        }
        Command::Hyperdet { state } => {
            let text = fs::read_to_string(&state).with_context(|| format!("reading {}", state.display()))?;
            let s: SparseState = serde_json::from_str(&text).context("parsing state")?;
            print(&serde_json::to_value(hyperdet_222(&s)?)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn finish_search(
    ctx: &Ctx,
    target: TargetDescriptor,
    out: symrank::ranksearch::SearchOutcome,
    seed: Option<u64>,
) -> Result<ExitCode> {
    let summary = json!({
        "seed": out.config.seed,
        "rank": out.config.rank,
        "best_residual": out.best_residual,
        "best_restart": out.best_restart,
        "degenerate": out.degenerate,
        "iterations": out.iterations,
        "restarts": out.restarts,
    });
    let Some(cert) = out.certificate else {
        print(&json!({ "search": summary, "certificate": Value::Null }))?;
        eprintln!("no certificate: best residual {:e} >= tol {:e}", out.best_residual, out.config.tol);
        return Ok(ExitCode::from(1));
    };
    let payload = match cert {
        Certificate::Product(p) => Payload::Product(p),
        Certificate::Symmetric(d) => Payload::Symmetric(d),
    };
    // the search accepts a re-check within a relative 1e-6 of its own residual
    let tol = out.config.tol * (1.0 + 1e-6) + 1e-14;
    let env = Envelope::new(target, payload, provenance(seed)).with_tolerance(tol);
    print(&json!({ "search": summary, "certificate": ctx.emit(&env)?, "verify": env.verify()? }))?;
    Ok(ExitCode::SUCCESS)
}

/// 1 for failed verification or non-termination, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let verification = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<symrank::Error>(),
            Some(symrank::Error::Verification { .. } | symrank::Error::NonTermination { .. })
        )
    });
    if verification {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_strings() {
        assert_eq!(
            parse_target("w_power:N=3,n=1").unwrap(),
            TargetDescriptor::WPower { parties: 3, n: 1 }
        );
        assert_eq!(
            parse_target("monomial:exps=2.1.1").unwrap(),
            TargetDescriptor::Monomial { exps: vec![2, 1, 1] }
        );
        assert_eq!(
            parse_target("w_catalysis:N=5,n=2,simple=true").unwrap(),
            TargetDescriptor::WCatalysis {
                parties: 5,
                n: 2,
                simple: true
            }
        );
        assert!(parse_target("nope:x=1").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3:12"), Ok((3, 12)));
        assert!(parse_range("5:2").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn verification_errors_exit_one() {
        let e = anyhow::Error::new(symrank::Error::Verification {
            what: "x".into(),
            residual: 1.0,
        })
        .context("wrapped");
        assert_eq!(exit_code(&e), 1);
        assert_eq!(exit_code(&anyhow!("other")), 2);
    }
}
