use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crosspoly_core::exact::RationalVector;
use crosspoly_core::kissing::{
    certify, construct_x, hadwiger_bound, lattice_kissing_upper_bound, verify_kissing_configuration,
    CodeParams, ConfigFile,
};
use crosspoly_core::lattice::{
    covering_radius_h2sum, find_signed_permutation_equivalence, is_deep_hole_h2sum,
    minimal_vectors, Lattice, LatticeCatalog, LatticeFile,
};
use crosspoly_core::rates::{
    blichfeldt_integral_identity, blichfeldt_monte_carlo, cap_cylinder_bound_check, upper_sweep,
    RateArgs, RateRegistry, SweepRanges,
};
use crosspoly_core::reproduce::run_all;
use crosspoly_core::Error;

#[derive(Parser)]
#[command(name = "crosspoly", version, about = "Kissing configurations of the cross-polytope")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true, env = "CROSSPOLY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice computations in the ℓ¹ norm.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Kissing configurations and the {0,±1,±2} code.
    #[command(subcommand)]
    Kissing(KissingCmd),
    /// Exponential rates of the bounds.
    Rates(RatesArgs),
    /// Run every reference check.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Minimal vectors of a named lattice or a basis file.
    MinVectors {
        #[arg(long, conflicts_with = "basis", required_unless_present = "basis")]
        name: Option<String>,
        /// Dimension for families such as zn, dn, dn_plus.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Signed permutation carrying lattice b onto lattice a.
    Equiv {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Deep-hole test in H2+H2 for a point such as "1/4,1/4,1/4,1/4".
    DeepHole {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Covering radius of H2+H2 with its certificate.
    CoveringH2sum,
    /// Keys of the lattice catalog.
    List,
}

#[derive(Subcommand)]
enum KissingCmd {
    /// Check a configuration file {"n", "scale", "points"}.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build the code X, or a greedy configuration with its certificate.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        #[arg(long)]
        greedy: bool,
    },
    /// Hadwiger bound 3^n-1 and lattice bound 12(2^n-1).
    Bounds {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct RatesArgs {
    /// A rate function (see `rates list`), or one of sweep, identity, cap, list.
    function: String,
    #[arg(long)]
    z1: Option<f64>,
    #[arg(long)]
    z2: Option<f64>,
    #[arg(long)]
    y1: Option<f64>,
    #[arg(long)]
    y2: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "R")]
    r: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// CSV destination for `sweep`; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid points per axis for `sweep`.
    #[arg(long)]
    steps: Option<usize>,
    /// Sphere radius for `cap`.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Cap height for `cap`.
    #[arg(long, default_value_t = 0.2)]
    height: f64,
    /// Monte Carlo samples for `identity` and `cap`.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
}

#[derive(Subcommand)]
enum ReproduceCmd {
    /// Run all acceptance checks.
    All,
}

/// Error carrying an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = e
            .downcast_ref::<Error>()
            .is_some_and(|e| matches!(e, Error::UnknownName { .. } | Error::Parse(_)));
        Self {
            code: if usage { 2 } else { 1 },
            message: format!("{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Output and whether every asserted check held.
struct Outcome {
    body: String,
    ok: bool,
    failing: Vec<String>,
}

impl Outcome {
    fn passed(body: String) -> Self {
        Self {
            body,
            ok: true,
            failing: Vec::new(),
        }
    }
}

fn render(value: &impl Serialize, format: Format) -> Result<String, Failure> {
    let v = serde_json::to_value(value).map_err(anyhow::Error::from)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&v).map_err(anyhow::Error::from)? + "\n"),
        Format::Text => Ok(text(&v)),
        Format::Csv => Err(usage("csv output is only available for `rates sweep` and `reproduce all`")),
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}\n"),
                other => format!("{k}: {other}\n"),
            })
            .collect(),
        other => format!("{other}\n"),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))
}

fn big(v: num_bigint::BigUint) -> Value {
    u64::try_from(&v).map_or_else(|_| Value::String(v.to_string()), Value::from)
}

fn lattice_cmd(cmd: LatticeCmd, format: Format) -> Result<Outcome, Failure> {
    let catalog = LatticeCatalog::default();
    let body = match cmd {
        LatticeCmd::MinVectors { name, n, basis } => {
            let lattice: Lattice = match (name, basis) {
                (Some(name), _) => catalog.build(&name, n)?,
                (None, Some(path)) => read_json::<LatticeFile>(&path)?.into_lattice()?,
                (None, None) => return Err(usage("give --name or --basis")),
            };
            render(&minimal_vectors(&lattice)?.report(), format)?
        }
        LatticeCmd::Equiv { a, b, n } => {
            let (la, lb) = (catalog.build(&a, n)?, catalog.build(&b, n)?);
            let sigma = find_signed_permutation_equivalence(&la, &lb)?;
            let v = match sigma {
                Some(s) => json!({ "a": a, "b": b, "equivalent": true, "sigma": s }),
                None => json!({ "a": a, "b": b, "equivalent": false, "sigma": "none" }),
            };
            render(&v, format)?
        }
        LatticeCmd::DeepHole { point } => {
            let y = RationalVector::parse(&point)?;
            render(&is_deep_hole_h2sum(&y)?, format)?
        }
        LatticeCmd::CoveringH2sum => {
            let cert = covering_radius_h2sum()?;
            let ok = cert.verified();
            return Ok(Outcome {
                body: render(&cert, format)?,
                ok,
                failing: if ok { vec![] } else { vec!["covering certificate".into()] },
            });
        }
        LatticeCmd::List => {
            let entries: Vec<Value> = catalog
                .keys()
                .map(|k| {
                    let e = catalog.get(k).expect("listed key");
                    json!({ "key": k, "dim": e.fixed_dim(), "description": e.description() })
                })
                .collect();
            render(&entries, format)?
        }
    };
    Ok(Outcome::passed(body))
}

fn kissing_cmd(cmd: KissingCmd, format: Format) -> Result<Outcome, Failure> {
    match cmd {
        KissingCmd::Verify { config } => {
            let cfg = read_json::<ConfigFile>(&config)?.into_configuration()?;
            let report = verify_kissing_configuration(&cfg)?;
            let ok = report.valid;
            Ok(Outcome {
                body: render(&report, format)?,
                ok,
                failing: if ok { vec![] } else { vec!["configuration validity".into()] },
            })
        }
        KissingCmd::Build { n, m1, m2, greedy } => {
            let params = CodeParams::new(n, m1, m2)?;
            if greedy {
                let (cert, cfg) = certify(&params)?;
                let ok = cert.valid && cert.meets_floor;
                let v = json!({ "certificate": cert, "configuration": cfg.to_file() });
                Ok(Outcome {
                    body: render(&v, format)?,
                    ok,
                    failing: if ok { vec![] } else { vec!["greedy configuration".into()] },
                })
            } else {
                let set = construct_x(&params)?;
                let v = json!({
                    "params": params,
                    "sizeX": set.len(),
                    "configuration": set.to_configuration().to_file(),
                });
                Ok(Outcome::passed(render(&v, format)?))
            }
        }
        KissingCmd::Bounds { n } => {
            let v = json!({
                "n": n,
                "hadwiger": big(hadwiger_bound(n)?),
                "lattice_upper": big(lattice_kissing_upper_bound(n)?),
            });
            Ok(Outcome::passed(render(&v, format)?))
        }
    }
}

fn rates_cmd(a: RatesArgs, format: Format, seed: u64) -> Result<Outcome, Failure> {
    let registry = RateRegistry::default();
    match a.function.as_str() {
        "list" => {
            let entries: Vec<Value> = registry
                .names()
                .map(|k| {
                    let f = registry.get(k).expect("listed name");
                    json!({ "name": k, "args": f.args(), "description": f.description() })
                })
                .collect();
            Ok(Outcome::passed(render(&entries, format)?))
        }
        "sweep" => {
            let mut ranges = SweepRanges::default();
            if let Some(s) = a.steps {
                ranges.b.2 = s;
                ranges.c.2 = s;
                ranges.r.2 = s;
            }
            let rows = upper_sweep(&ranges)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row).map_err(anyhow::Error::from)?;
            }
            let data = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)
                .map_err(anyhow::Error::from)?;
            match a.out {
                Some(path) => {
                    fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
                    let best = rows
                        .iter()
                        .filter_map(|r| r.upper_base.map(|u| (u, r)))
                        .min_by(|x, y| x.0.total_cmp(&y.0));
                    let v = json!({
                        "rows": rows.len(),
                        "feasible": rows.iter().filter(|r| r.feasible).count(),
                        "best": best.map(|(_, r)| r),
                        "out": path,
                    });
                    Ok(Outcome::passed(render(&v, format)?))
                }
                None => Ok(Outcome::passed(data)),
            }
        }
        "identity" => {
            let n = a.n.ok_or_else(|| usage("rates identity needs --n"))?;
            let check = blichfeldt_integral_identity(n)?;
            let mc = blichfeldt_monte_carlo(n, a.samples, seed);
            let ok = check.holds;
            let v = json!({ "identity": check, "monte_carlo": { "samples": a.samples, "seed": seed, "estimate": mc } });
            Ok(Outcome {
                body: render(&v, format)?,
                ok,
                failing: if ok { vec![] } else { vec![format!("identity at n={n}")] },
            })
        }
        "cap" => {
            let n = a.n.ok_or_else(|| usage("rates cap needs --n"))?;
            let rep = cap_cylinder_bound_check(n, a.radius, a.height, a.samples, seed)?;
            let ok = rep.holds;
            Ok(Outcome {
                body: render(&rep, format)?,
                ok,
                failing: if ok { vec![] } else { vec!["cap below cylinder".into()] },
            })
        }
        name => {
            let mut args = RateArgs::new();
            for (k, v) in [
                ("z1", a.z1),
                ("z2", a.z2),
                ("y1", a.y1),
                ("y2", a.y2),
                ("grid", a.grid.map(|g| g as f64)),
                ("b", a.b),
                ("c", a.c),
                ("R", a.r),
                ("n", a.n.map(|n| n as f64)),
            ] {
                if let Some(v) = v {
                    args = args.set(k, v);
                }
            }
            let report = registry.evaluate(name, &args)?;
            Ok(Outcome::passed(render(&report, format)?))
        }
    }
}

fn reproduce_cmd(format: Format, seed: u64) -> Result<Outcome, Failure> {
    let results = run_all(seed);
    let ok = results.iter().all(|r| r.pass());
    let failing = results
        .iter()
        .flat_map(|r| r.failing().map(move |i| format!("criterion {}: {}", r.number, i.item)))
        .collect();
    let body = match format {
        Format::Json => render(&results, format)?,
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                s += &format!("[{}] {} {}\n", if r.pass() { "PASS" } else { "FAIL" }, r.number, r.title);
                for i in &r.items {
                    s += &format!(
                        "    {:<4} {:<58} expected {:<24} computed {}\n",
                        if i.pass { "ok" } else { "FAIL" },
                        i.item,
                        i.expected,
                        i.computed
                    );
                }
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["criterion", "item", "expected", "computed", "pass"])
                .map_err(anyhow::Error::from)?;
            for r in &results {
                for i in &r.items {
                    w.write_record([
                        r.number.to_string(),
                        i.item.clone(),
                        i.expected.clone(),
                        i.computed.clone(),
                        i.pass.to_string(),
                    ])
                    .map_err(anyhow::Error::from)?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?).map_err(anyhow::Error::from)?
        }
    };
    Ok(Outcome { body, ok, failing })
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    match cli.command {
        Command::Lattice(c) => lattice_cmd(c, cli.format),
        Command::Kissing(c) => kissing_cmd(c, cli.format),
        Command::Rates(a) => rates_cmd(a, cli.format, cli.seed),
        Command::Reproduce(ReproduceCmd::All) => reproduce_cmd(cli.format, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.body.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                for f in &out.failing {
                    eprintln!("failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
