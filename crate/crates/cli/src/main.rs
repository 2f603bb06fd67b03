use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gradiso::classify;
use gradiso::groebner::{self, Limits, TermOrder};
use gradiso::isotest::{self, IsoOptions, IsoVerdict, Outcome};
use gradiso::present::Mode;
use gradiso::{HilbertSeries, Presentation, TruncatedAlgebra};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gradiso", version, about = "Graded isomorphism testing for graded algebras over GF(p)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Degree bound for the truncated engines
    #[arg(long, global = true, value_name = "D")]
    max_degree: Option<u32>,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Accepted for compatibility; every algorithm here is deterministic
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Maximum number of monomials of one degree
    #[arg(long, global = true, value_name = "N")]
    monomial_ceiling: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Hilbert series and dimensions of a presentation
    Hilbert { file: PathBuf },
    /// Decide whether two presentations define graded isomorphic algebras
    Iso {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Disable subset pruning
        #[arg(long)]
        no_prune: bool,
        /// Cross-check against brute-force enumeration
        #[arg(long)]
        oracle: bool,
        /// Verify and print the certificate; with FILE, verify that certificate instead of searching
        #[arg(long, value_name = "FILE", num_args = 0..=1)]
        certificate: Option<Option<PathBuf>>,
    },
    /// Partition a directory of presentation files into isomorphism classes
    Classify {
        dir: PathBuf,
        /// Write the JSON report here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Same as `iso --no-prune --oracle`
    Oracle { file_a: PathBuf, file_b: PathBuf },
}

const EXIT_NOT_ISOMORPHIC: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn load(path: &Path) -> Result<Presentation> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Presentation::parse(&text).with_context(|| format!("{}", path.display()))
}

fn options(g: &Global) -> IsoOptions {
    let mut o = IsoOptions {
        max_degree: g.max_degree,
        ..IsoOptions::default()
    };
    if let Some(c) = g.monomial_ceiling {
        o.monomial_ceiling = c;
    }
    o
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Hilbert { ref file } => hilbert(&cli.global, file),
        Command::Iso {
            ref file_a,
            ref file_b,
            no_prune,
            oracle,
            ref certificate,
        } => iso(&cli.global, file_a, file_b, !no_prune, oracle, certificate.as_ref()),
        Command::Oracle { ref file_a, ref file_b } => iso(&cli.global, file_a, file_b, false, true, None),
        Command::Classify { ref dir, ref out } => classify_cmd(&cli.global, dir, out.as_deref()),
    }
}

fn hilbert(g: &Global, file: &Path) -> Result<u8> {
    let p = load(file)?;
    let bound = g.max_degree.unwrap_or_else(|| isotest::default_bound(&p));
    let t = match g.monomial_ceiling {
        Some(c) => TruncatedAlgebra::build_with_ceiling(&p, bound, c),
        None => TruncatedAlgebra::build(&p, bound),
    }
    .with_context(|| format!("{}", file.display()))?;
    let dims = t.dims();
    let series = match p.mode() {
        Mode::Commutative => {
            let gb = groebner::groebner(&p.algebra, &p.relations, TermOrder::Degrevlex, None, Limits::default())?;
            gb.series()
        }
        Mode::Associative => match &p.series {
            Some(s) => HilbertSeries::Exact(s.clone()),
            None => HilbertSeries::Truncated(t.series()),
        },
    };
    let shown = match &series {
        HilbertSeries::Exact(s) => s.display_over(&p.generators().degrees()),
        HilbertSeries::Truncated(s) => s.to_string(),
    };
    if g.json {
        let v = json!({
            "name": p.name,
            "mode": p.mode().to_string(),
            "exact": series.is_exact(),
            "series": shown,
            "degree_bound": bound,
            "dims": dims,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{}: {shown}", p.name);
        let d: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
        println!("dims: {}", d.join(" "));
    }
    Ok(0)
}

fn exit_code(o: Outcome) -> u8 {
    match o {
        Outcome::Isomorphic => 0,
        Outcome::NotIsomorphic => EXIT_NOT_ISOMORPHIC,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn read_certificate(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("{}: not JSON", path.display()))?;
    // either a bare map or a verdict carrying one
    let map = match v.get("certificate") {
        Some(c) => c.clone(),
        None => v,
    };
    serde_json::from_value(map).with_context(|| format!("{}: expected generator -> polynomial map", path.display()))
}

fn iso(g: &Global, fa: &Path, fb: &Path, prune: bool, oracle: bool, certificate: Option<&Option<PathBuf>>) -> Result<u8> {
    let (a, b) = (load(fa)?, load(fb)?);

    if let Some(Some(path)) = certificate {
        let cert = read_certificate(path)?;
        let images = isotest::parse_certificate(&a, &b, &cert)?;
        let valid = isotest::verify_certificate(&a, &b, &images)?;
        println!("{}", serde_json::to_string_pretty(&json!({ "certificate": cert, "valid": valid }))?);
        return Ok(if valid { 0 } else { EXIT_NOT_ISOMORPHIC });
    }

    let opts = IsoOptions {
        prune,
        ..options(g)
    };
    let verdict = isotest::graded_isomorphism(&a, &b, &opts)?;
    let mut out = serde_json::to_value(&verdict)?;

    if certificate.is_some() {
        let valid = match &verdict.images {
            Some(images) => isotest::verify_certificate(&a, &b, images)?,
            None => false,
        };
        out["certificate_verified"] = json!(valid);
        if let Some(cert) = &verdict.certificate {
            for (k, v) in cert {
                eprintln!("{k} -> {v}");
            }
        }
    }

    if oracle {
        let brute_opts = IsoOptions {
            max_degree: opts.max_degree,
            monomial_ceiling: opts.monomial_ceiling,
            ..IsoOptions::oracle()
        };
        let brute = isotest::graded_isomorphism(&a, &b, &brute_opts)?;
        let agree = brute.outcome == verdict.outcome;
        out["oracle"] = json!({
            "outcome": brute.outcome,
            "enumerated": brute.statistics.enumerated,
            "agree": agree,
        });
        if !agree {
            println!("{}", serde_json::to_string_pretty(&out)?);
            bail!("search and brute force disagree: {} vs {}", verdict.outcome, brute.outcome);
        }
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    summary(&verdict);
    Ok(exit_code(verdict.outcome))
}

fn summary(v: &IsoVerdict) {
    match &v.reason {
        Some(r) => eprintln!("{}: {r}", v.outcome),
        None => eprintln!("{}", v.outcome),
    }
}

fn classify_cmd(g: &Global, dir: &Path, out: Option<&Path>) -> Result<u8> {
    let report =
        classify::classify_dir(dir, &options(g)).with_context(|| format!("reading directory {}", dir.display()))?;
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if g.json {
        println!("{text}");
    } else {
        println!(
            "{} presentations, {} errors, {} classes",
            report.totals.presentations, report.totals.errors, report.totals.classes
        );
        for c in &report.classes {
            println!("  {{{}}}", c.join(", "));
        }
        for e in report.entries.iter().filter(|e| e.error.is_some()) {
            println!("  error in {}: {}", e.label, e.error.as_deref().unwrap_or(""));
        }
    }
    Ok(0)
}
