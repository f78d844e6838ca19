//! `kronsum`: verification sweeps, searches, localization bounds, Werner-state
//! checks and the reference table.
//!
//! Seed precedence: `--seed` > `KD_SEED` > 0.
//! Exit status: 0 when every asserted check passes, 1 when some check fails
//! (a JSON failure list goes to stderr), 2 on usage or input errors.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kronsum::localization::{brauer, gershgorin, weyl_brauer_bound, weyl_pair_bound, CassiniRegion, DiscRegion};
use kronsum::matrix::{build_x, ComplexMatrix, ConstrainedPair};
use kronsum::reports::{reproduce, verify_family, FamilyKind};
use kronsum::search::{certify, maximize_detailed, CertifyOptions, FamilyRestriction, SearchConfig, Verdict};
use kronsum::spectrum::{eigenvalues, h_split, hermitian_eigenvalues, objective};
use kronsum::werner::{is_npt, min_pt_eigenvalue, werner, werner_pt_eigenvalues};

const MEMBERSHIP_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "kronsum",
    version,
    about = "Top-two singular value probes for constrained Kronecker sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed.
    #[arg(long, env = "KD_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Random sweep over one structured family.
    VerifyFamily {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Pattern-search campaign maximizing σ1² + σ2².
    Search {
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = SearchFamily::None)]
        family: SearchFamily,
        /// Use a diagonal B with `--family family1`.
        #[arg(long)]
        diagonal_b: bool,
        /// One-based σ for `--family family2`, e.g. `2,3,4,5,1`.
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<usize>,
        /// One-based τ for `--family family2`.
        #[arg(long, value_delimiter = ',')]
        tau: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        /// Tolerance for a VIOLATES verdict.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// JSON-lines log of per-restart bests (appended).
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Gershgorin and Brauer regions of a matrix, or Weyl bounds for a pair.
    Localize {
        /// A matrix JSON file, or a pair file with `d`, `A`, `B`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partial-transpose test of a Werner state.
    WernerCheck {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the reference table (JSON plus a CSV alongside).
    Reproduce {
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV path; defaults to the JSON path with a `.csv` extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Normal,
    Family1,
    #[value(name = "family2-rank1")]
    Family2Rank1,
    Family2,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Normal => FamilyKind::Normal,
            FamilyArg::Family1 => FamilyKind::Family1,
            FamilyArg::Family2Rank1 => FamilyKind::Family2Rank1,
            FamilyArg::Family2 => FamilyKind::Family2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchFamily {
    None,
    Normal,
    Family1,
    Family2,
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    generated_unix: u64,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    metadata: Metadata,
    #[serde(flatten)]
    report: T,
}

fn write_report<T: Serialize>(command: &'static str, report: T, out: Option<&Path>) -> Result<()> {
    let envelope = Envelope {
        metadata: Metadata {
            tool: "kronsum",
            version: env!("CARGO_PKG_VERSION"),
            command,
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
        report,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn one_based(p: &[usize], name: &str) -> Result<Vec<usize>> {
    p.iter()
        .map(|&v| v.checked_sub(1).with_context(|| format!("{name} entries start at 1")))
        .collect()
}

/// Outcome of a command: `Ok(failures)`; empty means success.
type Outcome = Result<Vec<String>>;

fn run_verify(family: FamilyArg, d: usize, samples: usize, tol: f64, common: &Common) -> Outcome {
    let report = verify_family(family.into(), d, samples, common.seed, tol)?;
    let failures = report.failures.clone();
    write_report("verify-family", report, common.out.as_deref())?;
    Ok(failures)
}

#[derive(Serialize)]
struct SearchReport {
    result: kronsum::search::SearchResult,
    certificate: kronsum::search::CertifyReport,
}

#[derive(Serialize)]
struct RestartLine<'a> {
    seed: u64,
    d: usize,
    family: &'a FamilyRestriction,
    restart: usize,
    best_objective: f64,
    evaluations: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    d: usize,
    family: SearchFamily,
    diagonal_b: bool,
    sigma: &[usize],
    tau: &[usize],
    restarts: usize,
    max_iters: usize,
    tol: f64,
    log: Option<&Path>,
    common: &Common,
) -> Outcome {
    let restriction = match family {
        SearchFamily::None => FamilyRestriction::None,
        SearchFamily::Normal => FamilyRestriction::Normal,
        SearchFamily::Family1 => FamilyRestriction::Family1 { diagonal_b },
        SearchFamily::Family2 => {
            if sigma.is_empty() || tau.is_empty() {
                bail!("--family family2 needs --sigma and --tau");
            }
            FamilyRestriction::Family2 {
                sigma: one_based(sigma, "sigma")?,
                tau: one_based(tau, "tau")?,
            }
        }
    };
    if family != SearchFamily::Family2 && !(sigma.is_empty() && tau.is_empty()) {
        bail!("--sigma/--tau only apply to --family family2");
    }
    let config = SearchConfig {
        restarts,
        max_iters,
        ..SearchConfig::new(d, restriction, common.seed)
    };
    let (result, outcomes) = maximize_detailed(&config)?;
    if let Some(path) = log {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let mut w = BufWriter::new(file);
        for o in &outcomes {
            let line = RestartLine {
                seed: config.seed,
                d,
                family: &config.family,
                restart: o.restart,
                best_objective: o.best_objective,
                evaluations: o.evaluations,
            };
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
        w.flush()?;
    }
    let certificate = certify(
        &result,
        CertifyOptions {
            violation_tol: tol,
            ..CertifyOptions::default()
        },
    )?;
    let mut failures = Vec::new();
    // At d = 3 violations are expected.
    if certificate.verdict == Verdict::Violates && d >= 4 {
        failures.push(format!("VIOLATES: objective {:.12} exceeds 1/2", certificate.objective));
    }
    write_report("search", SearchReport { result, certificate }, common.out.as_deref())?;
    Ok(failures)
}

/// `[re, im]`, matching the matrix entry format.
#[derive(Serialize)]
struct ComplexRepr(f64, f64);

#[derive(Serialize)]
struct MatrixLocalization {
    input: &'static str,
    order: usize,
    eigenvalues: Vec<ComplexRepr>,
    gershgorin: DiscRegion,
    brauer: Option<CassiniRegion>,
    outside_gershgorin: usize,
    outside_brauer: usize,
}

#[derive(Serialize)]
struct PairLocalization {
    input: &'static str,
    d: usize,
    objective: f64,
    lambda2: f64,
    weyl_pair_bound: f64,
    weyl_brauer_bound: f64,
    gram: MatrixLocalization,
}

fn localize_matrix(m: &ComplexMatrix, failures: &mut Vec<String>) -> Result<MatrixLocalization> {
    let n = m.ensure_square()?;
    let eigs = if m.is_hermitian(kronsum::spectrum::HERMITIAN_TOL) {
        hermitian_eigenvalues(m)?.into_iter().map(|v| v.into()).collect()
    } else {
        eigenvalues(m)?
    };
    let discs = gershgorin(m)?;
    let ovals = if n >= 2 { Some(brauer(m)?) } else { None };
    let outside_gershgorin = eigs
        .iter()
        .filter(|&&s| !discs.contains_inflated(s, MEMBERSHIP_SLACK))
        .count();
    let outside_brauer = match &ovals {
        Some(o) => eigs
            .iter()
            .filter(|&&s| !o.contains_inflated(s, MEMBERSHIP_SLACK))
            .count(),
        None => 0,
    };
    if outside_gershgorin > 0 {
        failures.push(format!("{outside_gershgorin} eigenvalues outside the Gershgorin discs"));
    }
    if outside_brauer > 0 {
        failures.push(format!("{outside_brauer} eigenvalues outside the Brauer ovals"));
    }
    Ok(MatrixLocalization {
        input: "matrix",
        order: n,
        eigenvalues: eigs.iter().map(|z| ComplexRepr(z.re, z.im)).collect(),
        gershgorin: discs,
        brauer: ovals,
        outside_gershgorin,
        outside_brauer,
    })
}

fn run_localize(input: &Path, out: Option<&Path>) -> Outcome {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("input is not JSON")?;
    let mut failures = Vec::new();
    if value.get("A").is_some() && value.get("B").is_some() {
        let pair: ConstrainedPair = serde_json::from_value(value).context("invalid pair file")?;
        let x = build_x(&pair)?;
        let gram = x.gram();
        let split = h_split(&pair);
        let eigs = hermitian_eigenvalues(&gram)?;
        let weyl = weyl_pair_bound(&split.h1, &split.h2)?;
        let weyl_brauer = weyl_brauer_bound(&split.h1, &split.h2)?;
        if eigs[1] > weyl + MEMBERSHIP_SLACK {
            failures.push(format!("lambda2 {:.12} exceeds the Weyl bound {weyl:.12}", eigs[1]));
        }
        let mut gram_report = localize_matrix(&gram, &mut failures)?;
        gram_report.input = "gram";
        let report = PairLocalization {
            input: "pair",
            d: pair.d(),
            objective: objective(&pair)?.objective,
            lambda2: eigs[1],
            weyl_pair_bound: weyl,
            weyl_brauer_bound: weyl_brauer,
            gram: gram_report,
        };
        write_report("localize", report, out)?;
    } else {
        let m: ComplexMatrix = serde_json::from_value(value).context("invalid matrix file")?;
        let report = localize_matrix(&m, &mut failures)?;
        write_report("localize", report, out)?;
    }
    Ok(failures)
}

#[derive(Serialize)]
struct WernerReport {
    d: usize,
    alpha: f64,
    is_npt: bool,
    min_pt_eigenvalue: f64,
    expected_min_pt_eigenvalue: f64,
    threshold: f64,
    expected_npt: bool,
}

fn run_werner(d: usize, alpha: f64, out: Option<&Path>) -> Outcome {
    let state = werner(d, alpha)?;
    let npt = is_npt(&state)?;
    let min = min_pt_eigenvalue(&state)?;
    let expected_min = *werner_pt_eigenvalues(d, alpha).last().expect("nonempty");
    let expected_npt = expected_min < -kronsum::werner::NPT_TOL;
    let mut failures = Vec::new();
    if (min - expected_min).abs() > 1e-12 {
        failures.push(format!(
            "min eigenvalue {min:.15} differs from closed form {expected_min:.15}"
        ));
    }
    if npt != expected_npt {
        failures.push(format!("NPT = {npt}, closed form says {expected_npt}"));
    }
    let report = WernerReport {
        d,
        alpha,
        is_npt: npt,
        min_pt_eigenvalue: min,
        expected_min_pt_eigenvalue: expected_min,
        threshold: -1.0 / d as f64,
        expected_npt,
    };
    write_report("werner-check", report, out)?;
    Ok(failures)
}

fn run_reproduce(out: Option<&Path>, csv_path: Option<&Path>) -> Outcome {
    let report = reproduce()?;
    let csv_path = csv_path
        .map(Path::to_path_buf)
        .or_else(|| out.map(|p| p.with_extension("csv")));
    if let Some(path) = csv_path {
        let mut w =
            csv::Writer::from_writer(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        for row in &report.rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let failures = report
        .failures()
        .iter()
        .map(|r| format!("{}: computed {:.12}, expected {:.12}", r.id, r.computed, r.expected))
        .collect();
    write_report("reproduce", report, out)?;
    Ok(failures)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::VerifyFamily {
            family,
            d,
            samples,
            tol,
            common,
        } => run_verify(family, d, samples, tol, &common),
        Command::Search {
            d,
            family,
            diagonal_b,
            sigma,
            tau,
            restarts,
            max_iters,
            tol,
            log,
            common,
        } => run_search(
            d,
            family,
            diagonal_b,
            &sigma,
            &tau,
            restarts,
            max_iters,
            tol,
            log.as_deref(),
            &common,
        ),
        Command::Localize { input, out } => run_localize(&input, out.as_deref()),
        Command::WernerCheck { d, alpha, out } => run_werner(d, alpha, out.as_deref()),
        Command::Reproduce { out, csv } => run_reproduce(out.as_deref(), csv.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{}", serde_json::json!({ "failures": failures }));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
