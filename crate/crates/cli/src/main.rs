use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use catprob::diagram::{dyadic_error, make_dyadic, DyadicGround};
use catprob::io::{from_json, FamilyDoc, GroundDoc, Lit, MapDoc, MeasureDoc, MetcatDoc, RvDoc, SpaceDoc};
use catprob::suite::{self, SuiteReport};
use catprob::{kolmogorov_extend, martingale_limit, rn_family, second_moment_gap, Rational, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

/// Exact and floating-point experiments on finite probability spaces,
/// filtrations and pseudometric spaces.
#[derive(Debug, Parser)]
#[command(name = "catprob", version)]
struct Cli {
    /// Arithmetic backend.
    #[arg(long, env = "CATPROB_BACKEND", value_enum, default_value_t = Backend::Exact, global = true)]
    backend: Backend,
    /// Equality tolerance of the float backend.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of a measure and the residual of rebuilding the measure from it.
    Rn {
        /// Space document; optional when the measure embeds its space.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        measure: PathBuf,
        /// Also check that the measure is at most this multiple of the base measure.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Conditional expectation along a map, with the integral residual over
    /// every subset of the target.
    Condexp {
        #[arg(long)]
        map: PathBuf,
        /// Random variable on the source of the map.
        #[arg(long)]
        rv: PathBuf,
    },
    /// Dyadic averages of a piecewise-affine ground function on [0, 1].
    Martingale {
        /// `identity`, `reverse`, `constant:<c>` or a ground document.
        #[arg(long, default_value = "identity")]
        ground: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Extension of a consistent measure family to the top space.
    Extend {
        #[arg(long)]
        family: PathBuf,
    },
    /// Symmetric-difference distance between two parallel maps.
    Mapdist {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// Also report the distance scaled by this bound.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Metric constructions from a batch document, with axiom scans.
    Metcat {
        file: PathBuf,
    },
    /// Second-moment identities on random refinement triples.
    CheckAppendix(SuiteArgs),
    /// Density round trips, isometry and the naturality square.
    CheckNaturality(SuiteArgs),
    /// Lipschitz estimates in the map.
    CheckLipschitz(SuiteArgs),
    /// Metric constructions on random spaces.
    CheckMetric(SuiteArgs),
    /// Reconstruction of random variables from induced martingales.
    CheckReconstruction(SuiteArgs),
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
}

/// Rendered report plus the failures that set the exit status.
struct Output {
    text: String,
    failures: Vec<String>,
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn lits<S: Scalar>(xs: &[S]) -> Vec<String> {
    xs.iter().map(S::to_literal).collect()
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_only(format: Format, command: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("{command} has no csv output");
    }
    Ok(())
}

fn rn<S: Scalar>(space: Option<&Path>, measure: &Path, bound: Option<&str>, format: Format) -> Result<Output> {
    json_only(format, "rn")?;
    let space = match space {
        Some(p) => Some(read_doc::<SpaceDoc>(p)?.decode::<S>()?),
        None => None,
    };
    let mu = read_doc::<MeasureDoc>(measure)?.decode(space.as_ref())?;
    let density = mu.rn_derivative();
    let residual = catprob::rho(&density).tv_distance(&mu)?;
    let mut failures = Vec::new();
    if !residual.approx_zero() {
        failures.push(format!("roundtrip residual {residual}"));
    }
    let mut report = json!({
        "backend": S::NAME,
        "atoms": mu.space().atoms(),
        "derivative": lits(density.values()),
        "residual": residual.to_literal(),
    });
    if let Some(b) = bound {
        let r: S = Lit::Text(b.to_string()).parse()?;
        let ok = mu.bound_check(&r);
        if !ok {
            failures.push(format!("measure exceeds {r} times the base measure"));
        }
        report["bounded"] = json!(ok);
    }
    Ok(Output {
        text: json_text(&report),
        failures,
    })
}

/// Subsets of the target are enumerated, so keep it small.
const MAX_SUBSET_ATOMS: usize = 16;

fn condexp<S: Scalar>(map: &Path, rv: &Path, format: Format) -> Result<Output> {
    let f = read_doc::<MapDoc>(map)?.decode::<S>()?;
    let x = read_doc::<RvDoc>(rv)?.decode(Some(f.src()))?;
    let target = f.dst();
    if target.len() > MAX_SUBSET_ATOMS {
        bail!("target has {} atoms; subset scan is limited to {MAX_SUBSET_ATOMS}", target.len());
    }
    let cond = x.cond_exp(&f)?;
    let rows: Vec<(Vec<&str>, S)> = (0u64..1 << target.len())
        .map(|mask| {
            let atoms = (0..target.len()).filter(|b| mask >> b & 1 == 1).map(|b| target.atom(b)).collect();
            (atoms, x.subset_residual(&cond, &f, mask))
        })
        .collect();
    let failures = rows
        .iter()
        .filter(|(_, r)| !r.approx_zero())
        .map(|(atoms, r)| format!("subset {{{}}}: residual {r}", atoms.join(",")))
        .collect();
    let text = match format {
        Format::Json => json_text(&json!({
            "backend": S::NAME,
            "atoms": target.atoms(),
            "cond_exp": lits(cond.values()),
            "subsets": rows
                .iter()
                .map(|(atoms, r)| json!({"atoms": atoms, "residual": r.to_literal()}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => csv_text(
            &["subset", "residual"],
            &rows
                .iter()
                .map(|(atoms, r)| vec![atoms.join(" "), r.to_literal()])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Output { text, failures })
}

fn ground<S: Scalar>(source: &str) -> Result<DyadicGround<S>> {
    Ok(match source {
        "identity" => DyadicGround::identity(),
        "reverse" => DyadicGround::reverse(),
        _ => match source.strip_prefix("constant:") {
            Some(c) => DyadicGround::constant(Lit::Text(c.to_string()).parse()?)?,
            None => read_doc::<GroundDoc>(Path::new(source))?.decode()?,
        },
    })
}

fn martingale<S: Scalar>(source: &str, depth: u32, format: Format) -> Result<Output> {
    let dg = ground::<S>(source)?;
    let exp = make_dyadic(&dg, depth)?;
    let order = exp.diagram.chain_order()?;
    let mut rows = Vec::with_capacity(order.len());
    for (n, &i) in order.iter().enumerate() {
        let gap = match n {
            0 => S::zero(),
            _ => second_moment_gap(&exp.martingale, order[n - 1], i)?,
        };
        rows.push([
            n.to_string(),
            dyadic_error(&dg, n as u32).to_literal(),
            exp.martingale.level(i).second_moment().to_literal(),
            gap.to_literal(),
        ]);
    }
    let text = match format {
        Format::Json => json_text(&json!({
            "backend": S::NAME,
            "ground": source,
            "limit_second_moment": dg.second_moment().to_literal(),
            "rows": rows
                .iter()
                .map(|r| json!({"depth": r[0], "l1_error": r[1], "second_moment": r[2], "gap": r[3]}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => csv_text(
            &["depth", "l1_error", "second_moment", "gap"],
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        )?,
    };
    Ok(Output {
        text,
        failures: Vec::new(),
    })
}

fn extend<S: Scalar>(family: &Path, format: Format) -> Result<Output> {
    json_only(format, "extend")?;
    let fam = read_doc::<FamilyDoc>(family)?.decode::<S>()?;
    let ext = kolmogorov_extend(&fam)?;
    let density = ext.rn_derivative();
    let limit = martingale_limit(&rn_family(&fam)?)?;
    let residual = density.l1_distance(&limit)?;
    let failures = if residual.approx_zero() {
        Vec::new()
    } else {
        vec![format!("density of the extension differs from the density limit by {residual}")]
    };
    let report = json!({
        "backend": S::NAME,
        "extension": MeasureDoc::encode(&ext, true),
        "density": lits(density.values()),
        "square_residual": residual.to_literal(),
    });
    Ok(Output {
        text: json_text(&report),
        failures,
    })
}

fn mapdist<S: Scalar>(f: &Path, g: &Path, bound: Option<&str>, format: Format) -> Result<Output> {
    json_only(format, "mapdist")?;
    let f = read_doc::<MapDoc>(f)?.decode::<S>()?;
    let g = read_doc::<MapDoc>(g)?.decode_from::<S>(f.src())?;
    let mut report = json!({
        "backend": S::NAME,
        "distance": f.distance(&g)?.to_literal(),
        "disagreement": f.disagreement_mass(&g)?.to_literal(),
        "equal_as_maps": f.as_equal(&g)?,
    });
    if let Some(b) = bound {
        let r: S = Lit::Text(b.to_string()).parse()?;
        report["scaled"] = json!(f.distance_scaled(&g, &r)?.to_literal());
    }
    Ok(Output {
        text: json_text(&report),
        failures: Vec::new(),
    })
}

fn metcat<S: Scalar>(file: &Path, format: Format) -> Result<Output> {
    json_only(format, "metcat")?;
    let report = read_doc::<MetcatDoc>(file)?.run::<S>()?;
    Ok(Output {
        text: json_text(&serde_json::to_value(&report)?),
        failures: report.failures(),
    })
}

fn suite_output(report: SuiteReport, format: Format) -> Result<Output> {
    let failures = report
        .properties
        .iter()
        .filter(|p| !p.passed())
        .flat_map(|p| {
            std::iter::once(format!("{}: {} of {} trials failed", p.id, p.failures, p.trials))
                .chain(p.examples.iter().map(move |e| format!("{}: {e}", p.id)))
        })
        .collect();
    let text = match format {
        Format::Json => json_text(&serde_json::to_value(&report)?),
        Format::Csv => csv_text(
            &["id", "trials", "failures"],
            &report
                .properties
                .iter()
                .map(|p| vec![p.id.to_string(), p.trials.to_string(), p.failures.to_string()])
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Output { text, failures })
}

fn run<S: Scalar>(command: &Command, format: Format) -> Result<Output> {
    match command {
        Command::Rn { space, measure, bound } => rn::<S>(space.as_deref(), measure, bound.as_deref(), format),
        Command::Condexp { map, rv } => condexp::<S>(map, rv, format),
        Command::Martingale { ground, depth } => martingale::<S>(ground, *depth, format),
        Command::Extend { family } => extend::<S>(family, format),
        Command::Mapdist { f, g, bound } => mapdist::<S>(f, g, bound.as_deref(), format),
        Command::Metcat { file } => metcat::<S>(file, format),
        Command::CheckAppendix(a) => suite_output(suite::moments::<S>(a.seed, a.trials)?, format),
        Command::CheckNaturality(a) => suite_output(suite::naturality::<S>(a.seed, a.trials)?, format),
        Command::CheckLipschitz(a) => suite_output(suite::lipschitz::<S>(a.seed, a.trials)?, format),
        Command::CheckMetric(a) => suite_output(suite::metric::<S>(a.seed, a.trials)?, format),
        Command::CheckReconstruction(a) => suite_output(suite::reconstruction::<S>(a.seed, a.trials)?, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) if out.failures.is_empty() => ExitCode::SUCCESS,
        Ok(out) => {
            eprintln!("{} failure(s):", out.failures.len());
            for f in &out.failures {
                eprintln!("  {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            bail!("--tol must be a positive number");
        }
        catprob::scalar::set_f64_tolerance(tol);
    }
    let out = match cli.backend {
        Backend::Exact => run::<Rational>(&cli.command, cli.format)?,
        Backend::Float => run::<f64>(&cli.command, cli.format)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", out.text),
    }
    Ok(out)
}
