use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use entwit::concentration::{sample_concentration, MeasurementKind};
use entwit::detection::{sweep_fn, DEFAULT_GRID_POINTS, DEFAULT_TOL};
use entwit::format::{fmt_f64, to_csv, to_json};
use entwit::ppt::{min_partial_transpose_eigenvalue, ppt_check, ppt_threshold, Verdict};
use entwit::reproduce::{reproduce, ExampleId, Report};
use entwit::scenario::{OutputFormat, Scenario};
use entwit::states::StateFamily;
use entwit::witnesses::{catalog, validate_witness, WitnessKind, WitnessName};

#[derive(Parser)]
#[command(name = "entwit", version, about = "Multi-copy entanglement witness numerics")]
struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Grid size for sweeps; overrides the scenario.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Directory to write files into instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rerun a worked example and check it; `all` runs every one.
    Reproduce { id: String },
    /// Evaluate a scenario file.
    Sweep { file: PathBuf },
    /// PPT threshold of a state family, or the verdict at one parameter.
    Ppt {
        family: String,
        /// Transposed slots, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        slots: Vec<usize>,
        #[arg(long)]
        param: Option<f64>,
    },
    /// Spectrum and sampled product-state minimum of a catalog witness;
    /// `all` checks the whole catalog.
    Validate {
        witness: String,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run the two-copy concentration protocol on random inputs.
    Concentrate {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// `m` restores the input state, `M` yields a maximally entangled one.
        #[arg(long, default_value = "M")]
        kind: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

/// One named output, written to `--out` or printed.
struct Artifact {
    file_name: String,
    contents: String,
}

fn emit(out: Option<&Path>, artifacts: &[Artifact]) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for a in artifacts {
                let path = dir.join(&a.file_name);
                fs::write(&path, &a.contents).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => {
            for a in artifacts {
                print!("{}", a.contents);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check passed.
fn run(cli: &Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Reproduce { id } => cmd_reproduce(cli, id),
        Command::Sweep { file } => cmd_sweep(cli, file),
        Command::Ppt { family, slots, param } => {
            let family: StateFamily = family.parse()?;
            let artifact = cmd_ppt(cli, family, slots, *param)?;
            emit(out, &[artifact])?;
            Ok(true)
        }
        Command::Validate { witness, b, samples } => cmd_validate(cli, witness, *b, *samples),
        Command::Concentrate { d, kind, samples } => {
            let kind: MeasurementKind = kind.parse()?;
            let artifact = cmd_concentrate(cli, *d, kind, *samples)?;
            emit(out, &[artifact])?;
            Ok(true)
        }
    }
}

fn cmd_reproduce(cli: &Cli, id: &str) -> Result<bool> {
    let ids: Vec<ExampleId> = if id == "all" {
        ExampleId::ALL.to_vec()
    } else {
        vec![id.parse()?]
    };
    let reports: Vec<Report> = ids
        .iter()
        .map(|&id| reproduce(id, cli.seed).with_context(|| format!("reproducing {id}")))
        .collect::<Result<_>>()?;
    let mut artifacts = Vec::new();
    for r in &reports {
        artifacts.push(Artifact {
            file_name: format!("{}.json", r.id),
            contents: r.to_json()?,
        });
    }
    emit(cli.out.as_deref(), &artifacts)?;
    let mut ok = true;
    for r in &reports {
        for c in r.failures() {
            ok = false;
            eprintln!(
                "FAIL {}: {} = {} (expected {})",
                r.id,
                c.name,
                fmt_f64(c.value),
                fmt_f64(c.expected)
            );
        }
        for flag in &r.flags {
            eprintln!("note {}: {flag}", r.id);
        }
    }
    Ok(ok)
}

fn cmd_sweep(cli: &Cli, file: &Path) -> Result<bool> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let scenario = Scenario::parse(&text).with_context(|| format!("in {}", file.display()))?;
    let output = scenario
        .run(cli.points)
        .with_context(|| format!("evaluating {}", file.display()))?;
    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());

    let wanted: Vec<OutputFormat> = match (cli.format, cli.out.is_some()) {
        (Some(Format::Csv), _) => vec![OutputFormat::Csv],
        (Some(Format::Json), _) => vec![OutputFormat::Json],
        (None, true) => scenario.outputs.clone(),
        (None, false) => vec![OutputFormat::Csv],
    };
    let mut artifacts = Vec::new();
    for f in wanted {
        artifacts.push(match f {
            OutputFormat::Csv => Artifact {
                file_name: format!("{stem}.csv"),
                contents: output.csv.clone(),
            },
            OutputFormat::Json => Artifact {
                file_name: format!("{stem}.json"),
                contents: output.json()?,
            },
        });
    }
    emit(cli.out.as_deref(), &artifacts)?;
    Ok(true)
}

fn cmd_ppt(cli: &Cli, family: StateFamily, slots: &[usize], param: Option<f64>) -> Result<Artifact> {
    let base = format!("ppt_{}", family.name());
    if cli.format == Some(Format::Csv) {
        let f = |x: f64| min_partial_transpose_eigenvalue(&family.state(x)?, slots);
        let points = cli.points.unwrap_or(DEFAULT_GRID_POINTS);
        let (grid, _) = sweep_fn(f, family.param_range(), points, DEFAULT_TOL)?;
        let rows: Vec<Vec<f64>> = grid.into_iter().map(|(x, v)| vec![x, v]).collect();
        return Ok(Artifact {
            file_name: format!("{base}.csv"),
            contents: to_csv(&[family.param_name(), "min_eigenvalue"], &rows),
        });
    }
    let threshold = ppt_threshold(family, slots, 1e-9)?;
    let at_param = param
        .map(|x| -> Result<_> {
            let v = ppt_check(&family.state(x)?, slots)?;
            Ok(serde_json::json!({
                "param": x,
                "min_eigenvalue": v.min_eigenvalue,
                "verdict": match v.verdict {
                    Verdict::NptEntangled => "npt_entangled",
                    Verdict::PptInconclusive => "ppt_inconclusive",
                },
            }))
        })
        .transpose()?;
    let mut doc = serde_json::json!({
        "family": family.name(),
        "param_name": family.param_name(),
        "transposed_slots": slots,
        "threshold": threshold,
    });
    if let Some(v) = at_param {
        doc["at_param"] = v;
    }
    Ok(Artifact {
        file_name: format!("{base}.json"),
        contents: to_json(&doc)?,
    })
}

fn cmd_validate(cli: &Cli, witness: &str, b: Option<f64>, samples: usize) -> Result<bool> {
    let names: Vec<WitnessName> = if witness == "all" {
        WitnessName::ALL.to_vec()
    } else {
        vec![witness.parse()?]
    };
    let mut reports = Vec::new();
    for name in names {
        let b = if name == WitnessName::Pb {
            Some(b.unwrap_or(1.0))
        } else {
            b
        };
        let spec = catalog(name, b)?;
        reports.push(validate_witness(&spec, samples, cli.seed)?);
    }
    if reports.is_empty() {
        bail!("no witnesses selected");
    }
    let kind = |k: WitnessKind| match k {
        WitnessKind::Witness => "witness",
        WitnessKind::PositiveSemidefinite => "positive",
    };
    let artifact = if cli.format == Some(Format::Csv) {
        let mut s = String::from("name,kind,min_eigenvalue,min_product_expectation,samples,passed\n");
        for r in &reports {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.name,
                kind(r.kind),
                fmt_f64(r.min_eigenvalue),
                fmt_f64(r.min_product_expectation),
                r.samples,
                r.passed
            ));
        }
        Artifact {
            file_name: "validate.csv".into(),
            contents: s,
        }
    } else {
        let docs: Vec<_> = reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "kind": kind(r.kind),
                    "min_eigenvalue": r.min_eigenvalue,
                    "min_product_expectation": r.min_product_expectation,
                    "samples": r.samples,
                    "passed": r.passed,
                })
            })
            .collect();
        Artifact {
            file_name: "validate.json".into(),
            contents: to_json(&serde_json::json!({ "seed": cli.seed, "witnesses": docs }))?,
        }
    };
    emit(cli.out.as_deref(), &[artifact])?;
    Ok(reports.iter().all(|r| r.passed))
}

fn cmd_concentrate(cli: &Cli, d: usize, kind: MeasurementKind, samples: usize) -> Result<Artifact> {
    let runs = sample_concentration(d, kind, samples, cli.seed)?;
    let base = format!(
        "concentrate_d{d}_{}",
        if kind == MeasurementKind::Restore { "m" } else { "M" }
    );
    if cli.format == Some(Format::Json) {
        let docs: Vec<_> = runs
            .iter()
            .map(|s| {
                serde_json::json!({
                    "index": s.index,
                    "probability": s.result.probability,
                    "fidelity": s.result.fidelity_with_target,
                    "bookkeeping_probability": s.result.bookkeeping_probability,
                    "bookkeeping_ratio": s.result.bookkeeping_ratio,
                    "delta": s.consistency.delta,
                })
            })
            .collect();
        let doc = serde_json::json!({ "d": d, "kind": kind.symbol(), "seed": cli.seed, "samples": docs });
        return Ok(Artifact {
            file_name: format!("{base}.json"),
            contents: to_json(&doc)?,
        });
    }
    let rows: Vec<Vec<f64>> = runs
        .iter()
        .map(|s| {
            vec![
                s.index as f64,
                s.result.probability,
                s.result.fidelity_with_target,
                s.result.bookkeeping_probability,
                s.result.bookkeeping_ratio,
                s.consistency.delta,
            ]
        })
        .collect();
    Ok(Artifact {
        file_name: format!("{base}.csv"),
        contents: to_csv(
            &[
                "index",
                "probability",
                "fidelity",
                "bookkeeping_probability",
                "bookkeeping_ratio",
                "delta",
            ],
            &rows,
        ),
    })
}
