use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use galois_cover::permgroup::{PermGroupSpec, Permutation};
use galois_cover::pipeline::{
    cmd_monodromy, cmd_verify_tower, realize_group, solve_semitop_embedding, PipelineError, PipelineReport,
    RealizeOptions, TowerArtifact,
};
use galois_cover::wpoly::{BaseSpace, WeierstrassPoly};

#[derive(Parser)]
#[command(name = "galcov", version, about = "Realize finite groups as deck groups of Weierstrass polynomial coverings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with pipeline options; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sample grid resolution per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Largest total degree tried when fitting coefficients.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Seed for the randomized parts of seed construction.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON output here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polynomial whose splitting covering has the given deck group.
    Realize {
        /// Group as {"degree": n, "generators": [[...], ...]}, one generator per hole.
        #[arg(long)]
        group: PathBuf,
        /// Base space JSON; defaults to a disc with one hole per generator.
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a semi-topological embedding problem for a polynomial g.
    Embed {
        /// Polynomial g, bare or as the output of `realize`.
        #[arg(long)]
        g: PathBuf,
        /// Base space JSON; taken from the g file when omitted.
        #[arg(long)]
        base: Option<PathBuf>,
        /// The group H as {"degree": n, "generators": [...]}.
        #[arg(long)]
        group: PathBuf,
        /// Images of the generators of H in the monodromy group of g.
        #[arg(long)]
        phi: PathBuf,
        /// Allow adding holes when H needs more generators than X has.
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        allow_rank_extension: Option<bool>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the monodromy of a polynomial around each hole.
    Monodromy {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-verify a tower produced by `embed`.
    VerifyTower {
        /// Tower artifact, bare or as the output of `embed`.
        #[arg(long)]
        tower: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Realize { common, .. }
            | Command::Embed { common, .. }
            | Command::Monodromy { common, .. }
            | Command::VerifyTower { common, .. } => common,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct Config {
    #[serde(flatten)]
    realize: RealizeOptions,
    allow_rank_extension: Option<bool>,
}

enum Failure {
    Input(String),
    Pipeline(PipelineError),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Accepts either the bare object or a wrapper holding it under `key`.
fn unwrap_key<T: for<'de> Deserialize<'de>>(value: &Value, key: &str, path: &Path) -> Result<T, Failure> {
    let inner = value.get(key).unwrap_or(value);
    T::deserialize(inner).map_err(|e| Failure::Input(format!("{}: {key}: {e}", path.display())))
}

fn load_poly_and_base(poly: &Path, base: Option<&Path>) -> Result<(WeierstrassPoly, BaseSpace), Failure> {
    let value: Value = read_json(poly)?;
    let f = unwrap_key(&value, "polynomial", poly)?;
    let base = match (base, value.get("base")) {
        (Some(p), _) => read_json(p)?,
        (None, Some(b)) => {
            BaseSpace::deserialize(b).map_err(|e| Failure::Input(format!("{}: base: {e}", poly.display())))?
        }
        (None, None) => return Err(Failure::Input("no base space given (use --base)".into())),
    };
    Ok((f, base))
}

fn options(common: &Common) -> Result<Config, Failure> {
    let mut cfg = match &common.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    if let Some(g) = common.grid {
        cfg.realize.grid = g;
    }
    if let Some(d) = common.max_degree {
        cfg.realize.max_degree = d;
    }
    if let Some(s) = common.seed {
        cfg.realize.rng_seed = s;
    }
    cfg.realize.tracking.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(cfg)
}

fn emit(common: &Common, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    match &common.output {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn verdict_exit(report: &PipelineReport) -> u8 {
    if report.all_passed() {
        0
    } else {
        2
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Realize { group, base, common } => {
            let cfg = options(&common)?;
            let spec: PermGroupSpec = read_json(&group)?;
            let g = spec.build().map_err(|e| Failure::Input(format!("{}: {e}", group.display())))?;
            let base = base.map(|p| read_json::<BaseSpace>(&p)).transpose()?;
            let r = realize_group(&g, base.as_ref(), &cfg.realize)?;
            emit(
                &common,
                &json!({
                    "report": r.report,
                    "polynomial": r.polynomial,
                    "base": r.base,
                    "monodromy": r.monodromy,
                    "certificate": r.certificate,
                }),
            )?;
            Ok(verdict_exit(&r.report))
        }
        Command::Embed { g, base, group, phi, allow_rank_extension, common } => {
            let cfg = options(&common)?;
            let (poly, base) = load_poly_and_base(&g, base.as_deref())?;
            let spec: PermGroupSpec = read_json(&group)?;
            let h = spec.build().map_err(|e| Failure::Input(format!("{}: {e}", group.display())))?;
            let phi: Vec<Permutation> = read_json(&phi)?;
            let allow = allow_rank_extension.or(cfg.allow_rank_extension).unwrap_or(true);
            let out = solve_semitop_embedding(&poly, &base, &h, &phi, allow, &cfg.realize)?;
            emit(
                &common,
                &json!({
                    "report": out.report,
                    "polynomial": out.h.polynomial,
                    "base": out.base,
                    "tower": out.artifact,
                }),
            )?;
            Ok(verdict_exit(&out.report))
        }
        Command::Monodromy { f, base, common } => {
            let cfg = options(&common)?;
            let (poly, base) = load_poly_and_base(&f, base.as_deref())?;
            let report = cmd_monodromy(&poly, &base, cfg.realize.grid, &cfg.realize.tracking)?;
            emit(&common, &serde_json::to_value(&report).expect("report serializes"))?;
            Ok(verdict_exit(&report))
        }
        Command::VerifyTower { tower, common } => {
            let cfg = options(&common)?;
            let value: Value = read_json(&tower)?;
            let art: TowerArtifact = unwrap_key(&value, "tower", &tower)?;
            let report = cmd_verify_tower(&art, &cfg.realize.tracking)?;
            emit(&common, &serde_json::to_value(&report).expect("report serializes"))?;
            Ok(verdict_exit(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e}");
            if let PipelineError::Verification(report) = &e {
                let value = serde_json::to_value(report).expect("report serializes");
                if let Err(Failure::Input(msg)) = emit(&common, &json!({ "report": value })) {
                    eprintln!("error: {msg}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
