use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ttnc_cli::bench::{depth_csv, fidelity_csv, run_depth, run_fidelity};
use ttnc_cli::compile::compile_file;
use ttnc_cli::config::{parse_float_list, parse_int_list, parse_max_bond, parse_topologies};
use ttnc_cli::csv::write_file;
use ttnc_cli::verify::{
    noise_csv, noise_rows, overlap_csv, overlap_rows, shot_csv, shot_rows, OperatorKind,
    OperatorSpec,
};
use ttnc_cli::{BenchConfig, CliResult};
use ttnc_core::mps::Ensemble;

#[derive(Parser)]
#[command(
    name = "ttnc",
    version,
    about = "Compile MPS into log-depth state-preparation circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an MPS JSON file into a circuit JSON file.
    Compile {
        #[arg(long)]
        input: PathBuf,
        /// Power of two, or `none` for exact compilation.
        #[arg(long, default_value = "none")]
        max_bond: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Fidelity of approximate compilation over a random ensemble.
    BenchFidelity(BenchArgs),
    /// Transpiled depth on hardware topologies.
    BenchDepth(BenchArgs),
    /// Verifier circuit demonstrations.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Inclusive ranges and lists, e.g. `6-20` or `8,16,32`.
    #[arg(long, default_value = "6-20")]
    n_range: String,
    #[arg(long, default_value = "2")]
    chis: String,
    #[arg(long, default_value = "2")]
    max_bond: String,
    #[arg(long, default_value_t = 30)]
    samples_per_n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "all_to_all,square_grid,heavy_hex")]
    topologies: String,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = EnsembleArg::UniformReal)]
    ensemble: EnsembleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    ComplexGaussian,
    UniformReal,
    UniformComplex,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::ComplexGaussian => Ensemble::ComplexGaussian,
            EnsembleArg::UniformReal => Ensemble::UniformReal,
            EnsembleArg::UniformComplex => Ensemble::UniformComplex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Overlap,
    Shots,
    Noise,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    kind: VerifyKind,
    /// `mcz` or `pauli-exp`.
    #[arg(long)]
    operator: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Pauli string for `pauli-exp` (defaults to all `Z`).
    #[arg(long)]
    pauli: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    theta: f64,
    /// Random state pairs for `overlap`.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Shot counts for `shots`.
    #[arg(long, default_value = "100,1000,10000")]
    shots: String,
    /// Independent estimates per shot count.
    #[arg(long, default_value_t = 200)]
    seeds: usize,
    #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    deltas: String,
    /// Use raw Haar noise instead of noise orthogonal to `U psi`.
    #[arg(long)]
    no_orthogonalize: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

impl BenchArgs {
    fn config(&self) -> CliResult<BenchConfig> {
        let cfg = BenchConfig {
            n_range: parse_int_list(&self.n_range)?,
            chis: parse_int_list(&self.chis)?,
            max_bond: parse_max_bond(&self.max_bond)?,
            samples_per_n: self.samples_per_n,
            seed: self.seed,
            topologies: parse_topologies(&self.topologies)?,
            output_dir: self.output_dir.clone(),
            ensemble: self.ensemble.into(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn verify(a: &VerifyArgs) -> CliResult<PathBuf> {
    let kind: OperatorKind = a.operator.parse()?;
    let op = OperatorSpec {
        kind,
        n: a.pauli.as_ref().map_or(a.n, String::len),
        pauli: a.pauli.clone(),
        theta: a.theta,
    };
    let csv = match a.kind {
        VerifyKind::Overlap => {
            let cfg = serde_json::json!({"kind": "overlap", "operator": op, "pairs": a.pairs, "seed": a.seed});
            overlap_csv(&cfg.to_string(), &overlap_rows(&op, a.pairs, a.seed)?)
        }
        VerifyKind::Shots => {
            let grid = parse_int_list(&a.shots)?;
            let cfg = serde_json::json!({"kind": "shots", "operator": op, "shots": grid, "seeds": a.seeds, "seed": a.seed});
            shot_csv(&cfg.to_string(), &shot_rows(&op, &grid, a.seeds, a.seed)?)?
        }
        VerifyKind::Noise => {
            let deltas = parse_float_list(&a.deltas)?;
            let orth = !a.no_orthogonalize;
            let cfg = serde_json::json!({"kind": "noise", "operator": op, "deltas": deltas, "orthogonalize": orth, "seed": a.seed});
            noise_csv(&cfg.to_string(), &noise_rows(&op, &deltas, a.seed, orth)?)
        }
    };
    write_file(&a.output, &csv)?;
    Ok(a.output.clone())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compile {
            input,
            max_bond,
            output,
        } => {
            let report = compile_file(&input, parse_max_bond(&max_bond)?, &output)?;
            println!(
                "{}",
                serde_json::to_string(&report).expect("report serialises")
            );
        }
        Command::BenchFidelity(args) => {
            let cfg = args.config()?;
            let csv = fidelity_csv(&cfg, &run_fidelity(&cfg)?);
            let path = cfg.output_dir.join("fidelity.csv");
            write_file(&path, &csv)?;
            println!("{}", path.display());
        }
        Command::BenchDepth(args) => {
            let cfg = args.config()?;
            let csv = depth_csv(&cfg, &run_depth(&cfg)?)?;
            let path = cfg.output_dir.join("depth.csv");
            write_file(&path, &csv)?;
            println!("{}", path.display());
        }
        Command::Verify(args) => {
            println!("{}", verify(&args)?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
