use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use submax::{
    brute_force_opt, gen_base_counterexample, gen_greedy_tight, gen_random, run_experiment, run_one, Algorithm,
    ElementSet, Error, InstanceFile, RandomConstraint, RandomFunction, RandomSpec, RatioReport, RunConfig, RunRecord,
};

/// Local search solvers for non-negative submodular maximization.
#[derive(Parser)]
#[command(name = "submax", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on an instance.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
    },
    /// Check a solution, or an algorithm's output, against the brute-force optimum.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        instance: PathBuf,
        /// Algorithm to run and certify.
        #[arg(long, conflicts_with = "solution")]
        algorithm: Option<Algorithm>,
        /// Comma separated element ids to check instead of running an algorithm.
        #[arg(long, value_delimiter = ',')]
        solution: Option<Vec<usize>>,
        /// Pass when value >= threshold * OPT.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Run algorithms over several instances in parallel.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, required = true, num_args = 1..)]
        instance: Vec<PathBuf>,
        /// Algorithms to run; all applicable ones when absent.
        #[arg(long, num_args = 1..)]
        algorithm: Vec<Algorithm>,
    },
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        generator: Generator,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// Coverage instance where greedy gets p+1.
    GreedyTight {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    /// Directed cut where one side is a poor swap-local optimum.
    BaseCounterexample {
        #[arg(long)]
        n_side: usize,
        #[arg(long)]
        t: usize,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        function: RandomFunction,
        #[arg(long)]
        constraint: RandomConstraint,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, env = "SUBMAX_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Exchange width of the partition algorithms.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Grid resolution of the fractional search.
    #[arg(long)]
    zeta: Option<f64>,
    /// Heavy threshold override of the knapsack algorithm.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, env = "SUBMAX_SEED", default_value_t = 0)]
    seed: u64,
    /// Attach exhaustive certificates (n <= 14) and fail with exit code 3
    /// when one does not hold.
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            epsilon: self.epsilon,
            p: self.p,
            eta: self.eta,
            zeta: self.zeta,
            delta: self.delta,
            trials: self.trials,
            seed: self.seed,
            certify: self.certify,
            ..RunConfig::default()
        }
    }
}

/// An exit code with the message printed to stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InternalContradiction(_) => 1,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<InstanceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure(1, format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure(1, e.to_string()))
        }
    }
}

fn show_set(inst: &InstanceFile, s: ElementSet) -> String {
    if inst.labels.is_empty() {
        return s.to_string();
    }
    let names: Vec<&str> = s.iter().map(|e| inst.labels[e].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn human(inst: &InstanceFile, r: &RunRecord) -> String {
    let mut text = format!(
        "{} on {}\n  value     {}\n  solution  {}\n  oracle    {} requests, {} distinct\n",
        r.algorithm,
        r.instance,
        r.value,
        show_set(inst, r.solution),
        r.oracle_calls.requests,
        r.oracle_calls.distinct,
    );
    for note in &r.notes {
        text += &format!("  note      {note}\n");
    }
    for c in &r.certificates {
        let verdict = if c.certificate.pass { "pass" } else { "FAIL" };
        text += &format!(
            "  cert      {} {verdict} ({} sets, worst slack {:.3e})\n",
            c.name, c.certificate.checked, c.certificate.worst_slack
        );
    }
    text
}

fn render(format: Format, pairs: &[(&InstanceFile, RunRecord)]) -> String {
    pairs
        .iter()
        .map(|(inst, r)| match format {
            Format::Human => human(inst, r),
            Format::Records => r.to_line() + "\n",
        })
        .collect()
}

fn certified(records: &[&RunRecord]) -> Result<(), Failure> {
    match records.iter().find(|r| !r.certified()) {
        Some(r) => Err(Failure(
            3,
            format!("{} on {}: certificate failed", r.algorithm, r.instance),
        )),
        None => Ok(()),
    }
}

fn solve(run: &RunArgs, instance: &Path, algorithm: Algorithm) -> Result<(), Failure> {
    let inst = load(instance)?;
    let record = run_one(&inst, algorithm, &run.config())?;
    emit(run.out.as_deref(), &render(run.format, &[(&inst, record.clone())]))?;
    certified(&[&record])
}

fn verify(
    run: &RunArgs,
    instance: &Path,
    algorithm: Option<Algorithm>,
    solution: Option<Vec<usize>>,
    threshold: f64,
) -> Result<(), Failure> {
    let inst = load(instance)?;
    let f = inst.oracle()?;
    let feas = inst.feasibility()?;
    let opt = brute_force_opt(&f, &feas)?.map_or(0.0, |(_, v)| v);
    let (value, text, record) = match (algorithm, solution) {
        (_, Some(ids)) => {
            if let Some(&e) = ids.iter().find(|&&e| e >= inst.n) {
                return Err(Failure(
                    2,
                    format!("element {e} is outside the ground set of size {}", inst.n),
                ));
            }
            let s = ElementSet::from_ids(ids);
            if !feas.is_feasible(s) {
                return Err(Failure(2, format!("{} is infeasible", show_set(&inst, s))));
            }
            let value = f.compute(s)?;
            (
                value,
                format!("solution {}\n  value     {value}\n", show_set(&inst, s)),
                None,
            )
        }
        (Some(a), None) => {
            let cfg = RunConfig {
                certify: true,
                ..run.config()
            };
            let r = run_one(&inst, a, &cfg)?;
            (r.value, human(&inst, &r), Some(r))
        }
        (None, None) => return Err(Failure(2, "verify needs --algorithm or --solution".into())),
    };
    let ratio = RatioReport::new(value, opt, threshold, 1e-9).with_origin(inst.fingerprint(), run.seed);
    let text = match run.format {
        Format::Human => format!(
            "{text}  opt       {opt}\n  ratio     {:.6} against threshold {threshold}: {}\n",
            ratio.ratio,
            if ratio.pass { "pass" } else { "FAIL" }
        ),
        Format::Records => {
            let mut line = serde_json::to_string(&ratio).expect("reports serialize") + "\n";
            if let Some(r) = &record {
                line = r.to_line() + "\n" + &line;
            }
            line
        }
    };
    emit(run.out.as_deref(), &text)?;
    if let Some(r) = &record {
        certified(&[r])?;
    }
    if !ratio.pass {
        return Err(Failure(3, format!("ratio {} below threshold {threshold}", ratio.ratio)));
    }
    Ok(())
}

fn bench(run: &RunArgs, paths: &[PathBuf], algorithms: &[Algorithm]) -> Result<(), Failure> {
    let instances = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let cfg = run.config();
    let mut pairs = Vec::new();
    for inst in &instances {
        let chosen: Vec<Algorithm> = if algorithms.is_empty() {
            Algorithm::ALL
                .iter()
                .copied()
                .filter(|a| a.applies_to(&inst.constraints))
                .collect()
        } else {
            algorithms.to_vec()
        };
        for r in run_experiment(std::slice::from_ref(inst), &chosen, &cfg)? {
            pairs.push((inst, r));
        }
    }
    emit(run.out.as_deref(), &render(run.format, &pairs))?;
    certified(&pairs.iter().map(|(_, r)| r).collect::<Vec<_>>())
}

fn generate(generator: Generator, out: Option<&Path>) -> Result<(), Failure> {
    let inst = match generator {
        Generator::GreedyTight { k, p } => gen_greedy_tight(k, p)?,
        Generator::BaseCounterexample { n_side, t } => gen_base_counterexample(n_side, t)?,
        Generator::Random {
            function,
            constraint,
            n,
            k,
            density,
            seed,
        } => gen_random(&RandomSpec {
            function,
            constraint,
            n,
            k,
            density,
            seed,
        })?,
    };
    emit(out, &(inst.to_pretty() + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            run,
            instance,
            algorithm,
        } => solve(&run, &instance, algorithm),
        Command::Verify {
            run,
            instance,
            algorithm,
            solution,
            threshold,
        } => verify(&run, &instance, algorithm, solution, threshold),
        Command::Bench {
            run,
            instance,
            algorithm,
        } => bench(&run, &instance, &algorithm),
        Command::Gen { generator, out } => generate(generator, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("submax: {message}");
            ExitCode::from(code)
        }
    }
}
