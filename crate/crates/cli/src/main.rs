use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};

use ccsp::analysis::classify_pair;
use ccsp::harness::gen::{gen_algebra, gen_instance, scaling_algebra, scaling_instance, GeneratorConfig, ScalingFamily};
use ccsp::harness::io::{
    algebra_to_file, algebra_to_json, instance_to_json, np_complete_result, parse_algebra_json, parse_instance_json,
    parse_language_json, result_file, ParsedInstance,
};
use ccsp::harness::laws::{run_law_suite, LawSuiteConfig};
use ccsp::harness::oracle::{brute_force_solve, budget_from_env};
use ccsp::{
    classify_and_solve, classify_language, solve, validate_instance, ClassifierVerdict, ConstraintLanguage, Error,
    Instance, SolveResult, SolveTrace, SolverConfig, Verdict,
};

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NP_COMPLETE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "ccsp", version, about = "Classify and solve conservative constraint satisfaction problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every pair of a constraint language and decide tractability.
    Classify {
        language: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve an instance over its algebra, or over operations synthesized
    /// from its relations when it names no algebra.
    Solve {
        instance: PathBuf,
        /// Algebra file overriding the instance's algebra.
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Decide NP-complete instances by exhaustive search instead of refusing.
        #[arg(long)]
        force_oracle: bool,
        /// Refuse mixed majority/affine residues instead of backtracking.
        #[arg(long)]
        no_backtracking: bool,
        /// Try an unforced t(P) before the forced ones.
        #[arg(long)]
        probe_plain_t: bool,
    },
    /// Decide an instance by exhaustive search.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
        /// Largest search space enumerated; defaults to CCSP_BUDGET.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Run the randomized structural law suite.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
    /// Generate a random algebra or instance as JSON.
    Gen {
        #[command(subcommand)]
        what: GenKind,
    },
    /// Time the solver on scaling families.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![25usize, 50, 100])]
        sizes: Vec<usize>,
        #[arg(long, default_value = "majority,affine", value_delimiter = ',')]
        families: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per size and family.
        #[arg(long, default_value_t = 3)]
        repeats: u64,
    },
}

#[derive(clap::Args)]
struct GenOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    size: usize,
    /// Relative weights of semilattice, majority and affine labels.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 1.0, 1.0])]
    weights: Vec<f64>,
}

#[derive(Subcommand)]
enum GenKind {
    Algebra {
        #[command(flatten)]
        opts: GenOpts,
    },
    Instance {
        #[command(flatten)]
        opts: GenOpts,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 6)]
        constraints: usize,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<ParsedInstance, Failure> {
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(parse_instance_json(&read(path)?, Some(base))?)
}

fn print_result(p: &Instance, r: &SolveResult, trace: Option<&SolveTrace>, json: bool) {
    if json {
        println!("{}", result_file(p, r, trace).to_json());
        return;
    }
    match r {
        SolveResult::Sat(a) => {
            println!("sat");
            for (v, x) in p.variables().iter().zip(a.values()) {
                println!("{v} = {x}");
            }
        }
        SolveResult::Unsat => println!("unsat"),
    }
    if let Some(t) = trace {
        println!("nodes {} depth {} retraction steps {}", t.nodes, t.max_depth, t.retract_steps);
    }
}

fn exit_for(r: &SolveResult) -> u8 {
    if r.is_sat() {
        EXIT_SAT
    } else {
        EXIT_UNSAT
    }
}

fn classify(path: &Path, json: bool) -> Outcome {
    let l = parse_language_json(&read(path)?)?;
    let n = l.universe_size();
    let mut labels = Vec::new();
    for a in 0..n as u8 {
        for b in a + 1..n as u8 {
            labels.push((a, b, classify_pair(&l, a, b)?));
        }
    }
    let verdict = classify_language(&l)?;
    if json {
        let pairs: Vec<serde_json::Value> = labels
            .iter()
            .map(|&(a, b, lab)| serde_json::json!({ "pair": [a, b], "label": lab.to_string() }))
            .collect();
        let out = match &verdict {
            ClassifierVerdict::Tractable { algebra, .. } => {
                serde_json::json!({ "status": "tractable", "labels": pairs, "algebra": algebra_to_file(algebra) })
            }
            ClassifierVerdict::NpComplete { pair } => {
                serde_json::json!({ "status": "np-complete", "labels": pairs, "witness_pair": [pair.0, pair.1] })
            }
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        for (a, b, lab) in &labels {
            println!("{{{a}, {b}}} {lab}");
        }
        match &verdict {
            ClassifierVerdict::Tractable { .. } => println!("tractable"),
            ClassifierVerdict::NpComplete { pair } => println!("np-complete: no tractable operation on {pair:?}"),
        }
    }
    Ok(match verdict {
        ClassifierVerdict::Tractable { .. } => EXIT_SAT,
        ClassifierVerdict::NpComplete { .. } => EXIT_NP_COMPLETE,
    })
}

fn check_closed(p: &Instance) -> Result<(), Failure> {
    match validate_instance(p).first() {
        Some(v) => Err(invalid(v.to_string())),
        None => Ok(()),
    }
}

fn solve_cmd(path: &Path, algebra: Option<&Path>, json: bool, force_oracle: bool, cfg: &SolverConfig) -> Outcome {
    let parsed = load_instance(path)?;
    let alg = match algebra {
        Some(a) => Some(parse_algebra_json(&read(a)?)?),
        None => parsed.algebra,
    };
    let p = parsed.instance;
    match alg {
        Some(a) => {
            if a.algebra.size() != p.algebra().size() {
                return Err(invalid("algebra and instance have different universes"));
            }
            let q = Instance::new(Arc::new(a.algebra), p.variables().to_vec(), p.domains().to_vec(), p.constraints().to_vec());
            check_closed(&q)?;
            let (r, trace) = solve(&q, &a.graph, cfg)?;
            print_result(&q, &r, Some(&trace), json);
            Ok(exit_for(&r))
        }
        None => {
            let rels = p.constraints().iter().map(|c| (*c.relation).clone()).collect();
            let l = ConstraintLanguage::new(p.algebra().size(), rels)?;
            match classify_and_solve(&l, &p, force_oracle, budget_from_env(), cfg)? {
                Verdict::Solved { result, trace } => {
                    print_result(&p, &result, Some(&trace), json);
                    Ok(exit_for(&result))
                }
                Verdict::OracleSolved { result, pair } => {
                    if !json {
                        println!("np-complete on {pair:?}; decided by exhaustive search");
                    }
                    print_result(&p, &result, None, json);
                    Ok(exit_for(&result))
                }
                Verdict::NpComplete { pair } => {
                    if json {
                        println!("{}", np_complete_result(pair).to_json());
                    } else {
                        println!("np-complete: no tractable operation on {pair:?}");
                    }
                    Ok(EXIT_NP_COMPLETE)
                }
            }
        }
    }
}

fn oracle(path: &Path, json: bool, budget: Option<u128>) -> Outcome {
    let p = load_instance(path)?.instance;
    let r = brute_force_solve(&p, budget.unwrap_or_else(budget_from_env))?;
    print_result(&p, &r, None, json);
    Ok(exit_for(&r))
}

fn laws(seed: u64, samples: usize, json: bool) -> Outcome {
    let report = run_law_suite(&LawSuiteConfig { seed, samples, ..Default::default() })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for (law, c) in &report.counts {
            println!("{law:<24} pass {:>6}  fail {:>4}  hypothesis not met {:>6}", c.pass, c.fail, c.hypothesis_not_met);
        }
        for f in &report.failures {
            println!("FAIL {} sample {}: {} on {:?}", f.law, f.sample, f.reason, f.relation);
        }
    }
    Ok(if report.total_failures() == 0 { EXIT_SAT } else { EXIT_INTERNAL })
}

fn weights(w: &[f64]) -> Result<[f64; 3], Failure> {
    w.try_into().map_err(|_| invalid("--weights takes three numbers"))
}

fn gen(what: GenKind) -> Outcome {
    match what {
        GenKind::Algebra { opts } => {
            let cfg = GeneratorConfig { seed: opts.seed, domain_size: opts.size, weights: weights(&opts.weights)?, ..Default::default() };
            let (a, _) = gen_algebra(&cfg)?;
            println!("{}", algebra_to_json(&a));
        }
        GenKind::Instance { opts, vars, constraints, arity } => {
            let cfg = GeneratorConfig {
                seed: opts.seed,
                domain_size: opts.size,
                weights: weights(&opts.weights)?,
                num_vars: vars,
                num_constraints: constraints,
                max_arity: arity,
                ..Default::default()
            };
            let (a, _) = gen_algebra(&cfg)?;
            println!("{}", instance_to_json(&gen_instance(&Arc::new(a), &cfg)?));
        }
    }
    Ok(EXIT_SAT)
}

fn bench(sizes: &[usize], families: &[String], seed: u64, repeats: u64) -> Outcome {
    let cfg = SolverConfig::default();
    println!("{:<9} {:>5} {:>6} {:>8} {:>6} {:>6} {:>10}", "family", "vars", "seed", "result", "depth", "nodes", "millis");
    for name in families {
        let family: ScalingFamily = name.parse()?;
        let (_, g) = scaling_algebra(family);
        for &n in sizes {
            for s in seed..seed + repeats {
                let p = scaling_instance(family, n, n * 3 / 2, s)?;
                let start = Instant::now();
                let (r, t) = solve(&p, &g, &cfg)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let res = if r.is_sat() { "sat" } else { "unsat" };
                println!("{name:<9} {n:>5} {s:>6} {res:>8} {:>6} {:>6} {ms:>10.1}", t.max_depth, t.nodes);
            }
        }
    }
    Ok(EXIT_SAT)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Classify { language, json } => classify(&language, json),
        Command::Solve { instance, algebra, json, force_oracle, no_backtracking, probe_plain_t } => {
            let cfg = SolverConfig { allow_mixed_backtracking: !no_backtracking, probe_plain_t, ..Default::default() };
            solve_cmd(&instance, algebra.as_deref(), json, force_oracle, &cfg)
        }
        Command::Oracle { instance, json, budget } => oracle(&instance, json, budget),
        Command::Laws { seed, samples, json } => laws(seed, samples, json),
        Command::Gen { what } => gen(what),
        Command::Bench { sizes, families, seed, repeats } => bench(&sizes, &families, seed, repeats),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
