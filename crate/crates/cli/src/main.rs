use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use ditop::certs::{ex54_certify, ex54_clifford_checks, ex54_truncation};
use ditop::constructions::{
    chain_cone, check_rho_invertible, reduced_product, semidirect_left, semidirect_right, subunosemigroup,
    tychonoff_product, zero_extension, ConstructionError, ReducedProductSpec,
};
use ditop::hm::{hm_property_trial, hm_witness, parse_rational, unit_axiom_trial, StepFunction};
use ditop::search::{
    hunt_non_ditopological, theorem_sweep, HuntOutcome, SearchError, Shard, SweepConfig, SweepReport, TheoremId,
};
use ditop::unocore::{is_dicontinuous_oracle, is_ditopological};
use ditop::{Side, UnoStructure};
use ditop_cli::format::{load_structure, write_json, ActionFile, StepFile, StructureFile};
use ditop_cli::Envelope;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ditop", version, about = "Finite-model checker for topological unosemigroups")]
struct Cli {
    /// Worker threads; defaults to one per core
    #[arg(long, global = true, env = "DITOP_WORKERS")]
    workers: Option<usize>,

    /// Write the report or structure here instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a structure file and decide dicontinuity at every point
    Check {
        path: PathBuf,
        /// Cross-check every verdict against the brute-force definition
        #[arg(long)]
        oracle: bool,
        /// Print a JSON report
        #[arg(long)]
        json: bool,
    },
    /// Build a new structure file from existing ones
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// Check one theorem over an exhaustive corpus
    Sweep {
        id: String,
        /// Largest carrier in the corpus
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Run only this shard; all shards are run and merged when absent
        #[arg(long)]
        shard: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random trials per case (HM only)
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Search small carriers for a structure that is not ditopological
    Hunt {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Maximum number of structures examined
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Also write the witness as a structure file
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Certify the infinite counterexample up to the given depth
    Ex54 {
        #[arg(long, default_value_t = 10_000)]
        depth: u64,
        /// Depth of the finite discrete truncation checked alongside
        #[arg(long, default_value_t = 3)]
        truncation: usize,
        /// Also write the truncation as a structure file
        #[arg(long)]
        truncation_out: Option<PathBuf>,
    },
    /// Randomized checks of the Hartman-Mycielski extension of a base
    Hm {
        path: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        unit_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value = "1")]
        b: String,
        #[arg(long, default_value = "3/10")]
        eps: String,
        /// Restrict to one side
        #[arg(long)]
        side: Option<String>,
        /// Step function file; mutually exclusive with --value
        #[arg(long, conflicts_with = "value")]
        f: Option<PathBuf>,
        /// Constant function with this value (default: first element)
        #[arg(long)]
        value: Option<String>,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Tychonoff product; carrier names are joined as "x|y"
    Product {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
    },
    /// Restriction to a unit-closed subsemigroup
    Sub {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
    },
    /// Reduced product over a closed ideal of the first factor
    Redprod {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "")]
        ideal: Vec<String>,
    },
    /// Adjoin a zero to a group
    Zeroext { input: PathBuf },
    /// Cone over a group along a chain of length k
    Cone {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Left semidirect product from an action file
    Sdl { action: PathBuf },
    /// Right semidirect product from an action file
    Sdr { action: PathBuf },
}

#[derive(Debug)]
enum Failure {
    /// Exit 1.
    Property(String),
    /// Exit 2.
    Input(anyhow::Error),
    /// Exit 3.
    Budget,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<bool, Failure>;

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_report<C: Serialize, R: Serialize>(
    output: Option<&Path>,
    command: &str,
    config: C,
    report: R,
) -> Result<(), Failure> {
    emit(output, &write_json(&Envelope::new(command, config, report)))
}

fn search_failure(e: SearchError) -> Failure {
    match &e {
        SearchError::OracleDisagreement { structure, .. } => {
            eprintln!("reproducer:\n{}", write_json(&StructureFile::from_structure(structure)));
            Failure::Property(e.to_string())
        }
        SearchError::BudgetExceeded { .. } => Failure::Budget,
        _ => Failure::Input(e.into()),
    }
}

fn parse_side(s: &str) -> anyhow::Result<Side> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        _ => bail!("side must be left or right, got {s:?}"),
    }
}

fn q(s: &str) -> anyhow::Result<ditop::hm::Q> {
    parse_rational(s).ok_or_else(|| anyhow!("not a rational: {s:?}"))
}

fn check(cli: &Cli, path: &Path, oracle: bool, json: bool) -> Outcome {
    let u = load_structure(path)?;
    let report = is_ditopological(&u)?;
    let labels = u.sg().labels();
    let mut disagreements = Vec::new();
    if oracle {
        for s in &report.sides {
            for p in &s.points {
                if is_dicontinuous_oracle(&u, s.side, p.point)? != p.pass {
                    disagreements.push(json!({"side": s.side, "point": labels[p.point]}));
                }
            }
        }
    }
    let failures: Vec<_> = report
        .failures()
        .map(|(side, f)| {
            json!({
                "side": side,
                "point": labels[f.point],
                "violating": labels[f.violating],
                "u_min": f.u_min.iter().map(|i| &labels[i]).collect::<Vec<_>>(),
                "w_min": f.w_min.iter().map(|i| &labels[i]).collect::<Vec<_>>(),
            })
        })
        .collect();
    if json {
        let body = json!({
            "elements": u.len(),
            "sides": u.sides(),
            "ditopological": report.passed(),
            "failures": failures,
            "oracle": oracle.then(|| json!({"agrees": disagreements.is_empty(), "disagreements": disagreements})),
            "report": report,
        });
        emit_report(cli.output.as_deref(), "check", json!({"path": path, "oracle": oracle}), body)?;
    } else {
        let mut out = String::new();
        if report.passed() {
            out.push_str(&format!("{}: ditopological\n", path.display()));
        } else {
            out.push_str(&format!("{}: not ditopological\n", path.display()));
            for f in &failures {
                out.push_str(&format!(
                    "  {} side fails at {}: {} escapes U = {}\n",
                    f["side"].as_str().unwrap(),
                    f["point"].as_str().unwrap(),
                    f["violating"].as_str().unwrap(),
                    f["u_min"]
                ));
            }
        }
        if oracle {
            out.push_str(if disagreements.is_empty() { "  oracle agrees\n" } else { "  ORACLE DISAGREES\n" });
        }
        emit(cli.output.as_deref(), &out)?;
    }
    if !disagreements.is_empty() {
        return Err(Failure::Property("fast criterion and oracle disagree".into()));
    }
    Ok(report.passed())
}

fn construct(cli: &Cli, kind: &Construct) -> Outcome {
    let built: Result<UnoStructure, String> = match kind {
        Construct::Product { inputs } => {
            let fs = inputs.iter().map(|p| load_structure(p)).collect::<Result<Vec<_>, _>>()?;
            tychonoff_product(&fs).map_err(|e| e.to_string())
        }
        Construct::Sub { input, subset } => {
            let u = load_structure(input)?;
            let a = StructureFile::subset(&u, subset)?;
            subunosemigroup(&u, &a).map_err(|e| named(&u, &e))
        }
        Construct::Redprod { x, y, ideal } => {
            let (x, y) = (load_structure(x)?, load_structure(y)?);
            let names: Vec<String> = ideal.iter().filter(|s| !s.is_empty()).cloned().collect();
            let ideal = StructureFile::subset(&x, &names)?;
            reduced_product(&ReducedProductSpec { x: x.clone(), y, ideal })
                .map(|r| r.structure)
                .map_err(|e| named(&x, &e))
        }
        Construct::Zeroext { input } => zero_extension(&load_structure(input)?).map_err(|e| e.to_string()),
        Construct::Cone { input, k } => chain_cone(&load_structure(input)?, *k).map_err(|e| e.to_string()),
        Construct::Sdl { action } => {
            let a = ActionFile::load(action)?;
            semidirect_left(&a.s, &a.f, &a.alpha).map_err(|e| a.describe(&e))
        }
        Construct::Sdr { action } => {
            let a = ActionFile::load(action)?;
            check_rho_invertible(&a.s, &a.f, &a.alpha)
                .and_then(|data| semidirect_right(&a.s, &a.f, &a.alpha, &data))
                .map_err(|e| a.describe(&e))
        }
    };
    let u = built.map_err(|e| Failure::Input(anyhow!(e)))?;
    emit(cli.output.as_deref(), &write_json(&StructureFile::from_structure(&u)))?;
    Ok(true)
}

fn named(u: &UnoStructure, e: &ConstructionError) -> String {
    let l = u.sg().labels();
    match e {
        ConstructionError::NotUnitClosed { side, x } => {
            format!("subset is not closed under the {side} unit operation at {}", l[*x])
        }
        ConstructionError::UnitLeaksIdeal { side, x } => {
            format!("{side} unit operation maps ideal element {} outside the ideal", l[*x])
        }
        e => e.to_string(),
    }
}

fn sweep(cli: &Cli, id: &str, n: usize, shards: usize, shard: Option<usize>, seed: u64, trials: u64) -> Outcome {
    let id = TheoremId::parse(id).map_err(search_failure)?;
    let run = |index| -> Result<SweepReport, Failure> {
        let shard = Shard::new(index, shards).map_err(search_failure)?;
        theorem_sweep(id, &SweepConfig { n_max: n, shard, seed, trials }).map_err(search_failure)
    };
    let start = Instant::now();
    let report = match shard {
        Some(i) => run(i)?,
        None => SweepReport::merge((0..shards).map(run).collect::<Result<_, _>>()?).expect("at least one shard"),
    };
    eprintln!(
        "{}: {} instances, {} exceptions in {:.2?}",
        id.as_str(),
        report.instances,
        report.exceptions.len(),
        start.elapsed()
    );
    let config = json!({"id": id, "n": n, "shards": shards, "shard": shard, "seed": seed, "trials": trials});
    let ok = report.passed();
    emit_report(cli.output.as_deref(), "sweep", config, report)?;
    Ok(ok)
}

fn hunt(cli: &Cli, max_n: usize, budget: u64, witness_out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let config = json!({"max_n": max_n, "budget": budget});
    let report = match hunt_non_ditopological(max_n, budget) {
        Ok(r) => r,
        Err(SearchError::BudgetExceeded { partial, .. }) => {
            eprintln!("budget of {budget} structures exceeded");
            emit_report(cli.output.as_deref(), "hunt", config, json!({"budget_exceeded": true, "partial": partial}))?;
            return Err(Failure::Budget);
        }
        Err(e) => return Err(search_failure(e)),
    };
    let witness = match &report.outcome {
        HuntOutcome::Witness { structure, .. } => Some(StructureFile::from_structure(structure)),
        HuntOutcome::Exhausted => None,
    };
    let examined: u64 = report.counts.iter().map(|c| c.left + c.right).sum();
    eprintln!("examined {examined} structures in {:.2?}", start.elapsed());
    if let (Some(path), Some(w)) = (witness_out, &witness) {
        fs::write(path, write_json(w)).with_context(|| format!("writing {}", path.display()))?;
    }
    emit_report(cli.output.as_deref(), "hunt", config, json!({"hunt": report, "witness_file": witness}))?;
    Ok(true)
}

fn ex54(cli: &Cli, depth: u64, truncation: usize, truncation_out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let cert = ex54_certify(depth)?;
    let elapsed = start.elapsed();
    let trunc = ex54_truncation(truncation)?;
    let trunc_ok = is_ditopological(&trunc)?.passed();
    let clifford = ex54_clifford_checks(truncation)?;
    if let Some(path) = truncation_out {
        fs::write(path, write_json(&StructureFile::from_structure(&trunc)))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("{} facts checked, {} failures in {elapsed:.2?}", cert.facts_checked(), cert.failures());
    let ok = cert.verify() && trunc_ok && clifford.passed();
    let body = json!({
        "facts_checked": cert.facts_checked(),
        "failures": cert.failures(),
        "verified": cert.verify(),
        "truncation": {"depth": truncation, "elements": trunc.len(), "ditopological": trunc_ok, "clifford": clifford},
        "certificate": cert,
    });
    emit_report(cli.output.as_deref(), "ex54", json!({"depth": depth, "truncation": truncation}), body)?;
    Ok(ok)
}

#[allow(clippy::too_many_arguments)]
fn hm(
    cli: &Cli,
    path: &Path,
    trials: u64,
    unit_trials: u64,
    seed: u64,
    (a, b, eps): (&str, &str, &str),
    side: Option<&str>,
    f: Option<&Path>,
    value: Option<&str>,
) -> Outcome {
    let base = load_structure(path)?;
    let (a, b, eps) = (q(a)?, q(b)?, q(eps)?);
    let f = match (f, value) {
        (Some(p), _) => StepFile::load(p, &base)?,
        (None, v) => {
            let x = match v {
                Some(name) => base.sg().index_of(name).ok_or_else(|| anyhow!("unknown element {name:?}"))?,
                None => 0,
            };
            StepFunction::constant(x, base.len())
        }
    };
    let sides = match side {
        Some(s) => vec![parse_side(s)?],
        None => base.sides(),
    };
    let mut results = Vec::new();
    let mut ok = true;
    for side in sides {
        let witness = hm_witness(&base, side, &f, a, b, eps)?;
        let trial = hm_property_trial(&base, side, &f, a, b, eps, trials, seed)?;
        let unit_failures = unit_axiom_trial(&base, side, unit_trials, seed)?;
        ok &= trial.violations == 0 && unit_failures == 0;
        results.push(json!({"side": side, "witness": witness, "trial": trial, "unit_trials": unit_trials, "unit_failures": unit_failures}));
    }
    let config = json!({"path": path, "trials": trials, "unit_trials": unit_trials, "seed": seed,
        "a": a.to_string(), "b": b.to_string(), "eps": eps.to_string()});
    emit_report(cli.output.as_deref(), "hm", config, json!({"f": f, "sides": results}))?;
    Ok(ok)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { path, oracle, json } => check(cli, path, *oracle, *json),
        Command::Construct { kind } => construct(cli, kind),
        Command::Sweep { id, n, shards, shard, seed, trials } => sweep(cli, id, *n, *shards, *shard, *seed, *trials),
        Command::Hunt { max_n, budget, witness_out } => hunt(cli, *max_n, *budget, witness_out.as_deref()),
        Command::Ex54 { depth, truncation, truncation_out } => {
            ex54(cli, *depth, *truncation, truncation_out.as_deref())
        }
        Command::Hm { path, trials, unit_trials, seed, a, b, eps, side, f, value } => {
            hm(cli, path, *trials, *unit_trials, *seed, (a, b, eps), side.as_deref(), f.as_deref(), value.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Property(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Budget) => ExitCode::from(3),
    }
}
