//! Command-line front end. [`run`] parses arguments, dispatches, and
//! returns the exit code: 0 on success, 1 when a computation fails, 2 on
//! usage or input errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::clique::{Bounds, Param};
use crate::design::{
    adversary_check, contains_design, design_bound, klemm_check, p_rank, projective_plane, secrecy_check,
    validate_design, weight_checks, Design, DesignError, DesignFile,
};
use crate::digraph::Digraph;
use crate::field::FieldSpec;
use crate::instance::{IccsiInstance, IcsiInstance, Instance};
use crate::minrank::{default_budget, kappa, minrank_hypergraph, rank_distribution, FittingPattern};
use crate::reduction::{decide_minrank_n_minus_1, Decision, NoReason};
use crate::report::{self, matrix_rows, Format};
use crate::schemes::Scheme;

#[derive(Parser, Debug)]
#[command(name = "icbound", version, about = "Bounds and achievable schemes for index coding instances")]
struct Cli {
    /// Add wall-clock time to the output.
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Min-rank of an ICSI instance's side-information hypergraph.
    Minrank {
        instance: PathBuf,
        #[arg(long, default_value = "2")]
        field: String,
        /// Also count fitting matrices by rank.
        #[arg(long)]
        distribution: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// κ, the optimal linear length of an ICCSI instance.
    Kappa {
        instance: PathBuf,
        /// Field for embedding ICSI files.
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Clique-based upper bounds.
    Bounds {
        instance: PathBuf,
        #[arg(long, default_value = "2")]
        field: String,
        /// Comma-separated parameter names, e.g. phi,phi_f,phi_p.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Every parameter (the default when --params is absent).
        #[arg(long)]
        all: bool,
        #[arg(long)]
        certificates: bool,
    },
    /// Builds or checks a 2-design.
    Design {
        /// Design file; omit when using --plane.
        design: Option<PathBuf>,
        /// The projective plane PG(2, r).
        #[arg(long)]
        plane: Option<u32>,
        /// Prime for p-rank, Klemm and weight checks.
        #[arg(long)]
        p: Option<u32>,
        /// Print the blocks.
        #[arg(long)]
        blocks: bool,
    },
    /// Index code from a design contained in an ICSI instance.
    DesignBound {
        instance: PathBuf,
        design: PathBuf,
        #[arg(long)]
        p: u32,
    },
    /// Checks that no receiver learns an unrequested message.
    Secrecy {
        instance: PathBuf,
        /// Defaults to the design read off the instance.
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(long)]
        p: u32,
    },
    /// Evaluates an eavesdropper holding some messages.
    Adversary {
        design: Option<PathBuf>,
        #[arg(long)]
        plane: Option<u32>,
        #[arg(long)]
        p: u32,
        /// 1-based messages known to the adversary.
        #[arg(long, value_delimiter = ',')]
        messages: Vec<usize>,
    },
    /// Runs a scheme on random messages and checks every receiver.
    Simulate {
        instance: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeChoice,
        #[arg(long)]
        fractional: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decides min-rank n−1 and builds the τ = 2 reduction certificate.
    Reduce {
        /// Digraph `{"n":..,"arcs":[[u,v],..]}` or a one-demand-per-message ICSI instance.
        graph: PathBuf,
        /// Defaults to the smallest prime above n.
        #[arg(long)]
        field: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeChoice {
    Clique,
    Local,
    Multicast,
    PartitionedLocal,
    Kappa,
}

enum Failure {
    Usage(String),
    Compute(String),
}

type Outcome = Result<Output, Failure>;

struct Output {
    value: Value,
    table: Option<String>,
    /// Exit with 1 after printing, e.g. when a simulation saw failures.
    failed: bool,
}

impl Output {
    fn json(value: Value) -> Self {
        Output { value, table: None, failed: false }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn field(spec: &str) -> Result<FieldSpec, Failure> {
    FieldSpec::parse(spec).map_err(usage)
}

fn iccsi(path: &Path, f: &str) -> Result<IccsiInstance, Failure> {
    let inst: Instance = read_json(path)?;
    Ok(inst.to_iccsi(&field(f)?))
}

fn icsi(path: &Path) -> Result<IcsiInstance, Failure> {
    match read_json(path)? {
        Instance::Icsi(i) => Ok(i),
        Instance::Iccsi(_) => Err(usage("this command needs an ICSI instance")),
    }
}

fn budget(b: Option<u64>) -> Result<u64, Failure> {
    match b {
        Some(0) => Err(usage("budget must be positive")),
        Some(b) => Ok(b),
        None => Ok(default_budget()),
    }
}

fn design_error(e: DesignError) -> Failure {
    match e {
        DesignError::NotADesign(_) | DesignError::Invalid(_) => usage(e),
        _ => compute(e),
    }
}

fn load_design(path: Option<&Path>, plane: Option<u32>) -> Result<Design, Failure> {
    match (path, plane) {
        (Some(p), None) => Design::from_file(&read_json::<DesignFile>(p)?).map_err(design_error),
        (None, Some(r)) => projective_plane(r).map_err(compute),
        _ => Err(usage("give either a design file or --plane")),
    }
}

/// The design whose blocks are `{f(i)} ∪ X_i`.
fn design_of_instance(inst: &IcsiInstance) -> Result<Design, Failure> {
    let mut blocks: Vec<Vec<usize>> = (0..inst.m())
        .map(|i| {
            let mut b = inst.side_info(i).to_vec();
            b.push(inst.demand(i));
            b.sort_unstable();
            b
        })
        .collect();
    blocks.sort();
    blocks.dedup();
    validate_design(inst.n(), &blocks, 2).map_err(design_error)
}

fn smallest_prime_above(n: usize) -> u32 {
    (n as u32 + 1..).find(|&q| crate::field::is_prime(q)).expect("primes are unbounded")
}

fn cmd_minrank(path: &Path, f: &str, distribution: bool, b: Option<u64>) -> Outcome {
    let inst = icsi(path)?;
    let f = field(f)?;
    let b = budget(b)?;
    let h = inst.to_hypergraph();
    let best = minrank_hypergraph(&h, &f, b).map_err(compute)?;
    let mut v = json!({ "value": best.value, "certificate": matrix_rows(&best.certificate) });
    if distribution {
        let pat = FittingPattern::of_hypergraph(&h).to_row_pattern(&f);
        let d = rank_distribution(&pat, b).map_err(compute)?;
        v["distribution"] = d.iter().map(|(r, c)| (r.to_string(), json!(c))).collect::<serde_json::Map<_, _>>().into();
    }
    Ok(Output::json(v))
}

fn cmd_kappa(path: &Path, f: &str, b: Option<u64>) -> Outcome {
    let inst = iccsi(path, f)?;
    let k = kappa(&inst, budget(b)?).map_err(compute)?;
    Ok(Output::json(json!({
        "value": k.value,
        "a": matrix_rows(&k.a),
        "certificate": matrix_rows(&k.certificate),
        "encoder": matrix_rows(&k.encoder),
    })))
}

fn cmd_bounds(path: &Path, f: &str, params: &[String], all: bool, certificates: bool) -> Outcome {
    let inst = iccsi(path, f)?;
    let params: Vec<Param> = if all || params.is_empty() {
        Param::ALL.to_vec()
    } else {
        params.iter().map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(usage)?
    };
    let report = Bounds::new(&inst).report(&params).map_err(compute)?;
    Ok(Output {
        value: report::bounds_json(&report, certificates),
        table: Some(report::bounds_table(&report)),
        failed: false,
    })
}

fn cmd_design(path: Option<&Path>, plane: Option<u32>, p: Option<u32>, blocks: bool) -> Outcome {
    let d = load_design(path, plane)?;
    let mut v = json!({
        "v": d.v(),
        "b": d.b(),
        "t": d.t(),
        "k": d.k(),
        "lambda": d.lambda(),
        "r": d.r(),
        "order": d.order(),
        "projective_plane": d.is_projective_plane(),
    });
    if blocks {
        v["blocks"] = json!(d.to_file().blocks);
    }
    if let Some(p) = p {
        v["p"] = json!(p);
        v["p_rank"] = json!(p_rank(&d, p).map_err(design_error)?);
        match klemm_check(&d, p) {
            Ok(k) => v["klemm"] = json!({ "passes": k.passes(), "report": k }),
            Err(DesignError::Inapplicable(why)) => v["klemm"] = json!({ "inapplicable": why }),
            Err(e) => return Err(design_error(e)),
        }
        if d.is_projective_plane() {
            match weight_checks(&d, p) {
                Ok(w) => v["weights"] = json!({ "passes": w.passes(), "report": w }),
                Err(DesignError::Inapplicable(why)) => v["weights"] = json!({ "inapplicable": why }),
                Err(e) => return Err(design_error(e)),
            }
        }
    }
    Ok(Output::json(v))
}

fn cmd_design_bound(inst: &Path, design: &Path, p: u32) -> Outcome {
    let inst = icsi(inst)?;
    let d = Design::from_file(&read_json::<DesignFile>(design)?).map_err(design_error)?;
    let b = design_bound(&inst, &d, p).map_err(design_error)?;
    let validity = inst.embed(b.encoder.field()).validate_code(&b.encoder).map_err(compute)?;
    let c = contains_design(&inst, &d);
    Ok(Output::json(json!({
        "p": p,
        "p_rank": b.p_rank,
        "bound": report::rational(&crate::lp::ratio(inst.m() as i64 + 1, 2)),
        "within_half": b.within_half,
        "transmissions": b.encoder.rows(),
        "valid": validity.is_valid(),
        "witness_blocks": c.witness.iter().map(|w| w.map(|x| x + 1)).collect::<Vec<_>>(),
        "fitting": matrix_rows(&b.fitting),
        "encoder": matrix_rows(&b.encoder),
    })))
}

fn cmd_secrecy(inst: &Path, design: Option<&Path>, p: u32) -> Outcome {
    let inst = icsi(inst)?;
    let d = match design {
        Some(path) => load_design(Some(path), None)?,
        None => design_of_instance(&inst)?,
    };
    let r = secrecy_check(&inst, &d, p).map_err(design_error)?;
    let leaks: Vec<Value> = r.leaks.iter().map(|&(i, j)| json!({ "receiver": i + 1, "message": j + 1 })).collect();
    let failed = !r.passes();
    Ok(Output {
        value: json!({ "p": p, "pairs_checked": r.pairs_checked, "leaks": leaks, "passes": !failed }),
        table: None,
        failed,
    })
}

fn cmd_adversary(design: Option<&Path>, plane: Option<u32>, p: u32, messages: &[usize]) -> Outcome {
    let d = load_design(design, plane)?;
    if messages.iter().any(|&m| m == 0) {
        return Err(usage("messages are numbered from 1"));
    }
    let xa: Vec<usize> = messages.iter().map(|m| m - 1).collect();
    let r = adversary_check(&d, &xa, p).map_err(design_error)?;
    Ok(Output::json(json!({
        "p": p,
        "messages": messages,
        "size_ok": r.size_ok,
        "violating_block": r.violating_block.map(|b| b + 1),
        "hypotheses_hold": r.hypotheses_hold(),
        "recoverable": r.recoverable.iter().map(|j| j + 1).collect::<Vec<_>>(),
        "safe": r.safe,
    })))
}

fn cmd_simulate(path: &Path, choice: SchemeChoice, fractional: bool, trials: usize, seed: u64, f: &str, b: Option<u64>) -> Outcome {
    let inst = iccsi(path, f)?;
    let scheme = match choice {
        SchemeChoice::Kappa => {
            let k = kappa(&inst, budget(b)?).map_err(compute)?;
            Scheme::linear(&inst, &k.encoder).map_err(compute)?
        }
        _ => {
            let param = match (choice, fractional) {
                (SchemeChoice::Clique, false) => Param::Phi,
                (SchemeChoice::Clique, true) => Param::PhiF,
                (SchemeChoice::Local, false) => Param::PhiL,
                (SchemeChoice::Local, true) => Param::PhiLf,
                (SchemeChoice::Multicast, false) => Param::PhiP,
                (SchemeChoice::Multicast, true) => Param::PhiPF,
                (SchemeChoice::PartitionedLocal, false) => Param::PhiPL,
                (SchemeChoice::PartitionedLocal, true) => Param::PhiPLf,
                (SchemeChoice::Kappa, _) => unreachable!(),
            };
            let bound = Bounds::new(&inst).compute(param).map_err(compute)?;
            Scheme::from_bound(&inst, &bound, matches!(choice, SchemeChoice::Multicast)).map_err(compute)?
        }
    };
    let sim = scheme.simulate(trials, seed);
    Ok(Output {
        value: report::simulation_json(&sim),
        table: Some(report::simulation_table(&sim)),
        failed: sim.failures > 0,
    })
}

fn cmd_reduce(path: &Path, f: Option<&str>) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| usage(format!("{}: {e}", path.display()));
    let raw: Value = serde_json::from_str(&text).map_err(bad)?;
    let g: Digraph = if raw.get("type").is_some() {
        match serde_json::from_value::<Instance>(raw).map_err(bad)? {
            Instance::Icsi(i) => i.to_digraph().map_err(usage)?,
            Instance::Iccsi(_) => return Err(usage("reduce needs a digraph or an ICSI instance")),
        }
    } else {
        serde_json::from_value(raw).map_err(bad)?
    };
    let f = match f {
        Some(s) => field(s)?,
        None => FieldSpec::prime(smallest_prime_above(g.n())).map_err(compute)?,
    };
    let decision = decide_minrank_n_minus_1(&g, &f).map_err(|e| match e {
        crate::digraph::DigraphError::FieldTooSmall { .. } => usage(e),
        other => compute(other),
    })?;
    let mut v = json!({ "n": g.n(), "field": f.q(), "minrank_is_n_minus_1": decision.is_yes() });
    match decision {
        Decision::Yes { certificate } => {
            v["tau"] = json!(1);
            v["rank"] = json!(certificate.rank());
            v["certificate"] = matrix_rows(&certificate);
        }
        Decision::No(NoReason::Acyclic) => {
            v["tau"] = json!(0);
            v["reason"] = json!("acyclic");
        }
        Decision::No(NoReason::TauAtLeastTwo { tau2_certificate }) => {
            v["reason"] = json!("tau at least 2");
            if let Some(c) = tau2_certificate {
                v["tau"] = json!(2);
                v["rank"] = json!(c.rank());
                v["certificate"] = matrix_rows(&c);
            }
        }
    }
    Ok(Output::json(v))
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Minrank { instance, field, distribution, budget } => cmd_minrank(instance, field, *distribution, *budget),
        Command::Kappa { instance, field, budget } => cmd_kappa(instance, field, *budget),
        Command::Bounds { instance, field, params, all, certificates } => {
            cmd_bounds(instance, field, params, *all, *certificates)
        }
        Command::Design { design, plane, p, blocks } => cmd_design(design.as_deref(), *plane, *p, *blocks),
        Command::DesignBound { instance, design, p } => cmd_design_bound(instance, design, *p),
        Command::Secrecy { instance, design, p } => cmd_secrecy(instance, design.as_deref(), *p),
        Command::Adversary { design, plane, p, messages } => cmd_adversary(design.as_deref(), *plane, *p, messages),
        Command::Simulate { instance, scheme, fractional, trials, seed, field, budget } => {
            cmd_simulate(instance, *scheme, *fractional, *trials, *seed, field, *budget)
        }
        Command::Reduce { graph, field } => cmd_reduce(graph, field.as_deref()),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Table => Format::Table,
    };
    let start = Instant::now();
    match dispatch(&cli.command) {
        Ok(mut o) => {
            let text = match (format, &o.table) {
                (Format::Table, Some(t)) => {
                    let mut t = t.clone();
                    if cli.timing {
                        t.push_str(&format!("elapsed        {:.3} s\n", start.elapsed().as_secs_f64()));
                    }
                    t
                }
                _ => {
                    if cli.timing {
                        if let Value::Object(m) = &mut o.value {
                            m.insert("elapsed".into(), json!(start.elapsed().as_secs_f64()));
                        }
                    }
                    report::to_text(&o.value)
                }
            };
            let _ = out.write_all(text.as_bytes());
            i32::from(o.failed)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
