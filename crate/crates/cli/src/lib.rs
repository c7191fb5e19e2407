//! Command-line front end for `bsep`.
//!
//! [`run`] takes the argument vector and returns the exit code with the text
//! destined for standard output and standard error, so the whole command
//! surface is testable in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use bsep::addressing::{
    complete_graph_addressing, cyclic_order_addressing, hadamard_addressing, k4_addressing,
    linear_order_addressing, parse_addressing, tree_addressing, verify, verify_report, Addressing,
};
use bsep::bounds::{all_bounds, lower_bounds_dm, BoundsConfig, DEFAULT_HELD_KARP_CAP, DEFAULT_SUBSET_CAP};
use bsep::exact::{
    branch_and_bound_c_with, brute_force_c, constructive_upper, BnbConfig, ExactError, ExactResult,
    SearchConfig, DEFAULT_NODE_LIMIT,
};
use bsep::graph::{parse_graph, product_of, DistanceMatrix, WeightedGraph};
use bsep::lee::{lee_upper, reproduce_table, table_kv, table_text, LeeError, LeeQuery, DEFAULT_LAMBDA_MAX};
use bsep::lp::{
    build_dual_with_cap, build_primal_with_cap, candidate_mu, fmt_rational, solve_optimal, LpError,
    DEFAULT_PRIMAL_CAP,
};
use bsep::product::{certify_product_exact_with, product_upper, CertifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub const ENV_NODE_LIMIT: &str = "BSEP_NODE_LIMIT";
pub const ENV_PRIMAL_CAP: &str = "BSEP_PRIMAL_CAP";
pub const ENV_HELD_KARP_CAP: &str = "BSEP_HELD_KARP_CAP";
pub const ENV_LAMBDA_MAX: &str = "BSEP_LAMBDA_MAX";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "bsep", version, about = "Binary stretch embeddings of edge-weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Table,
    Kv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Scheme {
    Path,
    Cycle,
    Tree,
    Clique,
    Hadamard,
    K4,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Method {
    /// Backtracking over addressings
    #[default]
    Search,
    /// Branch and bound over the column-count program
    Bnb,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report every lower and upper bound rule
    Bounds {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        held_karp_cap: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
    },
    /// Prove the exact value of c_lambda and print a witness
    Exact {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, value_enum, default_value_t)]
        method: Method,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        primal_cap: Option<usize>,
        /// Write the witness addressing to this file
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Solve the fractional relaxation exactly
    Beta {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        primal_cap: Option<usize>,
        /// Write the primal covering program in LP format
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Write the dual packing program in LP format
        #[arg(long)]
        export_dual: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build an addressing with a constructive scheme
    Address {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an addressing against a graph (exit 1 on rejection)
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        addr: PathBuf,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Upper bound on Lee codes over Z_q of length n and minimum distance d
    Lee {
        q: u64,
        n: u64,
        d: u64,
        #[arg(long)]
        lambda_max: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Recompute the published table of Lee-code upper bounds
    LeeTable {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Cartesian product of factor graphs with its concatenated addressing
    Product {
        #[arg(long, num_args = 1.., required = true)]
        factors: Vec<PathBuf>,
        /// Try to prove additivity of c and beta
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        primal_cap: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
    /// Output produced before the failure, such as partial bounds.
    stdout: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into(), stdout: String::new() }
    }
}

fn lp_failure(e: LpError) -> Failure {
    Failure::validation(e.to_string())
}

type CmdResult = Result<String, Failure>;

/// Runs with the process environment.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_env(args, |k| std::env::var(k).ok())
}

/// Runs with `env` supplying environment variables. Flags take precedence
/// over the environment, which takes precedence over built-in defaults.
pub fn run_with_env<I, S, E>(args: I, env: E) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    E: Fn(&str) -> Option<String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_VALIDATION, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli.command, &env) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(f) => Outcome { code: f.code, stdout: f.stdout, stderr: format!("error: {}\n", f.message) },
    }
}

fn setting<T: std::str::FromStr>(
    flag: Option<T>,
    env: &dyn Fn(&str) -> Option<String>,
    key: &str,
    default: T,
) -> Result<T, Failure> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match env(key) {
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Failure::validation(format!("{key} must be a non-negative integer, got {raw:?}"))),
        None => Ok(default),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<(WeightedGraph, DistanceMatrix), Failure> {
    let g = parse_graph(&read(path)?).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let dm = g.distances().map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    Ok((g, dm))
}

fn positive_lambda(lambda: u64) -> Result<(), Failure> {
    if lambda == 0 {
        return Err(Failure::validation("lambda must be a positive integer"));
    }
    Ok(())
}

fn dispatch(cmd: Command, env: &dyn Fn(&str) -> Option<String>) -> CmdResult {
    match cmd {
        Command::Bounds { graph, format, held_karp_cap, subset_cap } => {
            let (g, _) = load_graph(&graph)?;
            let cfg = BoundsConfig {
                subset_cap,
                held_karp_cap: setting(held_karp_cap, env, ENV_HELD_KARP_CAP, DEFAULT_HELD_KARP_CAP)?,
            };
            let report = all_bounds(&g, cfg).map_err(|e| Failure::validation(e.to_string()))?;
            Ok(match format {
                Format::Table => report.to_table(),
                Format::Kv => report.to_kv(),
            })
        }
        Command::Exact { graph, lambda, method, node_limit, primal_cap, out, format } => {
            positive_lambda(lambda)?;
            let (_, dm) = load_graph(&graph)?;
            let result = match method {
                Method::Search => {
                    let cfg = SearchConfig {
                        node_limit: setting(node_limit, env, ENV_NODE_LIMIT, DEFAULT_NODE_LIMIT)?,
                        ..SearchConfig::default()
                    };
                    brute_force_c(&dm, lambda, &cfg)
                }
                Method::Bnb => {
                    let defaults = BnbConfig::default();
                    let cfg = BnbConfig {
                        node_limit: setting(node_limit, env, ENV_NODE_LIMIT, defaults.node_limit)?,
                        primal_cap: setting(primal_cap, env, ENV_PRIMAL_CAP, DEFAULT_PRIMAL_CAP)?,
                    };
                    branch_and_bound_c_with(&dm, lambda, &cfg, None)
                }
            };
            match result {
                Ok(r) => {
                    if let Some(path) = &out {
                        write(path, &r.witness.to_text())?;
                    }
                    Ok(exact_report(&r, lambda, format))
                }
                Err(e @ (ExactError::BudgetExceeded { .. } | ExactError::LengthCap { .. })) => {
                    Err(partial_report(&dm, lambda, &e, format))
                }
                Err(ExactError::Lp(e)) => Err(lp_failure(e)),
                Err(e) => Err(Failure::validation(e.to_string())),
            }
        }
        Command::Beta { graph, primal_cap, export_lp, export_dual, format } => {
            let (_, dm) = load_graph(&graph)?;
            let cap = setting(primal_cap, env, ENV_PRIMAL_CAP, DEFAULT_PRIMAL_CAP)?;
            let primal = build_primal_with_cap(&dm, 1, cap).map_err(lp_failure)?;
            if let Some(path) = &export_lp {
                write(path, &primal.to_lp_format())?;
            }
            if let Some(path) = &export_dual {
                write(path, &build_dual_with_cap(&dm, cap).map_err(lp_failure)?.to_lp_format())?;
            }
            let sol = solve_optimal(&primal).map_err(lp_failure)?;
            let beta = fmt_rational(&sol.value);
            let mu = candidate_mu(&sol);
            Ok(match format {
                Format::Table => format!("beta = {beta}, candidate mu = {mu}\n"),
                Format::Kv => format!("beta={beta}\ncandidate_mu={mu}\n"),
            })
        }
        Command::Address { graph, scheme, lambda, out } => {
            positive_lambda(lambda)?;
            let (g, dm) = load_graph(&graph)?;
            let a = build_scheme(&g, &dm, scheme, lambda)?;
            match verify(&a, &dm, lambda) {
                Ok(true) => {}
                _ => return Err(Failure::validation("internal check failed: constructed addressing is invalid")),
            }
            match out {
                Some(path) => {
                    write(&path, &a.to_text())?;
                    Ok(format!("wrote {} rows of length {} to {}\n", a.n(), a.len(), path.display()))
                }
                None => Ok(a.to_text()),
            }
        }
        Command::Verify { graph, addr, lambda, format } => {
            positive_lambda(lambda)?;
            let (_, dm) = load_graph(&graph)?;
            let a = parse_addressing(&read(&addr)?)
                .map_err(|e| Failure::validation(format!("{}: {e}", addr.display())))?;
            let rep = verify_report(&a, &dm, lambda).map_err(|e| Failure::validation(e.to_string()))?;
            let text = verify_text(&a, &dm, lambda, &rep, format);
            if rep.valid {
                Ok(text)
            } else {
                Err(Failure { code: EXIT_REJECTED, message: "addressing rejected".into(), stdout: text })
            }
        }
        Command::Lee { q, n, d, lambda_max, format } => {
            let lambda_max = setting(lambda_max, env, ENV_LAMBDA_MAX, DEFAULT_LAMBDA_MAX)?;
            let query = LeeQuery::with_lambda_max(q, n, d, lambda_max).map_err(|e| Failure::validation(e.to_string()))?;
            let b = lee_upper(&query).map_err(|e: LeeError| Failure::validation(e.to_string()))?;
            Ok(match format {
                Format::Table => format!(
                    "A^L ≤ {} via A_2({},{}), lambda={}\n",
                    b.value, b.binary_length, b.binary_distance, b.witness_lambda
                ),
                Format::Kv => format!(
                    "bound={}\nlambda={}\nbinary_length={}\nbinary_distance={}\n",
                    b.value, b.witness_lambda, b.binary_length, b.binary_distance
                ),
            })
        }
        Command::LeeTable { format } => {
            let rows = reproduce_table();
            Ok(match format {
                Format::Table => table_text(&rows),
                Format::Kv => table_kv(&rows),
            })
        }
        Command::Product { factors, certify, node_limit, primal_cap, format } => {
            let gs: Vec<WeightedGraph> = factors.iter().map(|p| load_graph(p).map(|x| x.0)).collect::<Result<_, _>>()?;
            let product = product_of(&gs).expect("at least one factor");
            let cert = if certify {
                let cfg = CertifyConfig {
                    search: SearchConfig {
                        node_limit: setting(node_limit, env, ENV_NODE_LIMIT, CertifyConfig::default().search.node_limit)?,
                        ..SearchConfig::default()
                    },
                    primal_cap: setting(primal_cap, env, ENV_PRIMAL_CAP, DEFAULT_PRIMAL_CAP)?,
                };
                Some(certify_product_exact_with(&gs, &cfg))
            } else {
                None
            };
            let witness = match cert.as_ref().and_then(|c| c.as_ref()).and_then(|c| c.witness.clone()) {
                Some(w) => w,
                None => {
                    let parts: Vec<Addressing> = gs
                        .iter()
                        .map(|g| {
                            let dm = g.distances().expect("loaded graphs are connected");
                            constructive_upper(&dm, 1).map_err(|e| Failure::validation(e.to_string()))
                        })
                        .collect::<Result<_, _>>()?;
                    product_upper(&parts).map_err(|e| Failure::validation(e.to_string()))?
                }
            };
            Ok(product_report(&product, &witness, cert, format))
        }
    }
}

fn build_scheme(g: &WeightedGraph, dm: &DistanceMatrix, scheme: Scheme, lambda: u64) -> Result<Addressing, Failure> {
    let scaled = dm.scaled(lambda);
    let fail = |e: bsep::addressing::AddressingError| Failure::validation(e.to_string());
    match scheme {
        Scheme::Path => {
            let (order, _) = g.path_order().ok_or_else(|| Failure::validation("scheme path needs a path graph"))?;
            Ok(linear_order_addressing(&scaled, &order))
        }
        Scheme::Cycle => {
            let (order, _) = g.cycle_order().ok_or_else(|| Failure::validation("scheme cycle needs a cycle graph"))?;
            Ok(cyclic_order_addressing(&scaled, &order))
        }
        Scheme::Tree => {
            if !g.is_tree() {
                return Err(Failure::validation("scheme tree needs a tree"));
            }
            let triples: Vec<(usize, usize, u64)> = g.edges().iter().map(|e| (e.u, e.v, e.w * lambda)).collect();
            let t = WeightedGraph::from_triples(g.n(), &triples).map_err(|e| Failure::validation(e.to_string()))?;
            tree_addressing(&t).map_err(fail)
        }
        Scheme::Clique => {
            let n = g.n();
            let w = g.edges().first().map_or(1, |e| e.w);
            let complete = g.edges().len() == n * (n - 1) / 2 && g.edges().iter().all(|e| e.w == w);
            if !complete {
                return Err(Failure::validation("scheme clique needs a complete graph with equal weights"));
            }
            let block = complete_graph_addressing(n);
            Ok((1..w * lambda).fold(block.clone(), |acc, _| acc.hconcat(&block).expect("same row count")))
        }
        Scheme::Hadamard => hadamard_addressing(dm, lambda).map_err(fail),
        Scheme::K4 => {
            if g.n() != 4 {
                return Err(Failure::validation("scheme k4 needs exactly 4 vertices"));
            }
            k4_addressing(&scaled).map_err(fail)
        }
        Scheme::Auto => constructive_upper(dm, lambda).map_err(|e| Failure::validation(e.to_string())),
    }
}

fn quantity(lambda: u64) -> String {
    if lambda == 1 {
        "c".into()
    } else {
        format!("c_{lambda}")
    }
}

fn exact_report(r: &ExactResult, lambda: u64, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Table => {
            let _ = writeln!(s, "{} = {} (proven; lower bound rule = {})", quantity(lambda), r.value, r.lower_rule);
            let _ = writeln!(s, "{}", r.certificate());
            let _ = writeln!(s, "nodes = {}", r.nodes);
            s.push_str("witness:\n");
            s.push_str(&r.witness.to_text());
        }
        Format::Kv => {
            let _ = writeln!(s, "lambda={lambda}");
            let _ = writeln!(s, "value={}", r.value);
            s.push_str("status=proven\n");
            let _ = writeln!(s, "lower_rule={}", r.lower_rule);
            let _ = writeln!(s, "nodes={}", r.nodes);
            for (i, row) in r.witness.rows().iter().enumerate() {
                let _ = writeln!(s, "witness.{i}={row}");
            }
        }
    }
    s
}

/// Bounds that remain valid when the search stops early, labeled as unproven.
fn partial_report(dm: &DistanceMatrix, lambda: u64, e: &ExactError, format: Format) -> Failure {
    let (lo, lo_rule) = lower_bounds_dm(&dm.scaled(lambda), BoundsConfig::default())
        .best_lower()
        .expect("lower bounds are always reported");
    let upper = constructive_upper(dm, lambda).map(|a| a.len() as u64).ok();
    let q = quantity(lambda);
    let mut s = String::new();
    match format {
        Format::Table => {
            let _ = writeln!(s, "{q} unproven: {e}");
            match upper {
                Some(u) => {
                    let _ = writeln!(s, "partial: {lo} <= {q} <= {u} (lower bound rule = {lo_rule}, upper from construction)");
                }
                None => {
                    let _ = writeln!(s, "partial: {lo} <= {q} (lower bound rule = {lo_rule})");
                }
            }
        }
        Format::Kv => {
            let _ = writeln!(s, "lambda={lambda}");
            s.push_str("status=unproven\n");
            let _ = writeln!(s, "lower={lo}");
            let _ = writeln!(s, "lower_rule={lo_rule}");
            if let Some(u) = upper {
                let _ = writeln!(s, "upper={u}");
            }
        }
    }
    Failure { code: EXIT_BUDGET, message: e.to_string(), stdout: s }
}

fn verify_text(
    a: &Addressing,
    dm: &DistanceMatrix,
    lambda: u64,
    rep: &bsep::addressing::Verification,
    format: Format,
) -> String {
    let pair = rep.tightest_pair;
    match format {
        Format::Table => match (rep.valid, pair) {
            (true, Some((u, v))) => format!(
                "accepted: minimum slack {} at pair ({u}, {v})\n",
                rep.min_slack.unwrap_or(0)
            ),
            (true, None) => "accepted\n".into(),
            (false, Some((u, v))) => format!(
                "rejected: pair ({u}, {v}) has Hamming distance {} < required {}\n",
                a.hamming(u, v),
                lambda * dm.get(u, v)
            ),
            (false, None) => "rejected\n".into(),
        },
        Format::Kv => {
            let mut s = format!("valid={}\n", rep.valid);
            if let (Some(slack), Some((u, v))) = (rep.min_slack, pair) {
                let _ = writeln!(s, "min_slack={slack}");
                let _ = writeln!(s, "tightest_pair={u},{v}");
            }
            s
        }
    }
}

fn product_report(
    product: &WeightedGraph,
    witness: &Addressing,
    cert: Option<Option<bsep::product::ProductCertificate>>,
    format: Format,
) -> String {
    let mut s = String::new();
    match format {
        Format::Table => {
            s.push_str("product graph:\n");
            s.push_str(&product.to_text());
            s.push_str("addressing:\n");
            s.push_str(&witness.to_text());
            match &cert {
                None => {}
                Some(None) => s.push_str("certificate: none (additivity unknown for these factors)\n"),
                Some(Some(pc)) => {
                    for c in [&pc.c, &pc.beta].into_iter().flatten() {
                        let _ = writeln!(s, "{c}");
                    }
                }
            }
        }
        Format::Kv => {
            let _ = writeln!(s, "product.n={}", product.n());
            let _ = writeln!(s, "product.m={}", product.edges().len());
            let _ = writeln!(s, "addressing.length={}", witness.len());
            if let Some(cert) = &cert {
                let pc = cert.as_ref();
                for (name, c) in [("c", pc.and_then(|p| p.c.as_ref())), ("beta", pc.and_then(|p| p.beta.as_ref()))] {
                    match c {
                        None => {
                            let _ = writeln!(s, "{name}.certified=false");
                        }
                        Some(c) => {
                            let _ = writeln!(s, "{name}.certified=true");
                            let _ = writeln!(s, "{name}.value={}", fmt_rational(&c.value));
                            let fs: Vec<String> = c.functions.iter().map(|f| f.0.to_string()).collect();
                            let _ = writeln!(s, "{name}.functions={}", fs.join(","));
                        }
                    }
                }
            }
        }
    }
    s
}
