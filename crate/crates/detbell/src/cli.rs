//! The `detbell` command-line tool: evaluation and cross-checking of the
//! determinant/permanent formulas, decomposition export and verification,
//! rank bound tables, Waring decompositions, tiling reports, and the
//! GF(2) rank-1 search.
//!
//! Exit codes: 0 on success, 1 when a verification fails or formulas
//! disagree, 2 on usage errors. All numeric output is exact (integers and
//! reduced fractions); `--json` switches to machine-readable output.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use crate::combinatorics::{bell, bell_nk};
use crate::det_formulas::{self, FormulaKind, Target};
use crate::f2_search::{
    self, FirstMatrix, SearchConfig, SearchOutcome,
};
use crate::geometry::{self, AdmissibleMatrix};
use crate::scalar::{Domain, Matrix};
use crate::tensor_decomp::{self, Verdict};
use crate::waring;

const EXIT_OK: i32 = 0;
const EXIT_MISMATCH: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "detbell",
    version,
    about = "Exact determinant/permanent formulas, tensor and Waring decompositions, tilings, and the GF(2) rank search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one formula on a matrix, or compare all applicable ones
    Eval(EvalArgs),
    /// Print Bell-number and graded part-count tables
    Counts {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Build a tensor decomposition from a formula and write it as JSON
    Decompose {
        #[arg(long)]
        formula: String,
        #[arg(short)]
        n: usize,
        /// Coefficient domain: Z, Q, Fp:<p> or F2
        #[arg(long)]
        domain: String,
        /// Output file
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a decomposition file against the dense target tensor
    Verify { file: PathBuf },
    /// Tensor-rank bound table at dimension n (optionally for F_q)
    Bounds {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Waring decomposition of the determinant polynomial over Q
    Waring {
        #[arg(short)]
        n: usize,
        /// Write the decomposition document to a file
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Tiling report for an admissible matrix: skeleton, volume,
    /// neighbours, and point coverage
    Polytope(PolytopeArgs),
    /// Backtracking search over rank-1 GF(2) matrix tuples
    Search(SearchArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// One of: leibniz, per-leibniz, ryser, glynn, main, charp, char2, intree
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    matrix_file: PathBuf,
    /// Evaluate every applicable formula and print an agreement table
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PolytopeArgs {
    /// Expected dimension (checked against the matrix file when given)
    #[arg(short)]
    n: Option<usize>,
    #[arg(long)]
    matrix_file: PathBuf,
    /// Write an SVG of the 2-dimensional tile and its six neighbours
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Seed for the coverage sample points
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of coverage sample points
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// Target tuple length (9, 10, or the feature-gated 11)
    #[arg(long)]
    r: Option<usize>,
    /// Keep completed tuples that violate the unique-hit lemma
    #[arg(long)]
    no_lemma_filter: bool,
    /// Worker threads (defaults to DETBELL_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Write a replayable run certificate
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Restrict the first matrix: "44" (last entry) or "43" (penultimate)
    #[arg(long)]
    first_matrix: Option<String>,
    /// Abort after this many search nodes
    #[arg(long)]
    node_budget: Option<u64>,
    /// Checkpoint file for resumable long runs
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Replay and validate an existing certificate instead of searching
    #[arg(long)]
    verify_cert: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("{msg}");
            EXIT_MISMATCH
        }
    }
}

enum CliError {
    /// Bad input or flag combination: exit 2.
    Usage(String),
    /// A check failed: exit 1.
    Failed(String),
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Eval(args) => eval_cmd(args),
        Command::Counts { n, json } => counts_cmd(n, json),
        Command::Decompose {
            formula,
            n,
            domain,
            output,
        } => decompose_cmd(&formula, n, &domain, &output),
        Command::Verify { file } => verify_cmd(&file),
        Command::Bounds { n, q, json } => bounds_cmd(n, q, json),
        Command::Waring { n, output, json } => waring_cmd(n, output.as_deref(), json),
        Command::Polytope(args) => polytope_cmd(args),
        Command::Search(args) => search_cmd(args),
    }
}

fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Matrix::parse_text(&text).map_err(usage)
}

fn parse_formula(s: &str) -> Result<FormulaKind, CliError> {
    s.parse().map_err(usage)
}

fn eval_cmd(args: EvalArgs) -> Result<i32, CliError> {
    let matrix = read_matrix(&args.matrix_file)?;
    if args.compare {
        return compare_cmd(&matrix, args.json);
    }
    let Some(formula) = args.formula.as_deref() else {
        return Err(CliError::Usage(
            "either --formula <kind> or --compare is required".into(),
        ));
    };
    let kind = parse_formula(formula)?;
    let value = det_formulas::eval(kind, &matrix).map_err(usage)?;
    if args.json {
        println!(
            "{}",
            json!({
                "formula": kind.to_string(),
                "n": matrix.n(),
                "domain": matrix.domain().to_string(),
                "value": value.to_string(),
            })
        );
    } else {
        println!("{value}");
    }
    Ok(EXIT_OK)
}

fn compare_cmd(matrix: &Matrix, as_json: bool) -> Result<i32, CliError> {
    let ch = matrix.domain().characteristic();
    let det = det_formulas::det_leibniz(matrix);
    let per = det_formulas::per_leibniz(matrix);
    let mut rows = Vec::new();
    let mut all_agree = true;
    for kind in FormulaKind::ALL {
        if kind.admits_characteristic(ch).is_err() {
            continue;
        }
        let value = det_formulas::eval(kind, matrix).map_err(usage)?;
        let oracle = match kind.target() {
            Target::Determinant => &det,
            Target::Permanent => &per,
        };
        let agree = value == *oracle;
        all_agree &= agree;
        rows.push((kind, value, agree));
    }
    if as_json {
        let entries: Vec<_> = rows
            .iter()
            .map(|(kind, value, agree)| {
                json!({
                    "formula": kind.to_string(),
                    "target": match kind.target() {
                        Target::Determinant => "det",
                        Target::Permanent => "per",
                    },
                    "value": value.to_string(),
                    "agrees": agree,
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "det": det.to_string(),
                "per": per.to_string(),
                "formulas": entries,
                "all_agree": all_agree,
            })
        );
    } else {
        println!("det (leibniz oracle) = {det}");
        println!("per (leibniz oracle) = {per}");
        for (kind, value, agree) in &rows {
            let target = match kind.target() {
                Target::Determinant => "det",
                Target::Permanent => "per",
            };
            let mark = if *agree { "ok " } else { "FAIL" };
            println!("  [{mark}] {kind:<12} {target} = {value}");
        }
    }
    Ok(if all_agree { EXIT_OK } else { EXIT_MISMATCH })
}

fn counts_cmd(n: usize, as_json: bool) -> Result<i32, CliError> {
    if as_json {
        let rows: Vec<_> = (0..=n)
            .map(|m| {
                json!({
                    "n": m,
                    "bell": bell(m).to_string(),
                    "bell_nk": (0..=m / 2).map(|k| bell_nk(m, k).to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", json!({ "rows": rows }));
        return Ok(EXIT_OK);
    }
    println!("{:>3} {:>12}  graded part counts (k = 0, 1, ..)", "n", "bell");
    for m in 0..=n {
        let graded: Vec<String> = (0..=m / 2).map(|k| bell_nk(m, k).to_string()).collect();
        println!("{m:>3} {:>12}  {}", bell(m).to_string(), graded.join(" "));
    }
    Ok(EXIT_OK)
}

fn decompose_cmd(formula: &str, n: usize, domain: &str, output: &Path) -> Result<i32, CliError> {
    let kind = parse_formula(formula)?;
    let domain: Domain = domain.parse().map_err(CliError::Usage)?;
    let dec = tensor_decomp::decomposition_from_formula(kind, n, &domain).map_err(usage)?;
    let doc = tensor_decomp::export_decomposition(&dec).map_err(usage)?;
    std::fs::write(output, doc)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", output.display())))?;
    println!(
        "wrote {} terms ({} over {}) to {}",
        dec.rank(),
        kind,
        domain,
        output.display()
    );
    Ok(EXIT_OK)
}

fn verify_cmd(file: &Path) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", file.display())))?;
    let dec = tensor_decomp::import_decomposition(&text).map_err(usage)?;
    match tensor_decomp::expand_and_check(&dec).map_err(usage)? {
        Verdict::Valid => {
            println!(
                "valid: {} terms reproduce the order-{} {} tensor over {}",
                dec.rank(),
                dec.n,
                match dec.target {
                    Target::Determinant => "determinant",
                    Target::Permanent => "permanent",
                },
                dec.domain
            );
            Ok(EXIT_OK)
        }
        Verdict::Invalid { witness } => Err(CliError::Failed(format!(
            "invalid: expansion disagrees with the target tensor at index {witness:?}"
        ))),
    }
}

fn bounds_cmd(n: usize, q: Option<u64>, as_json: bool) -> Result<i32, CliError> {
    let lower_general = tensor_decomp::lower_bound_general(n);
    let upper_general = bell(n);
    let (lower, upper, characteristic) = match q {
        None => (lower_general.clone(), upper_general.clone(), 0u64),
        Some(q) => {
            let lower = tensor_decomp::lower_bound_fq(n, q).map_err(usage)?;
            // the count of the positive-characteristic formula, using the
            // characteristic p of F_q = F_{p^k}
            let p = (2..=q).find(|p| q % p == 0).unwrap_or(q);
            let upper = det_formulas::term_count(FormulaKind::CharP, n, p).map_err(usage)?;
            (lower, upper, p)
        }
    };
    // exactly known small cases
    let exact: Option<BigInt> = match (n, q) {
        (0, _) => Some(BigInt::from(1)),
        (1, _) => Some(BigInt::from(1)),
        (2, _) => Some(BigInt::from(2)),
        (3, _) => Some(BigInt::from(5)),
        (4, Some(2)) => Some(BigInt::from(12)),
        _ => None,
    };
    if as_json {
        println!(
            "{}",
            json!({
                "n": n,
                "q": q,
                "characteristic": if q.is_some() { Some(characteristic) } else { None },
                "lower": lower.to_string(),
                "upper": upper.to_string(),
                "exact": exact.as_ref().map(|v| v.to_string()),
            })
        );
        return Ok(EXIT_OK);
    }
    match q {
        None => println!("n = {n}: {lower} <= Trank(det^n) <= {upper} (any field)"),
        Some(q) => {
            println!("n = {n}, q = {q}: {lower} <= Trank(det^n over F_{q}) <= {upper}")
        }
    }
    if let Some(e) = exact {
        println!("known exactly: Trank = {e}");
    }
    Ok(EXIT_OK)
}

fn waring_cmd(n: usize, output: Option<&Path>, as_json: bool) -> Result<i32, CliError> {
    let dec = waring::waring_from_formula(n, &Domain::Rational).map_err(usage)?;
    let (ours, root_of_unity) = waring::reference_bounds(n);
    let terms: Vec<_> = dec
        .forms
        .iter()
        .map(|(c, form)| {
            let coeffs: serde_json::Map<String, serde_json::Value> = form
                .coefficients()
                .map(|(&(i, j), v)| (format!("{i},{j}"), json!(v.to_string())))
                .collect();
            json!({ "coeff": c.to_string(), "form": coeffs })
        })
        .collect();
    let doc = json!({
        "n": n,
        "domain": "Q",
        "term_count": dec.rank(),
        "bound_power_times_bell": ours.to_string(),
        "bound_root_of_unity": root_of_unity.to_string(),
        "terms": terms,
    });
    if let Some(path) = output {
        std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serializable"))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if as_json {
        println!("{doc}");
    } else {
        println!(
            "waring decomposition of det_{n}: {} terms (bounds: 2^(n-1) B_n = {ours}, n*n! = {root_of_unity})",
            dec.rank()
        );
        if let Some(path) = output {
            println!("wrote decomposition to {}", path.display());
        }
    }
    Ok(EXIT_OK)
}

fn polytope_cmd(args: PolytopeArgs) -> Result<i32, CliError> {
    let matrix = read_matrix(&args.matrix_file)?;
    if let Some(n) = args.n {
        if n != matrix.n() {
            return Err(CliError::Usage(format!(
                "-n {n} does not match the {}-dimensional matrix file",
                matrix.n()
            )));
        }
    }
    let a = AdmissibleMatrix::new(&matrix).map_err(usage)?;
    let n = a.n();
    let sk = geometry::skeleton(&a);
    let volume = geometry::volume_inclusion_exclusion(&a);
    let det = det_formulas::det_leibniz(&a.to_matrix());
    let det_rat = det.to_rational().expect("rational domain");
    let volume_matches = volume == det_rat;

    let neighbours = if n <= 3 {
        Some(geometry::check_neighbours(&a).map_err(usage)?)
    } else {
        None
    };

    let coverage = if n <= 3 && args.samples > 0 {
        let mut rng = StdRng::seed_from_u64(args.seed);
        let samples: Vec<Vec<BigRational>> = (0..args.samples)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        BigRational::new(
                            rng.random_range(-20i64..=20).into(),
                            rng.random_range(1i64..=4).into(),
                        )
                    })
                    .collect()
            })
            .collect();
        Some(geometry::check_coverage(&a, &samples).map_err(usage)?)
    } else {
        None
    };

    if let Some(path) = &args.svg {
        let svg = geometry::tile_svg(&a).map_err(usage)?;
        std::fs::write(path, svg)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }

    if args.json {
        println!(
            "{}",
            json!({
                "n": n,
                "vertices": sk.vertices.len(),
                "edges": sk.edges.len(),
                "volume": volume.to_string(),
                "det": det.to_string(),
                "volume_matches_det": volume_matches,
                "neighbours": neighbours.as_ref().map(|r| json!({
                    "count": r.neighbour_count,
                    "expected": r.expected_neighbours,
                    "boundary_only": r.boundary_only,
                    "non_neighbours_checked": r.non_neighbours_checked,
                    "non_neighbours_disjoint": r.non_neighbours_disjoint,
                })),
                "coverage": coverage.as_ref().map(|r| json!({
                    "points_covered": r.points_covered,
                    "max_descent_steps": r.max_descent_steps,
                    "step_budget": r.step_budget,
                })),
            })
        );
    } else {
        println!("tile of a {n} x {n} admissible matrix:");
        println!("  vertices: {} (one per ordered partial partition)", sk.vertices.len());
        println!("  edges:    {} ({}-regular flip graph)", sk.edges.len(), n);
        println!(
            "  volume:   {volume} vs det = {det} ({})",
            if volume_matches { "match" } else { "MISMATCH" }
        );
        if let Some(r) = &neighbours {
            println!(
                "  neighbours: {} of {} expected; boundary-only overlap: {}; {} non-neighbours all disjoint: {}",
                r.neighbour_count,
                r.expected_neighbours,
                r.boundary_only,
                r.non_neighbours_checked,
                r.non_neighbours_disjoint
            );
        }
        if let Some(r) = &coverage {
            println!(
                "  coverage: {} sample points covered (max descent {} of budget {})",
                r.points_covered, r.max_descent_steps, r.step_budget
            );
        }
        if let Some(path) = &args.svg {
            println!("  svg: wrote {}", path.display());
        }
    }

    let healthy = volume_matches
        && neighbours.as_ref().map_or(true, |r| {
            r.neighbour_count == r.expected_neighbours && r.boundary_only && r.non_neighbours_disjoint
        });
    Ok(if healthy { EXIT_OK } else { EXIT_MISMATCH })
}

fn search_cmd(args: SearchArgs) -> Result<i32, CliError> {
    if let Some(cert_path) = &args.verify_cert {
        let text = std::fs::read_to_string(cert_path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", cert_path.display())))?;
        return match f2_search::verify_certificate(&text) {
            Ok(report) => {
                println!(
                    "certificate ok: {} pruned nodes replayed, {} extensions checked",
                    report.samples_replayed, report.extensions_checked
                );
                Ok(EXIT_OK)
            }
            Err(e) => Err(CliError::Failed(format!("{e}"))),
        };
    }
    let Some(r) = args.r else {
        return Err(CliError::Usage("--r <9|10|11> is required".into()));
    };
    let workers = args
        .workers
        .or_else(|| {
            std::env::var("DETBELL_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let first_matrix = match args.first_matrix.as_deref() {
        None => None,
        Some("44") => Some(FirstMatrix::LastEntry),
        Some("43") => Some(FirstMatrix::PenultimateEntry),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--first-matrix must be 44 or 43, got {other:?}"
            )))
        }
    };
    let config = SearchConfig {
        r,
        first_matrix,
        workers,
        lemma_filter: !args.no_lemma_filter,
        node_budget: args.node_budget,
        checkpoint: args.checkpoint.clone(),
    };
    let result = match f2_search::search(&config) {
        Ok(result) => result,
        Err(f2_search::SearchError::InvalidR(r)) => {
            return Err(CliError::Usage(format!("r = {r} is out of range")))
        }
        Err(f2_search::SearchError::R11Disabled) => {
            return Err(CliError::Usage(
                f2_search::SearchError::R11Disabled.to_string(),
            ))
        }
        Err(e) => return Err(CliError::Failed(format!("{e}"))),
    };
    if let Some(path) = &args.cert {
        f2_search::write_certificate(&result, path).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    if args.json {
        let cert = f2_search::certificate(&result);
        println!("{}", serde_json::to_string(&cert).expect("serializable"));
    } else {
        match &result.outcome {
            SearchOutcome::NoSolution => println!(
                "r = {}: no rank-1 tuple covers the antisymmetric subspace \
                 (nodes {}, pruned {}, lemma-eliminated {}, {:.3}s)",
                result.r,
                result.nodes_visited,
                result.pruned,
                result.lemma_eliminated,
                result.wall_millis as f64 / 1000.0
            ),
            SearchOutcome::Candidates(ts) => println!(
                "r = {}: {} candidate tuple(s) survive (nodes {}, pruned {}, {:.3}s)",
                result.r,
                ts.len(),
                result.nodes_visited,
                result.pruned,
                result.wall_millis as f64 / 1000.0
            ),
        }
        if let Some(path) = &args.cert {
            println!("wrote certificate to {}", path.display());
        }
    }
    Ok(EXIT_OK)
}
