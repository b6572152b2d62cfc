use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drcs_core::ambiguity::{pair_grid, theta_max_with, AfMethod, ThetaReport};
use drcs_core::bounds::{lemma1_bound, optimality_factor, BoundReport, TableId};
use drcs_core::drcs::{build_drcs, import_drcs, DrcsSet};
use drcs_core::hadamard::{dft_matrix, kronecker, load_seed, verify_bh, verify_bh_exact, walsh_hadamard};
use drcs_core::oracles::{naive_theta_max, recompute_table_row};
use drcs_core::rectangle::{
    build_circular_florentine, build_circular_quasi_florentine, build_quasi_florentine_plus_one, classify,
    find_c1_violation, find_c2_violation, product_construct, search_max_rows, truncate_columns, SearchLimits, Side,
};
use drcs_core::{Family, PhaseMatrix, Rectangle};
use serde::Serialize;
use serde_json::{json, Map, Value};

mod error;
mod pipeline;

use error::CliError;

/// Builds, verifies and evaluates Doppler-resilient complementary sequence sets.
#[derive(Debug, Parser)]
#[command(name = "drcs-forge", version)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rectangle construction and verification.
    #[command(subcommand)]
    Rect(RectCmd),
    /// Butson-Hadamard phase matrices.
    #[command(subcommand)]
    Bh(BhCmd),
    /// Sequence sets: build, evaluate, export grids.
    #[command(subcommand)]
    Drcs(DrcsCmd),
    /// Lower bound on theta_max for (K, M, L, Zy).
    Bound {
        k: usize,
        m: usize,
        l: usize,
        zy: usize,
        #[arg(long)]
        zx: Option<usize>,
    },
    /// Recompute the printed optimality-factor tables.
    Tables {
        #[arg(long, value_enum)]
        table: Option<TableArg>,
    },
    /// Run rectangle -> phase matrix -> set -> evaluation from a JSON config.
    Pipeline { config: PathBuf },
}

#[derive(Debug, Subcommand)]
enum RectCmd {
    /// Multiplicative rectangle over Z_N.
    CircularFlorentine { modulus: usize },
    /// q x (q - 1) field rectangle over Z_q, q = p^n.
    CircularQfr { p: u32, n: u32 },
    /// q x q rectangle over Z_(q+1), q = p^n.
    PlusOne { p: u32, n: u32 },
    /// Drop k columns from one edge.
    Truncate {
        file: PathBuf,
        k: usize,
        #[arg(value_enum, default_value = "right")]
        side: SideArg,
    },
    /// Product of a circular outer and a linear inner rectangle.
    Product { outer: PathBuf, inner: PathBuf },
    /// Report the class flags; fails with a witness if the class is missing.
    Verify {
        file: PathBuf,
        #[arg(long)]
        circular: bool,
    },
    /// Backtracking search for a tall rectangle over Z_N with n columns.
    Search {
        modulus: usize,
        n: usize,
        #[arg(long)]
        circular: bool,
        #[arg(long)]
        node_budget: Option<u64>,
        #[arg(long)]
        row_cap: Option<usize>,
        /// Also write the search certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Instantiate a named product family.
    Family {
        #[arg(value_enum)]
        kind: FamilyArg,
        #[command(flatten)]
        params: FamilyParams,
    },
}

#[derive(Debug, Args)]
struct FamilyParams {
    #[arg(long)]
    modulus: Option<usize>,
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    other_prime: Option<u32>,
    #[arg(long)]
    other_degree: Option<u32>,
    #[arg(long)]
    trim: usize,
}

#[derive(Debug, Subcommand)]
enum BhCmd {
    /// Fourier matrix BH(N, N).
    Dft { order: usize },
    /// Sylvester matrix BH(2^m, 2).
    Walsh { m: u32 },
    /// Kronecker product of phase-matrix files, left to right.
    Kron {
        #[arg(required = true, num_args = 1..)]
        files: Vec<PathBuf>,
    },
    /// Load a seed {N, r, exps}; rejected unless Butson-Hadamard.
    Load { file: PathBuf },
    /// Check the orthogonality of a phase-matrix file.
    Verify { file: PathBuf },
}

#[derive(Debug, Args)]
struct EvalOpts {
    /// Narrow the zone to (-Zx, Zx) x (-Zy, Zy).
    #[arg(long, num_args = 2, value_names = ["ZX", "ZY"])]
    zone: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Debug, Subcommand)]
enum DrcsCmd {
    /// Set from a rectangle and a phase matrix of matching order.
    Build { rect: PathBuf, bh: PathBuf },
    /// theta_max and optimality factor.
    Eval {
        set: PathBuf,
        #[command(flatten)]
        opts: EvalOpts,
        /// Re-check theta_max with the term-by-term reference.
        #[arg(long)]
        paranoid: bool,
    },
    /// One table row: K M L Zx Zy theta_max bound rho.
    Report {
        set: PathBuf,
        #[command(flatten)]
        opts: EvalOpts,
    },
    /// AF grid of one flock pair as CSV or 16-bit PGM.
    Grid {
        set: PathBuf,
        #[arg(long, num_args = 2, value_names = ["K1", "K2"], required = true)]
        pair: Vec<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        out: GridFormat,
        #[command(flatten)]
        opts: EvalOpts,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Fft,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridFormat {
    Csv,
    Pgm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "c1-i")]
    C1i,
    #[value(name = "c1-ii")]
    C1ii,
    #[value(name = "c2-i")]
    C2i,
    #[value(name = "c2-ii")]
    C2ii,
    #[value(name = "c2-iii")]
    C2iii,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableArg {
    SmallAlphabet,
    Multiplicative,
    FieldProduct,
}

impl From<TableArg> for TableId {
    fn from(t: TableArg) -> Self {
        match t {
            TableArg::SmallAlphabet => TableId::SmallAlphabet,
            TableArg::Multiplicative => TableId::Multiplicative,
            TableArg::FieldProduct => TableId::FieldProduct,
        }
    }
}

impl From<MethodArg> for AfMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => AfMethod::Naive,
            MethodArg::Fft => AfMethod::Fft,
        }
    }
}

pub(crate) fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

pub(crate) fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn read_rectangle(path: &Path) -> Result<Rectangle, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn read_phase_matrix(path: &Path) -> Result<PhaseMatrix, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Outcome of a command: bytes for the output sink, plus an optional error
/// raised after the output is written (failed verification).
struct Outcome {
    bytes: Vec<u8>,
    failure: Option<CliError>,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Outcome { bytes, failure: None }
    }

    fn json<T: Serialize>(value: &T) -> Self {
        Outcome::ok(pretty(value))
    }
}

fn rect_cmd(cmd: RectCmd) -> Result<Outcome, CliError> {
    let rect = match cmd {
        RectCmd::CircularFlorentine { modulus } => build_circular_florentine(modulus)?,
        RectCmd::CircularQfr { p, n } => build_circular_quasi_florentine(p, n)?,
        RectCmd::PlusOne { p, n } => build_quasi_florentine_plus_one(p, n)?,
        RectCmd::Truncate { file, k, side } => {
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            truncate_columns(&read_rectangle(&file)?, k, side)?
        }
        RectCmd::Product { outer, inner } => product_construct(&read_rectangle(&outer)?, &read_rectangle(&inner)?)?,
        RectCmd::Verify { file, circular } => return verify_rect(&read_rectangle(&file)?, circular),
        RectCmd::Search { modulus, n, circular, node_budget, row_cap, certificate } => {
            let mut limits = SearchLimits::default();
            if let Some(b) = node_budget {
                limits.node_budget = b;
            }
            if let Some(c) = row_cap {
                limits.row_cap = c;
            }
            let (rect, cert) = search_max_rows(modulus, n, circular, limits)?;
            if let Some(path) = certificate {
                write_output(Some(&path), &pretty(&cert))?;
            }
            rect
        }
        RectCmd::Family { kind, params } => family(kind, &params)?.instantiate()?,
    };
    Ok(Outcome::json(&rect))
}

fn family(kind: FamilyArg, params: &FamilyParams) -> Result<Family, CliError> {
    let tag = match kind {
        FamilyArg::C1i => "c1-i",
        FamilyArg::C1ii => "c1-ii",
        FamilyArg::C2i => "c2-i",
        FamilyArg::C2ii => "c2-ii",
        FamilyArg::C2iii => "c2-iii",
    };
    let mut map = Map::new();
    map.insert("family".into(), json!(tag));
    map.insert("trim".into(), json!(params.trim));
    let optional = [
        ("modulus", params.modulus.map(|v| v as u64)),
        ("prime", params.prime.map(u64::from)),
        ("degree", params.degree.map(u64::from)),
        ("other_prime", params.other_prime.map(u64::from)),
        ("other_degree", params.other_degree.map(u64::from)),
    ];
    for (key, value) in optional {
        if let Some(v) = value {
            map.insert(key.into(), json!(v));
        }
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(format!("{tag}: {e}")))
}

fn verify_rect(rect: &Rectangle, circular: bool) -> Result<Outcome, CliError> {
    let class = classify(rect);
    let witness = if let Some((row, symbol)) = find_c1_violation(rect) {
        Some(json!({ "condition": "row-distinct", "row": row, "symbol": symbol }))
    } else {
        find_c2_violation(rect, circular)?.map(|w| {
            json!({
                "condition": if circular { "circular-spacing" } else { "linear-spacing" },
                "pair": [w.first, w.second],
                "step": w.step,
                "rows": [w.rows.0, w.rows.1],
            })
        })
    };
    let report = json!({
        "N": rect.modulus(),
        "rows": rect.nrows(),
        "cols": rect.ncols(),
        "row_distinct": class.row_distinct,
        "linear_spacing": class.linear_spacing,
        "circular_spacing": class.circular_spacing,
        "required": if circular { "circular" } else { "linear" },
        "witness": witness,
    });
    let failure = witness.map(|w| CliError::Validation(format!("rectangle fails its class check: {w}")));
    Ok(Outcome { bytes: pretty(&report), failure })
}

fn bh_cmd(cmd: BhCmd) -> Result<Outcome, CliError> {
    let matrix = match cmd {
        BhCmd::Dft { order } => {
            if order == 0 {
                return Err(CliError::Infeasible("order must be positive".into()));
            }
            dft_matrix(order)
        }
        BhCmd::Walsh { m } => {
            if m > 12 {
                return Err(CliError::Infeasible(format!("2^{m} exceeds the supported order")));
            }
            walsh_hadamard(m)
        }
        BhCmd::Kron { files } => {
            let mut acc: Option<PhaseMatrix> = None;
            for f in &files {
                let next = read_phase_matrix(f)?;
                if !verify_bh(&next) {
                    return Err(CliError::Validation(format!("{} is not Butson-Hadamard", f.display())));
                }
                acc = Some(match acc {
                    None => next,
                    Some(a) => kronecker(&a, &next),
                });
            }
            acc.expect("at least one file")
        }
        BhCmd::Load { file } => load_seed(&file)?,
        BhCmd::Verify { file } => {
            let m = read_phase_matrix(&file)?;
            let ok = verify_bh(&m);
            let report = json!({ "N": m.order(), "r": m.r(), "butson_hadamard": ok, "exact": verify_bh_exact(&m) });
            let failure = (!ok).then(|| CliError::Validation(format!("BH({}, {}) check failed", m.order(), m.r())));
            return Ok(Outcome { bytes: pretty(&report), failure });
        }
    };
    Ok(Outcome::json(&matrix))
}

fn load_set(path: &Path, opts: &EvalOpts) -> Result<(DrcsSet, AfMethod), CliError> {
    let mut set = import_drcs(path)?;
    if let Some(z) = &opts.zone {
        set = set.with_zone(z[0], z[1])?;
    }
    let method = opts.method.map_or(AfMethod::default_for(set.len()), AfMethod::from);
    Ok((set, method))
}

/// Reference check: both maxima within `1e-7 * M * L` of the fast values.
fn paranoid_check(set: &DrcsSet, theta: &ThetaReport) -> Result<Value, CliError> {
    let (auto, cross) = naive_theta_max(set);
    let tol = 1e-7 * (set.flock_size() * set.len()) as f64;
    let close = |fast: Option<f64>, slow: Option<f64>| match (fast, slow) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - b).abs() <= tol,
        _ => false,
    };
    let slow_a = auto.map(|w| w.magnitude);
    let slow_c = cross.map(|w| w.magnitude);
    let agrees = close(theta.theta_a, slow_a) && close(theta.theta_c, slow_c);
    if !agrees {
        return Err(CliError::Validation(format!(
            "reference disagrees: fast ({:?}, {:?}), reference ({slow_a:?}, {slow_c:?})",
            theta.theta_a, theta.theta_c
        )));
    }
    Ok(json!({ "theta_a": slow_a, "theta_c": slow_c, "tolerance": tol, "agrees": agrees }))
}

fn drcs_cmd(cmd: DrcsCmd) -> Result<Outcome, CliError> {
    match cmd {
        DrcsCmd::Build { rect, bh } => {
            let set = build_drcs(&read_rectangle(&rect)?, &read_phase_matrix(&bh)?)?;
            let mut bytes = set.to_json().into_bytes();
            bytes.push(b'\n');
            Ok(Outcome::ok(bytes))
        }
        DrcsCmd::Eval { set, opts, paranoid } => {
            let (set, method) = load_set(&set, &opts)?;
            let theta = theta_max_with(&set, method);
            let (bound, bound_error) = match optimality_factor(&set, &theta) {
                Ok(b) => (Some(b), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let reference = if paranoid { Some(paranoid_check(&set, &theta)?) } else { None };
            Ok(Outcome::json(&json!({
                "theta": theta,
                "bound": bound,
                "bound_error": bound_error,
                "reference": reference,
            })))
        }
        DrcsCmd::Report { set, opts } => {
            let (set, method) = load_set(&set, &opts)?;
            let theta = theta_max_with(&set, method);
            let report = optimality_factor(&set, &theta)?;
            let text = format!("{}\n{}\n", BoundReport::table_header(), report.table_row());
            Ok(Outcome::ok(text.into_bytes()))
        }
        DrcsCmd::Grid { set, pair, out, opts } => {
            let (set, method) = load_set(&set, &opts)?;
            let (k1, k2) = (pair[0], pair[1]);
            if k1 >= set.set_size() || k2 >= set.set_size() {
                return Err(CliError::Validation(format!(
                    "pair ({k1}, {k2}) out of range for {} flocks",
                    set.set_size()
                )));
            }
            let grid = pair_grid(&set, k1, k2, method)?;
            Ok(Outcome::ok(match out {
                GridFormat::Csv => grid.to_csv().into_bytes(),
                GridFormat::Pgm => grid.to_pgm(),
            }))
        }
    }
}

fn bound_cmd(k: usize, m: usize, l: usize, zy: usize, zx: Option<usize>) -> Result<Outcome, CliError> {
    let lb = lemma1_bound(k, m, l, zy, zx)?;
    let report = json!({ "K": k, "M": m, "L": l, "Zy": zy, "Zx": zx, "bound": lb, "feasible": lb.feasible() });
    let failure = (!lb.feasible()).then(|| {
        CliError::Infeasible(format!(
            "K > 3M/Zy is {}, Zx window is {}",
            lb.k_condition,
            lb.zx_condition.unwrap_or(true)
        ))
    });
    Ok(Outcome { bytes: pretty(&report), failure })
}

fn tables_cmd(table: Option<TableArg>) -> Outcome {
    let ids: Vec<TableId> = match table {
        Some(t) => vec![t.into()],
        None => TableId::ALL.to_vec(),
    };
    let mut text = String::new();
    let mut mismatches = 0;
    for id in ids {
        text.push_str(&format!("# {}\n", id.name()));
        text.push_str(&format!(
            "{:>6} {:>6} {:>7} {:>8} {:>10} {:>7} {:>8} {:>10}  {}\n",
            "K", "N", "L", "rho", "recomputed", "K_prev", "rho_prev", "recomputed", "family"
        ));
        for row in id.rows() {
            let c = recompute_table_row(row);
            if !(c.rho_matches && c.prev_rho_matches) {
                mismatches += 1;
            }
            text.push_str(&format!(
                "{:>6} {:>6} {:>7} {:>8.4} {:>10.4} {:>7} {:>8.4} {:>10.4}  {}\n",
                row.set_size,
                row.flock_size,
                row.seq_len,
                row.rho,
                c.rho,
                row.prev_set_size,
                row.prev_rho,
                c.prev_rho,
                serde_json::to_string(&row.family).expect("serializable"),
            ));
        }
    }
    let failure = (mismatches > 0).then(|| CliError::Validation(format!("{mismatches} rows differ from print")));
    Outcome { bytes: text.into_bytes(), failure }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DRCS_FORGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("DRCS_FORGE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let outcome = match cli.command {
        Command::Rect(c) => rect_cmd(c)?,
        Command::Bh(c) => bh_cmd(c)?,
        Command::Drcs(c) => drcs_cmd(c)?,
        Command::Bound { k, m, l, zy, zx } => bound_cmd(k, m, l, zy, zx)?,
        Command::Tables { table } => tables_cmd(table),
        Command::Pipeline { config } => Outcome::json(&pipeline::run(&config)?),
    };
    write_output(cli.output.as_deref(), &outcome.bytes)?;
    outcome.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
