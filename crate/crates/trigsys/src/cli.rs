//! File-based command-line front end. One subcommand per pipeline stage;
//! every output is deterministic for a fixed argument list (seeds included),
//! and every JSON document parses back into the type that emitted it.
//!
//! Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or
//! input error.

use crate::crt::{self, CoprimeModuli};
use crate::dts::{self, DiscreteTrigSystem};
use crate::error::Error;
use crate::lab::{self, Grid, PlanBlockSystem, Trig1D};
use crate::mp;
use crate::poly::PolyDocument;
use crate::reduction::{
    build_reduction, verify_weight_transfer, PlanDocument, PlanTermsView, ReductionInput,
};
use crate::weights::{WeightRule, WeightSequence};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "trigsys",
    about = "discrete trigonometric systems, coprime cell maps, and reduction plans",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump a discrete trigonometric system: cell values, optional Fourier
    /// coefficient tables and spectra.
    Dts(DtsArgs),
    /// Emit the coprime cell bijection as JSON.
    CrtMap(CrtMapArgs),
    /// Exhaustively verify the index-map correspondence and the exact
    /// probabilistic equivalence for one moduli tuple.
    VerifyEquiv(VerifyEquivArgs),
    /// Build a reduction plan over a prefix of the input sequence.
    Reduce(ReduceArgs),
    /// Map coefficients through a plan and check the weight transfer
    /// inequality.
    Coeffs(CoeffsArgs),
    /// Dyadic block maxima of partial sums on a grid, as CSV.
    Maxima(MaximaArgs),
    /// Admissibility diagnostics for a weight sequence.
    WeightCheck(WeightCheckArgs),
}

#[derive(Args, Debug)]
struct DtsArgs {
    /// One-dimensional order l.
    #[arg(long, conflicts_with = "moduli")]
    order: Option<u64>,
    /// Axis orders of a multiple system, comma separated.
    #[arg(long, value_delimiter = ',')]
    moduli: Option<Vec<u64>>,
    /// Emit the coefficient table c_m for |m| ≤ mmax (one-dimensional only).
    #[arg(long)]
    coeffs: bool,
    #[arg(long, default_value_t = 8)]
    mmax: u64,
    /// Emit spectra windows with this half width.
    #[arg(long)]
    spectrum: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrtMapArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<u64>,
    /// Output path for the cell bijection.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyEquivArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// JSON array of frequency vectors (rc) or of polynomial documents (src).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Prefix length N.
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "rc")]
    mode: ModeArg,
    /// Dimension of generated indices when no input file is given.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Coordinate bound of generated indices.
    #[arg(long, default_value_t = 16)]
    max_abs: i64,
    /// Seed for generated indices.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Serialization limit on terms per member.
    #[arg(long, default_value_t = 1 << 20)]
    max_terms: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Rc,
    Src,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long)]
    plan: PathBuf,
    /// JSON array of real coefficients a_n.
    #[arg(long)]
    a: PathBuf,
    /// Weight spec: log, log2, pow:α, table:file.
    #[arg(long)]
    w: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MaximaArgs {
    /// Plan whose slot polynomials form the system; without it the
    /// one-dimensional exponentials are used.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// JSON array of real coefficients a_n.
    #[arg(long)]
    coeffs: PathBuf,
    #[arg(long)]
    kmax: u32,
    #[arg(long)]
    grid: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG decay chart.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WeightCheckArgs {
    /// Weight spec: log, log2, pow:α, table:file.
    #[arg(long)]
    w: String,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    Fail(String),
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| {
            Error::InvalidParameter(format!("cannot write {}: {e}", p.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

// --- dts ---

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DtsDocument {
    pub axis_orders: Vec<u64>,
    pub functions: Vec<DtsFunctionDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<CoeffRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<Vec<SpectrumRow>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DtsFunctionDocument {
    pub n_vec: Vec<u64>,
    pub values: Vec<mp::ValueDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoeffRow {
    pub n: u64,
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumRow {
    pub n: u64,
    pub freqs: Vec<i64>,
}

fn cmd_dts(args: &DtsArgs) -> Result<Outcome, Error> {
    let orders = match (&args.order, &args.moduli) {
        (Some(l), None) => vec![*l],
        (None, Some(m)) => m.clone(),
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --order or --moduli".into(),
            ))
        }
    };
    let sys = DiscreteTrigSystem::new(orders.clone())?;
    let partition = sys.partition();
    let mut functions = Vec::new();
    for idx in 0..partition.total_cells() {
        let n_vec = partition.multi_of(idx)?;
        let f = sys.step_function(&n_vec)?;
        functions.push(DtsFunctionDocument {
            n_vec,
            values: f
                .values()
                .iter()
                .map(|v| mp::ValueDocument::Unit {
                    num: v.phase().num(),
                    modulus: v.phase().den(),
                })
                .collect(),
        });
    }
    let coeffs = if args.coeffs {
        if orders.len() != 1 {
            return Err(Error::InvalidParameter(
                "coefficient tables are one-dimensional".into(),
            ));
        }
        let l = orders[0];
        let mut rows = Vec::new();
        for n in 0..l {
            for m in -(args.mmax as i64)..=(args.mmax as i64) {
                let c = dts::fourier_coeff(l, n, m as i128)?;
                rows.push(CoeffRow {
                    n,
                    m,
                    re: c.re,
                    im: c.im,
                });
            }
        }
        Some(rows)
    } else {
        None
    };
    let spectra = match args.spectrum {
        Some(half) if orders.len() == 1 => {
            let l = orders[0];
            let mut rows = Vec::new();
            for n in 0..l {
                let s = dts::spectrum(l, n, half)?;
                rows.push(SpectrumRow {
                    n,
                    freqs: s
                        .iter()
                        .map(|f| i64::try_from(f[0]).expect("small spectrum window"))
                        .collect(),
                });
            }
            Some(rows)
        }
        Some(_) => {
            return Err(Error::InvalidParameter(
                "spectrum listings are one-dimensional".into(),
            ))
        }
        None => None,
    };
    let doc = DtsDocument {
        axis_orders: orders,
        functions,
        coeffs,
        spectra,
    };
    write_output(args.out.as_deref(), &to_pretty_json(&doc)?)?;
    Ok(Outcome::Pass)
}

// --- crt-map ---

/// The cell bijection as a bare JSON list `[{from:[u1,..,ud], to:u}]`.
pub type CellMapDocument = Vec<CellMapRow>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellMapRow {
    pub from: Vec<u64>,
    pub to: u64,
}

fn cmd_crt_map(args: &CrtMapArgs) -> Result<Outcome, Error> {
    let moduli = CoprimeModuli::new(args.moduli.clone())?;
    let theta = crt::build_theta(&moduli)?;
    let source = theta.source().clone();
    let cells: CellMapDocument = (0..source.total_cells())
        .map(|cell| {
            Ok(CellMapRow {
                from: source.multi_of(cell)?,
                to: theta.image_of_cell(cell),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_output(args.emit.as_deref(), &to_pretty_json(&cells)?)?;
    Ok(Outcome::Pass)
}

// --- verify-equiv ---

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyEquivDocument {
    pub moduli: Vec<u64>,
    pub product: u64,
    pub bijective: bool,
    pub cells_checked: u64,
    pub congruences_checked: u64,
    pub prob_equiv: bool,
    pub pass: bool,
}

fn cmd_verify_equiv(args: &VerifyEquivArgs) -> Result<Outcome, Error> {
    let moduli = CoprimeModuli::new(args.moduli.clone())?;
    let p = moduli.product() as u64;
    let bijective = crt::verify_bijectivity(&moduli)?;
    let box_part = mp::CellPartition::new(args.moduli.clone())?;
    let mut congruences = 0u64;
    for cell in 0..p {
        let n_vec = box_part.multi_of(cell)?;
        crt::dts_correspondence(&moduli, &n_vec)?;
        congruences += p;
    }
    // exact equivalence of the full systems, reindexed through the index map
    let multi = DiscreteTrigSystem::new(args.moduli.clone())?;
    let one = DiscreteTrigSystem::one_dimensional(p)?;
    let fs = multi.all_step_functions()?;
    let mut gs = Vec::with_capacity(p as usize);
    for cell in 0..p {
        let n_vec = box_part.multi_of(cell)?;
        let n = crt::tau(&moduli, &n_vec)? as u64;
        gs.push(one.step_function(&[n])?);
    }
    let fs_ref: Vec<&mp::StepFunction<_>> = fs.iter().collect();
    let gs_ref: Vec<&mp::StepFunction<_>> = gs.iter().collect();
    let prob_equiv = mp::verify_prob_equiv(&fs_ref, &gs_ref)?;
    let pass = bijective && prob_equiv;
    let doc = VerifyEquivDocument {
        moduli: args.moduli.clone(),
        product: p,
        bijective,
        cells_checked: p,
        congruences_checked: congruences,
        prob_equiv,
        pass,
    };
    write_output(args.out.as_deref(), &to_pretty_json(&doc)?)?;
    if pass {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(format!(
            "equivalence verification failed for moduli {:?}",
            args.moduli
        )))
    }
}

// --- reduce ---

fn cmd_reduce(args: &ReduceArgs) -> Result<Outcome, Error> {
    let (input, seed) = match (&args.input, args.mode) {
        (Some(path), ModeArg::Rc) => {
            let indices: Vec<Vec<i64>> = read_json(path)?;
            let dim = indices.first().map(|v| v.len()).unwrap_or(args.dim);
            (ReductionInput::from_indices(dim, indices)?, None)
        }
        (Some(path), ModeArg::Src) => {
            let docs: Vec<PolyDocument> = read_json(path)?;
            let polys = docs
                .iter()
                .map(|d| d.to_poly())
                .collect::<Result<Vec<_>, Error>>()?;
            (ReductionInput::from_polynomials(polys)?, None)
        }
        (None, ModeArg::Rc) => {
            let indices =
                crate::reduction::random_indices(args.dim, args.n, args.max_abs, args.seed)?;
            (ReductionInput::from_indices(args.dim, indices)?, Some(args.seed))
        }
        (None, ModeArg::Src) => {
            return Err(Error::InvalidParameter(
                "polynomial mode needs --input".into(),
            ))
        }
    };
    let plan = build_reduction(&input, args.n)?;
    let report = plan.validate()?;
    let mut doc = PlanDocument::from_plan(&plan, args.max_terms)?;
    doc.seed = seed;
    write_output(args.out.as_deref(), &to_pretty_json(&doc)?)?;
    if report.all_ok() {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(format!(
            "plan structure violated: {report:?}"
        )))
    }
}

// --- coeffs ---

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TransferDocument {
    pub weight: WeightRule,
    pub count: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub c_star: f64,
    pub holds: bool,
    pub tolerance: f64,
}

fn cmd_coeffs(args: &CoeffsArgs) -> Result<Outcome, Error> {
    let plan: PlanDocument = read_json(&args.plan)?;
    let a: Vec<f64> = read_json(&args.a)?;
    let w = WeightSequence::parse_spec(&args.w)?;
    let report = verify_weight_transfer(&plan, &a, &w)?;
    let doc = TransferDocument {
        weight: w.rule().clone(),
        count: report.count,
        lhs: report.lhs,
        rhs: report.rhs,
        c_star: report.c_star,
        holds: report.holds,
        tolerance: 1e-12,
    };
    write_output(args.out.as_deref(), &to_pretty_json(&doc)?)?;
    if report.holds {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(format!(
            "weight transfer inequality failed: lhs {} > C*·rhs {}",
            report.lhs,
            report.c_star * report.rhs
        )))
    }
}

// --- maxima ---

fn cmd_maxima(args: &MaximaArgs) -> Result<Outcome, Error> {
    let a: Vec<f64> = read_json(&args.coeffs)?;
    let grid = Grid::uniform(1, args.grid)?;
    let report = match &args.plan {
        Some(path) => {
            let doc: PlanDocument = read_json(path)?;
            let needed = (1u64 << (args.kmax + 1)) - 1;
            if doc.count < needed {
                return Err(Error::LengthMismatch {
                    expected: needed as usize,
                    got: doc.count as usize,
                });
            }
            let polys = (1..=needed)
                .map(|n| {
                    let mut poly = crate::poly::TrigPolynomial::new(1);
                    for term in doc.member_terms(n) {
                        poly.add_term(vec![term.freq], term.coeff)?;
                    }
                    Ok(poly)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let sys = PlanBlockSystem::from_polys(polys);
            lab::block_maxima(&sys, &a, args.kmax, &grid)?
        }
        None => lab::block_maxima(&Trig1D, &a, args.kmax, &grid)?,
    };
    write_output(args.out.as_deref(), &report.to_csv())?;
    if let Some(plot) = &args.plot {
        write_output(Some(plot), &render_decay_svg(&report))?;
    }
    Ok(Outcome::Pass)
}

/// Minimal static chart: sup and mean of M_k against k.
pub fn render_decay_svg(report: &lab::BlockMaximaReport) -> String {
    let w = 480.0;
    let h = 320.0;
    let margin = 40.0;
    let blocks = &report.per_block;
    let max_val = blocks
        .iter()
        .map(|b| b.sup)
        .fold(f64::MIN, f64::max)
        .max(1e-12);
    let n = blocks.len().max(2) as f64;
    let x = |k: usize| margin + (w - 2.0 * margin) * k as f64 / (n - 1.0);
    let y = |v: f64| h - margin - (h - 2.0 * margin) * (v / max_val);
    let line = |vals: Vec<(usize, f64)>, color: &str| {
        let pts: Vec<String> = vals
            .iter()
            .map(|&(k, v)| format!("{:.2},{:.2}", x(k), y(v)))
            .collect();
        format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        )
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    svg.push_str(&format!(
        "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        m = margin,
        y0 = h - margin,
        x1 = w - margin
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        m = margin,
        y0 = h - margin
    ));
    svg.push_str(&line(
        blocks.iter().enumerate().map(|(i, b)| (i, b.sup)).collect(),
        "#c0392b",
    ));
    svg.push_str(&line(
        blocks.iter().enumerate().map(|(i, b)| (i, b.mean)).collect(),
        "#2980b9",
    ));
    for (i, b) in blocks.iter().enumerate() {
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            x(i),
            h - margin + 14.0,
            b.k
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">sup (red), mean (blue) of block maxima</text>\n",
        margin,
        margin - 10.0
    ));
    svg.push_str("</svg>\n");
    svg
}

// --- weight-check ---

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightCheckDocument {
    pub weight: WeightRule,
    #[serde(flatten)]
    pub report: lab::WeightCheckReport,
}

fn cmd_weight_check(args: &WeightCheckArgs) -> Result<Outcome, Error> {
    let w = WeightSequence::parse_spec(&args.w)?;
    let report = lab::weight_check(&w, args.n)?;
    let monotone = report.monotone_violations == 0;
    let doc = WeightCheckDocument {
        weight: w.rule().clone(),
        report,
    };
    write_output(args.out.as_deref(), &to_pretty_json(&doc)?)?;
    if monotone {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail("weight sequence is not monotone".into()))
    }
}

/// Parses and runs a full argument list; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with zero exit
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Dts(a) => cmd_dts(a),
        Command::CrtMap(a) => cmd_crt_map(a),
        Command::VerifyEquiv(a) => cmd_verify_equiv(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Maxima(a) => cmd_maxima(a),
        Command::WeightCheck(a) => cmd_weight_check(a),
    };
    match outcome {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("FAIL: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
