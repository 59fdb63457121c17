//! The `hg-entangle` command line.
//!
//! Every command is a single deterministic computation. CSV output uses
//! 12-significant-digit scientific notation with `,` separators and LF line
//! endings; JSON output rounds every float to 12 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::hom_teleport::{hom_truth_table, teleport, Axis, PolarizationSymmetry};
use crate::photon_states::{
    build_hg_entangled_state, convert_state, flat_lg_coefficients, lg_spdc_state, schmidt_entropy,
    Basis, TwoPhotonState,
};
use crate::spdc_overlap::{
    coefficient_table, conservation_report, mode_match_probability, ConservationLaw,
    DEFAULT_Q_TAIL, DEFAULT_TABLE_ORDER,
};
use crate::special_math::QuadratureSpec;
use crate::transverse_modes::{
    hg_field, hg_field_waist, lg_field_waist, BeamGeometry, LGIndex, ModeIndex, WaistRatio,
};

/// Parity-violation bound checked after every `coeffs` run.
pub const PARITY_SELF_CHECK: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "hg-entangle",
    version,
    about = "Hermite-Gaussian mode structure of thin-crystal SPDC photon pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode-match probability Q_m against the waist ratio a (CSV).
    Qcurve(QcurveArgs),
    /// Thin-crystal coefficient table with conservation reports.
    Coeffs(CoeffsArgs),
    /// Build, convert and analyse two-photon states (JSON).
    State(StateArgs),
    /// Balanced beam-splitter coincidence truth table (JSON).
    Hom(HomArgs),
    /// Parity-encoded teleportation of alpha|0> + beta|1> (JSON).
    Teleport(TeleportArgs),
    /// Evaluate an HG or LG field on a square grid (CSV).
    ModesEval(ModesEvalArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QcurveArgs {
    /// Indices m, comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "0,1,2")]
    pub m_list: Vec<u32>,
    /// Explicit grid of a values, comma separated (overrides the linear grid).
    #[arg(long = "a", value_delimiter = ',')]
    pub a_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.01)]
    pub a_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Largest partner index in the normalizing sum.
    #[arg(long, default_value_t = DEFAULT_Q_TAIL)]
    pub n_max: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Pump mode indices m n.
    #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [0, 0])]
    pub pump: Vec<u32>,
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = DEFAULT_TABLE_ORDER)]
    pub max_order: u32,
    /// Rescale the table to unit total squared amplitude.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value_t = 64)]
    pub rule_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Conservation-report sidecar for CSV output (default: <out>.reports.json,
    /// or standard error when writing to standard output).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(subcommand)]
    pub action: StateAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Hg,
    Lg,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Hg => Basis::Hg,
            BasisArg::Lg => Basis::Lg,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum StateAction {
    /// Diagonal HG-entangled state with C_m^n ∝ P_m^m P_n^n.
    BuildHg {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[command(flatten)]
        output: Output,
    },
    /// OAM-anticorrelated LG state from per-l coefficients (flat by default).
    LgInput {
        #[arg(long)]
        l_max: u32,
        /// Coefficient `L:RE[:IM]`, repeatable.
        #[arg(long = "coeff", allow_hyphen_values = true)]
        coeffs: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Re-express a state file in the other basis.
    Convert {
        /// State file, or `-` for standard input.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: BasisArg,
        #[command(flatten)]
        output: Output,
    },
    /// Schmidt entropy (bits) of a state file.
    Entropy {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        }
    }
}

#[derive(Debug, Args)]
pub struct HomArgs {
    #[arg(long, value_enum, default_value_t = AxisArg::Y)]
    pub mirror_axis: AxisArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarizationArg {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub alpha_im: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub beta_im: f64,
    #[arg(long, value_enum, default_value_t = PolarizationArg::Symmetric)]
    pub polarization: PolarizationArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Hg,
    Lg,
}

#[derive(Debug, Args)]
pub struct ModesEvalArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// `M N` for HG, `P L` for LG.
    #[arg(long, num_args = 2, value_names = ["I", "J"], allow_hyphen_values = true)]
    pub index: Vec<i64>,
    #[arg(long, default_value_t = 1.0)]
    pub waist: f64,
    /// Propagation distance (HG only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long, default_value_t = 1.0)]
    pub wavenumber: f64,
    /// Grid half-width.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}

/// `x` in 12-significant-digit scientific notation.
pub fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let rounded: f64 = fmt12(x).parse().expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *value = json!(round12(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_state(path: &Path) -> Result<TwoPhotonState> {
    let text = read_input(path)?;
    TwoPhotonState::from_json(&text)
        .with_context(|| format!("parsing state file {}", path.display()))
}

fn state_json(state: &TwoPhotonState) -> Result<String> {
    to_json(&state.to_file())
}

fn waist_ratio(a: f64) -> Result<WaistRatio> {
    WaistRatio::new(a).with_context(|| format!("invalid --a {a}"))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Qcurve(args) => run_qcurve(&args),
        Command::Coeffs(args) => run_coeffs(&args),
        Command::State(args) => run_state(args.action),
        Command::Hom(args) => {
            let table = hom_truth_table(args.mirror_axis.into());
            let doc = json!({ "mirror_axis": Axis::from(args.mirror_axis), "table": table });
            emit(&args.output, &to_json(&doc)?)
        }
        Command::Teleport(args) => run_teleport(&args),
        Command::ModesEval(args) => run_modes_eval(&args),
    }
}

/// The qcurve grid: the explicit list when given, otherwise `points` evenly
/// spaced values from `a_min` to `a_max`.
pub fn qcurve_grid(args: &QcurveArgs) -> Result<Vec<f64>> {
    let grid = match &args.a_grid {
        Some(list) => list.clone(),
        None => {
            ensure!(args.points >= 1, "--points must be at least 1");
            if args.points == 1 {
                vec![args.a_min]
            } else {
                let step = (args.a_max - args.a_min) / (args.points - 1) as f64;
                (0..args.points)
                    .map(|k| args.a_min + step * k as f64)
                    .collect()
            }
        }
    };
    ensure!(!grid.is_empty(), "the a grid is empty");
    for &a in &grid {
        ensure!(
            a > 0.0 && a.is_finite(),
            "grid value a={a} must be positive and finite"
        );
    }
    Ok(grid)
}

pub fn qcurve_csv(m_list: &[u32], grid: &[f64], n_max: u32) -> Result<String> {
    ensure!(!m_list.is_empty(), "--m needs at least one index");
    let mut out = String::from("a");
    for m in m_list {
        out.push_str(&format!(",Q{m}"));
    }
    out.push('\n');
    for &a in grid {
        let ratio = waist_ratio(a)?;
        out.push_str(&fmt12(a));
        for &m in m_list {
            let q = mode_match_probability(m, ratio, n_max)
                .with_context(|| format!("cell a={a}, m={m}"))?;
            out.push(',');
            out.push_str(&fmt12(q));
        }
        out.push('\n');
    }
    Ok(out)
}

fn run_qcurve(args: &QcurveArgs) -> Result<()> {
    let grid = qcurve_grid(args)?;
    let csv = qcurve_csv(&args.m_list, &grid, args.n_max)?;
    emit(&args.output, &csv)
}

fn run_coeffs(args: &CoeffsArgs) -> Result<()> {
    let pump = ModeIndex::new(args.pump[0], args.pump[1]);
    let spec = QuadratureSpec::new(args.rule_order, QuadratureSpec::default().abs_tolerance)?;
    let table = coefficient_table(
        pump,
        waist_ratio(args.a)?,
        args.max_order,
        &spec,
        args.normalize,
    )
    .with_context(|| format!("filling coefficient table for pump {pump}"))?;
    let reports = [
        conservation_report(&table, ConservationLaw::QuasiConservation),
        conservation_report(&table, ConservationLaw::Parity),
    ];

    match args.format {
        Format::Csv => {
            let mut csv = String::from("m_s,n_s,m_i,n_i,re,im,abs\n");
            for (&(s, i), c) in &table.entries {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.m,
                    s.n,
                    i.m,
                    i.n,
                    fmt12(c.re),
                    fmt12(c.im),
                    fmt12(c.norm())
                ));
            }
            emit(&args.output, &csv)?;
            let report_json = to_json(&reports)?;
            let sidecar = args.report.clone().or_else(|| {
                args.output.out.as_ref().map(|p| {
                    let mut name = p.as_os_str().to_owned();
                    name.push(".reports.json");
                    PathBuf::from(name)
                })
            });
            match sidecar {
                Some(path) => fs::write(&path, report_json)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => eprint!("{report_json}"),
            }
        }
        Format::Json => {
            let entries: Vec<Value> = table
                .entries
                .iter()
                .map(|(&(s, i), c)| {
                    json!({ "s": [s.m, s.n], "i": [i.m, i.n], "re": c.re, "im": c.im, "abs": c.norm() })
                })
                .collect();
            let doc = json!({
                "pump": [pump.m, pump.n],
                "a": args.a,
                "max_order": args.max_order,
                "normalized": table.normalized,
                "entries": entries,
                "reports": reports,
            });
            emit(&args.output, &to_json(&doc)?)?;
        }
    }

    let parity = &reports[1];
    if parity.worst_violation >= PARITY_SELF_CHECK {
        bail!(
            "self-check failed: parity-violating coefficient of magnitude {:e}",
            parity.worst_violation
        );
    }
    Ok(())
}

/// Parses `L:RE[:IM]`.
pub fn parse_lg_coefficient(text: &str) -> Result<(i32, Complex64)> {
    let parts: Vec<&str> = text.split(':').collect();
    ensure!(
        parts.len() == 2 || parts.len() == 3,
        "coefficient {text:?} must look like L:RE or L:RE:IM"
    );
    let l: i32 = parts[0]
        .trim()
        .parse()
        .with_context(|| format!("bad l in {text:?}"))?;
    let re: f64 = parts[1]
        .trim()
        .parse()
        .with_context(|| format!("bad real part in {text:?}"))?;
    let im: f64 = match parts.get(2) {
        Some(p) => p
            .trim()
            .parse()
            .with_context(|| format!("bad imaginary part in {text:?}"))?,
        None => 0.0,
    };
    Ok((l, Complex64::new(re, im)))
}

fn run_state(action: StateAction) -> Result<()> {
    match action {
        StateAction::BuildHg {
            a,
            max_order,
            output,
        } => {
            let state = build_hg_entangled_state(waist_ratio(a)?, max_order)?;
            emit(&output, &state_json(&state)?)
        }
        StateAction::LgInput {
            l_max,
            coeffs,
            output,
        } => {
            let coefficients: BTreeMap<i32, Complex64> = if coeffs.is_empty() {
                flat_lg_coefficients(l_max)
            } else {
                let mut map = BTreeMap::new();
                for text in &coeffs {
                    let (l, c) = parse_lg_coefficient(text)?;
                    ensure!(
                        map.insert(l, c).is_none(),
                        "coefficient for l={l} given twice"
                    );
                }
                map
            };
            let state = lg_spdc_state(&coefficients, l_max)?;
            emit(&output, &state_json(&state)?)
        }
        StateAction::Convert { input, to, output } => {
            let state = load_state(&input)?;
            let converted = convert_state(&state, to.into())?;
            emit(&output, &state_json(&converted)?)
        }
        StateAction::Entropy { input, output } => {
            let state = load_state(&input)?;
            let norm_sqr = state.norm_sqr();
            ensure!(
                (norm_sqr - 1.0).abs() <= 1e-10,
                "state must be normalized (squared norm {norm_sqr})"
            );
            let doc = json!({ "schmidt_entropy_bits": schmidt_entropy(&state) });
            emit(&output, &to_json(&doc)?)
        }
    }
}

fn run_teleport(args: &TeleportArgs) -> Result<()> {
    let alpha = Complex64::new(args.alpha, args.alpha_im);
    let beta = Complex64::new(args.beta, args.beta_im);
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    ensure!(
        (norm_sqr - 1.0).abs() <= 1e-9,
        "input qubit must be normalized: |alpha|^2 + |beta|^2 = {norm_sqr}"
    );
    // Absorb rounding in user-typed decimals.
    let scale = norm_sqr.sqrt();
    let polarization = match args.polarization {
        PolarizationArg::Symmetric => PolarizationSymmetry::Symmetric,
        PolarizationArg::Antisymmetric => PolarizationSymmetry::Antisymmetric,
    };
    let result = teleport(alpha / scale, beta / scale, polarization)?;
    emit(&args.output, &to_json(&result)?)
}

fn run_modes_eval(args: &ModesEvalArgs) -> Result<()> {
    ensure!(args.points >= 2, "--points must be at least 2");
    ensure!(args.extent > 0.0, "--extent must be positive");
    let (i, j) = (args.index[0], args.index[1]);
    let field: Box<dyn Fn(f64, f64) -> Complex64> = match args.family {
        Family::Hg => {
            let mode = ModeIndex::new(
                u32::try_from(i).context("HG index m must be nonnegative")?,
                u32::try_from(j).context("HG index n must be nonnegative")?,
            );
            if args.z == 0.0 {
                let w = args.waist;
                Box::new(move |x, y| hg_field_waist(mode, w, x, y))
            } else {
                let geom = BeamGeometry::new(args.waist, args.wavenumber)?;
                let z = args.z;
                Box::new(move |x, y| hg_field(mode, &geom, x, y, z))
            }
        }
        Family::Lg => {
            ensure!(args.z == 0.0, "LG fields are evaluated at the waist only");
            let index = LGIndex::new(
                u32::try_from(i).context("LG index p must be nonnegative")?,
                i32::try_from(j).context("LG index l out of range")?,
            );
            let w = args.waist;
            Box::new(move |x, y| lg_field_waist(index, w, x, y))
        }
    };
    let step = 2.0 * args.extent / (args.points - 1) as f64;
    let mut csv = String::from("x,y,re,im,abs\n");
    for a in 0..args.points {
        let x = -args.extent + step * a as f64;
        for b in 0..args.points {
            let y = -args.extent + step * b as f64;
            let v = field(x, y);
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt12(x),
                fmt12(y),
                fmt12(v.re),
                fmt12(v.im),
                fmt12(v.norm())
            ));
        }
    }
    emit(&args.output, &csv)
}
