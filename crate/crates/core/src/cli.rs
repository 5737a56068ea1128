//! Command-line front end. A run produces one report: CSV sections or a JSON
//! document whose body depends only on the inputs, the flags and the seed.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check
//! fails, 2 for unusable input.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::channel::{
    finite_blocklength_check, holevo_quantity, ChannelCurve, ChannelCurveRow, ChannelJson, InputDistribution,
};
use crate::error::{Error, Result};
use crate::exponent::{chernoff_bound, fmt_f64, legendre_residuals, stein_exponent, ExponentCurve, LogBase};
use crate::finite_n::{
    hoeffding_achievability, optimal_beta_at, power_difference_suite, split_trace_suite, stein_convergence,
    verify_exponential_bounds, GapSuite,
};
use crate::operator::{check_tensor_dim, DEFAULT_MAX_DIM};
use crate::state::{HypothesisPair, PairJson};

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;

/// Residual allowed in the critical-point relations.
pub const LEGENDRE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "qht",
    version,
    about = "Error exponents for quantum hypothesis testing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Report exponents and rates in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,

    /// Absolute slack for the bound checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative entropy, Chernoff bound, Hoeffding and comparison curves.
    Exponents(ExponentsArgs),
    /// Tensor-power bound checks, optimal trade-off and Stein convergence.
    FiniteN(FiniteNArgs),
    /// Random-coding exponent of a classical-quantum channel.
    Channel(ChannelArgs),
    /// Randomized suites for the two trace inequalities.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub pair: PathBuf,
    /// Rate grid `lo:hi:steps` in nats.
    #[arg(long, default_value = "0.01:0.5:50", allow_hyphen_values = true)]
    pub r_grid: Grid,
}

#[derive(Debug, Args)]
pub struct FiniteNArgs {
    #[arg(long)]
    pub pair: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Threshold grid for the bound checks.
    #[arg(long, default_value = "-0.2:0.2:3", allow_hyphen_values = true)]
    pub a_grid: Grid,
    /// Rates for the Hoeffding achievability tests.
    #[arg(long, default_value = "0.01:0.05:5", allow_hyphen_values = true)]
    pub r_grid: Grid,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value = "0:0.6:13", allow_hyphen_values = true)]
    pub a_grid: Grid,
    /// Largest blocklength of the finite-n check.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Also search the input simplex at every rate.
    #[arg(long)]
    pub optimize_input: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random instances per dimension.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 2)]
    pub min_dim: usize,
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,
}

/// Evenly spaced points `lo:hi:steps`; `steps = 1` means just `lo`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("grid `{s}` is not of the form lo:hi:steps"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("grid `{s}`: lo: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("grid `{s}`: hi: {e}"))?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|e| format!("grid `{s}`: steps: {e}"))?;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(format!("grid `{s}` has non-finite ends"));
        }
        if steps == 0 {
            return Err(format!("grid `{s}` is empty"));
        }
        if steps > 1 && !(hi > lo) {
            return Err(format!("grid `{s}` needs hi > lo"));
        }
        Ok(Grid { lo, hi, steps })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.steps)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_f64(*x),
            Cell::Text(t) => t.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) if x.is_finite() => Value::from(*x),
            Cell::Num(x) => Value::from(fmt_f64(*x)),
            Cell::Text(t) => Value::from(t.clone()),
            Cell::Flag(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            tables: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// First line is the header; every table follows as `# name`, a CSV
    /// header and its rows, then a blank line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# qht {} {}", env!("CARGO_PKG_VERSION"), self.command)?;
        let mut checks = Table::new("checks", &["check", "pass", "detail"]);
        for c in &self.checks {
            checks.push(vec![
                Cell::Text(c.name.clone()),
                c.passed.into(),
                Cell::Text(c.detail.clone()),
            ]);
        }
        for t in self.tables.iter().chain(std::iter::once(&checks)) {
            writeln!(out, "# {}", t.name)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&t.columns)?;
            for r in &t.rows {
                w.write_record(r.iter().map(Cell::csv))?;
            }
            w.flush()?;
            drop(w);
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut tables = Map::new();
        for t in &self.tables {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    let mut obj = Map::new();
                    for (c, v) in t.columns.iter().zip(r) {
                        obj.insert(c.clone(), v.json());
                    }
                    Value::Object(obj)
                })
                .collect();
            tables.insert(t.name.clone(), Value::Array(rows));
        }
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| serde_json::json!({ "check": c.name, "pass": c.passed, "detail": c.detail }))
            .collect();
        serde_json::json!({
            "tool": "qht",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "tables": tables,
            "checks": checks,
            "passed": self.passed(),
        })
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn load_pair(path: &Path) -> Result<HypothesisPair> {
    let json: PairJson = load_json(path)?;
    in_file(path, json.to_pair())
}

fn base(cli: &Cli) -> LogBase {
    if cli.bits {
        LogBase::Bits
    } else {
        LogBase::Nats
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    if !(cli.tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("--tol {} must be >= 0", cli.tol)));
    }
    match &cli.command {
        Command::Exponents(args) => run_exponents(cli, args),
        Command::FiniteN(args) => run_finite_n(cli, args),
        Command::Channel(args) => run_channel(cli, args),
        Command::Verify(args) => run_verify(cli, args),
    }
}

fn run_exponents(cli: &Cli, args: &ExponentsArgs) -> Result<Report> {
    let pair = load_pair(&args.pair)?;
    let b = base(cli);
    let rates = args.r_grid.points();
    let mut report = Report::new("exponents");

    let chernoff = chernoff_bound(&pair);
    let mut summary = Table::new("summary", &["quantity", "value"]);
    summary.push(vec![
        "relative_entropy".into(),
        b.convert(stein_exponent(&pair)).into(),
    ]);
    summary.push(vec!["chernoff".into(), b.convert(chernoff.value).into()]);
    summary.push(vec!["chernoff_s".into(), chernoff.s.into()]);
    summary.push(vec!["support_nested".into(), pair.support_ok().into()]);
    summary.push(vec!["rho_full_rank".into(), pair.rho_full_rank().into()]);
    report.tables.push(summary);

    let hoeffding = ExponentCurve::hoeffding(&rates, &pair)?;
    let tilde = ExponentCurve::tilde(&rates, &pair)?;
    for (name, curve) in [("hoeffding", &hoeffding), ("tilde", &tilde)] {
        let mut t = Table::new(name, &["r", "bound", "s_star", "flag"]);
        for p in &curve.points {
            t.push(vec![
                b.convert(p.rate).into(),
                b.convert(p.value).into(),
                p.s_star.into(),
                if p.diverged { "infinite" } else { "finite" }.into(),
            ]);
        }
        report.tables.push(t);
    }

    let mut legendre = Table::new(
        "legendre",
        &["r", "s_r", "bound", "rate_residual", "value_residual"],
    );
    let mut worst = 0.0f64;
    for &r in &rates {
        if let Some(l) = legendre_residuals(r, &pair)? {
            worst = worst.max(l.rate_residual).max(l.value_residual);
            legendre.push(vec![
                b.convert(l.rate).into(),
                l.s_r.into(),
                b.convert(l.bound).into(),
                b.convert(l.rate_residual).into(),
                b.convert(l.value_residual).into(),
            ]);
        }
    }
    let interior = legendre.rows.len();
    report.tables.push(legendre);

    report.check(
        "hoeffding_nonincreasing",
        hoeffding.is_nonincreasing(cli.tol),
        "bound does not increase along the rate grid".into(),
    );
    report.check(
        "legendre_residuals",
        worst <= LEGENDRE_TOL,
        format!("max residual {} over {interior} interior optima", fmt_f64(worst)),
    );
    if pair.rho_full_rank() {
        let worst_gap = hoeffding
            .points
            .iter()
            .zip(&tilde.points)
            .map(|(h, o)| {
                if h.value == f64::INFINITY {
                    0.0
                } else {
                    h.value - o.value
                }
            })
            .fold(f64::INFINITY, f64::min);
        report.check(
            "hoeffding_dominates_comparison",
            worst_gap >= -cli.tol,
            format!("min gap {}", fmt_f64(worst_gap)),
        );
    }
    Ok(report)
}

/// `s ∈ {0.1, …, 0.9}` for the bound checks.
pub fn s_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn run_finite_n(cli: &Cli, args: &FiniteNArgs) -> Result<Report> {
    let pair = load_pair(&args.pair)?;
    if args.n_max == 0 {
        return Err(Error::InvalidArgument("--n-max must be at least 1".into()));
    }
    check_tensor_dim(pair.dim(), args.n_max, DEFAULT_MAX_DIM)?;
    let b = base(cli);
    let tol = cli.tol;
    let mut report = Report::new("finite-n");

    let mut bounds = Table::new(
        "bounds",
        &[
            "n",
            "a",
            "s",
            "lower_beta_slack",
            "lower_alpha_slack",
            "upper_beta_slack",
            "upper_alpha_slack",
            "min_slack",
            "pass",
        ],
    );
    let mut cells = 0;
    let mut failed = 0;
    let mut worst = f64::INFINITY;
    for n in 1..=args.n_max {
        for &a in &args.a_grid.points() {
            for &s in &s_grid() {
                let c = verify_exponential_bounds(n, a, s, &pair)?;
                let [lb, la, ub, ua] = c.slacks();
                let ok = c.holds(tol);
                cells += 1;
                failed += usize::from(!ok);
                worst = worst.min(c.min_slack());
                bounds.push(vec![
                    n.into(),
                    b.convert(a).into(),
                    s.into(),
                    lb.into(),
                    la.into(),
                    ub.into(),
                    ua.into(),
                    c.min_slack().into(),
                    ok.into(),
                ]);
            }
        }
    }
    report.tables.push(bounds);
    report.check(
        "exponential_bounds",
        failed == 0,
        format!(
            "{failed} of {cells} cells below -{}; min slack {}",
            fmt_f64(tol),
            fmt_f64(worst)
        ),
    );

    let study = stein_convergence(args.epsilon, args.n_max, &pair)?;
    let mut tradeoff = Table::new("tradeoff", &["n", "epsilon", "beta_star", "exponent"]);
    for r in &study.rows {
        tradeoff.push(vec![
            r.n.into(),
            study.epsilon.into(),
            r.beta_star.into(),
            b.convert(r.exponent).into(),
        ]);
    }
    report.tables.push(tradeoff);

    let mut stein = Table::new(
        "stein_achievability",
        &[
            "n",
            "alpha",
            "alpha_bound",
            "beta",
            "beta_bound",
            "beta_star",
            "pass",
        ],
    );
    let mut stein_failed = 0;
    for (row, ach) in study.rows.iter().zip(&study.achievability) {
        let ok = ach.alpha <= ach.alpha_bound * (1.0 + tol)
            && ach.beta <= ach.beta_bound * (1.0 + tol)
            && (ach.alpha > study.epsilon || row.beta_star <= ach.beta * (1.0 + tol) + tol);
        stein_failed += usize::from(!ok);
        stein.push(vec![
            ach.n.into(),
            ach.alpha.into(),
            ach.alpha_bound.into(),
            ach.beta.into(),
            ach.beta_bound.into(),
            row.beta_star.into(),
            ok.into(),
        ]);
    }
    report.tables.push(stein);
    if let Some(arg) = study.argument {
        report.check(
            "stein_achievability",
            arg.holds() && stein_failed == 0,
            format!(
                "s = {}, a = {}, {stein_failed} failing rows",
                fmt_f64(arg.s),
                fmt_f64(b.convert(arg.a))
            ),
        );
    }

    let mut hoeff = Table::new(
        "hoeffding_achievability",
        &[
            "n",
            "r",
            "s_r",
            "a",
            "exponent",
            "alpha",
            "alpha_bound",
            "beta",
            "beta_bound",
            "beta_star_at_alpha",
            "pass",
        ],
    );
    let mut h_failed = 0;
    let mut skipped = 0;
    for &r in &args.r_grid.points() {
        if crate::exponent::hoeffding_bound(r, &pair)?.diverged {
            skipped += 1;
            continue;
        }
        for n in 1..=args.n_max {
            let h = hoeffding_achievability(n, r, &pair)?;
            let opt = optimal_beta_at(n, h.alpha, &pair)?;
            let ok = h.holds(tol) && opt.is_none_or(|o| o <= h.beta * (1.0 + tol) + tol);
            h_failed += usize::from(!ok);
            hoeff.push(vec![
                n.into(),
                b.convert(r).into(),
                h.s_r.into(),
                b.convert(h.a).into(),
                b.convert(h.exponent).into(),
                h.alpha.into(),
                h.alpha_bound().into(),
                h.beta.into(),
                h.beta_bound().into(),
                opt.unwrap_or(f64::NAN).into(),
                ok.into(),
            ]);
        }
    }
    let rows = hoeff.rows.len();
    report.tables.push(hoeff);
    report.check(
        "hoeffding_achievability",
        h_failed == 0,
        format!("{h_failed} of {rows} rows fail; {skipped} rates skipped with infinite bound"),
    );
    Ok(report)
}

fn curve_table(name: &str, curve: &ChannelCurve, b: LogBase) -> Table {
    let k = curve.rows.first().map_or(0, |r| r.p_star.len());
    let mut cols = vec!["a".to_string(), "E".to_string(), "s_star".to_string()];
    cols.extend((0..k).map(|i| format!("p_star_{i}")));
    let mut t = Table {
        name: name.to_string(),
        columns: cols,
        rows: Vec::new(),
    };
    for ChannelCurveRow {
        a,
        exponent,
        s_star,
        p_star,
    } in &curve.rows
    {
        let mut row: Vec<Cell> = vec![
            b.convert(*a).into(),
            b.convert(*exponent).into(),
            (*s_star).into(),
        ];
        row.extend(p_star.iter().map(|&x| Cell::Num(x)));
        t.push(row);
    }
    t
}

fn run_channel(cli: &Cli, args: &ChannelArgs) -> Result<Report> {
    let json: ChannelJson = load_json(&args.channel)?;
    let (channel, p) = in_file(&args.channel, json.to_channel())?;
    let p = p.unwrap_or_else(|| InputDistribution::uniform(channel.alphabet_size()));
    let b = base(cli);
    let tol = cli.tol;
    if args.n_max == 0 {
        return Err(Error::InvalidArgument("--n-max must be at least 1".into()));
    }
    check_tensor_dim(
        channel.alphabet_size() * channel.dim(),
        args.n_max,
        DEFAULT_MAX_DIM,
    )?;
    let mut report = Report::new("channel");

    let holevo = holevo_quantity(&channel, &p)?;
    let mut summary = Table::new("summary", &["quantity", "value"]);
    summary.push(vec!["holevo_quantity".into(), b.convert(holevo).into()]);
    summary.push(vec!["alphabet_size".into(), channel.alphabet_size().into()]);
    summary.push(vec!["dim".into(), channel.dim().into()]);
    report.tables.push(summary);

    let rates = args.a_grid.points();
    if let Some(a) = rates.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::InvalidArgument(format!("a-grid value {a} is negative")));
    }
    let curve = ChannelCurve::at_input(&rates, &channel, &p)?;
    let nonincreasing = curve
        .rows
        .windows(2)
        .all(|w| w[1].exponent <= w[0].exponent + tol);
    report.tables.push(curve_table("exponent", &curve, b));
    report.check(
        "exponent_nonincreasing",
        nonincreasing,
        "E_p does not increase along the rate grid".into(),
    );
    if args.optimize_input {
        let opt = ChannelCurve::optimized(&rates, &channel)?;
        let dominates = opt
            .rows
            .iter()
            .zip(&curve.rows)
            .all(|(o, c)| o.exponent >= c.exponent - tol);
        report.tables.push(curve_table("optimized", &opt, b));
        report.check(
            "optimized_input_dominates",
            dominates,
            "heuristic search never ends below the given input".into(),
        );
    }

    let a = 0.5 * holevo;
    let s = crate::channel::channel_exponent(a, &channel, &p)?.s;
    let mut block = Table::new(
        "blocklength",
        &[
            "n",
            "a",
            "s",
            "first_term",
            "second_term",
            "bound",
            "first_slack",
            "second_slack",
            "achieved_exponent",
            "exponent_at_s",
            "pass",
        ],
    );
    let mut failed = 0;
    for n in 1..=args.n_max {
        let rep = finite_blocklength_check(n, a, s, &channel, &p)?;
        let ok = rep.holds();
        failed += usize::from(!ok);
        block.push(vec![
            n.into(),
            b.convert(a).into(),
            s.into(),
            rep.first_term.into(),
            rep.second_term.into(),
            rep.bound.into(),
            rep.first_slack().into(),
            rep.second_slack().into(),
            b.convert(rep.achieved_exponent()).into(),
            b.convert(rep.exponent_at_s).into(),
            ok.into(),
        ]);
    }
    report.tables.push(block);
    report.check(
        "blocklength_bounds",
        failed == 0,
        format!(
            "{failed} of {} blocklengths exceed 2 and 4 times the bound at a = holevo / 2",
            args.n_max
        ),
    );
    Ok(report)
}

fn suite_table(suite: &GapSuite) -> Table {
    let mut t = Table::new(
        &suite.name,
        &[
            "trial",
            "dim",
            "rank_x",
            "rank_y",
            "parameter",
            "gap",
            "tolerance",
            "pass",
        ],
    );
    for r in &suite.rows {
        t.push(vec![
            r.trial.into(),
            r.dim.into(),
            r.rank_x.into(),
            r.rank_y.into(),
            r.parameter.into(),
            r.gap.into(),
            r.tolerance.into(),
            r.passed().into(),
        ]);
    }
    t
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Result<Report> {
    if args.min_dim == 0 || args.min_dim > args.max_dim {
        return Err(Error::InvalidArgument(format!(
            "dimension range {}..={} is empty",
            args.min_dim, args.max_dim
        )));
    }
    if args.trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let dims: Vec<usize> = (args.min_dim..=args.max_dim).collect();
    let suites = [
        split_trace_suite(cli.seed, args.trials, &dims)?,
        power_difference_suite(cli.seed, args.trials, &dims)?,
    ];
    let mut report = Report::new("verify");
    let mut summary = Table::new(
        "summary",
        &[
            "suite",
            "seed",
            "instances",
            "rank_deficient",
            "failures",
            "worst_gap_over_tolerance",
        ],
    );
    for s in &suites {
        summary.push(vec![
            Cell::Text(s.name.clone()),
            Cell::Int(s.seed),
            s.rows.len().into(),
            s.rank_deficient().into(),
            s.failures().into(),
            s.worst().map_or(f64::NAN, |w| w.gap / w.tolerance).into(),
        ]);
    }
    report.tables.push(summary);
    for s in &suites {
        report.tables.push(suite_table(s));
        report.check(
            &s.name,
            s.failures() == 0,
            format!(
                "{} of {} instances below the scaled tolerance",
                s.failures(),
                s.rows.len()
            ),
        );
    }
    Ok(report)
}

/// Parses arguments, runs the command and writes the report.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::File::create(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
            .and_then(|f| {
                let mut w = std::io::BufWriter::new(f);
                report.write(&mut w, cli.format)?;
                w.flush()?;
                Ok(())
            }),
        None => report.write(std::io::stdout().lock(), cli.format),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let failed: Vec<&Check> = report.checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!("check failed: {}: {}", c.name, c.detail);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
