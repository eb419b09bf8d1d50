//! Experiment drivers and their reports.
//!
//! Every driver returns an [`ExperimentReport`]: a fixed column schema, one
//! row per record, and verdicts that name the checked inequality together
//! with both of its sides. Rows are emitted in a deterministic order.

use std::fmt::Write as _;
use std::time::Instant;

use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use crate::beta::{find_min_degree, gap_distance, gap_distance_prefixes, BetaEngine, MinDegree};
use crate::complex::check_precision;
use crate::error::{OpucError, Result};
use crate::exponent::{
    audit_divergence, construct_cor_3_4, construct_cor_3_5, construct_cor_4_2, construct_cor_4_3,
    construct_thm_1_2, density_report, ratio_at_most_inverse, BlockConstruction, ExponentSet,
    GrowthFn,
};
use crate::measure::MeasureSpec;
use crate::precision::{residual_tolerance, PrecisionPolicy};
use crate::szego::szego_constant;

pub const SCHEMA_VERSION: u32 = 1;

/// Registered experiment names.
pub const EXPERIMENTS: [&str; 7] = [
    "moments",
    "alphas",
    "beta",
    "bounds",
    "lambda",
    "density-curve",
    "thm33",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// What the command line hands to a driver.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub measure_path: Option<std::path::PathBuf>,
    pub precision: u32,
    pub out: Option<std::path::PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(OpucError::domain(format!(
                "unknown experiment `{}`; expected one of {}",
                self.experiment,
                EXPERIMENTS.join(", ")
            )));
        }
        check_precision(self.precision)?;
        Ok(())
    }
}

/// Finite evidence only: an experiment never claims density outright.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    DecreasingBelowTol,
    FloorReached,
    InconclusiveBudget,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::DecreasingBelowTol => "decreasing-below-tol",
            Outcome::FloorReached => "floor-reached",
            Outcome::InconclusiveBudget => "inconclusive-budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    /// The inequality in the form `lhs <relation> rhs`.
    pub inequality: String,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(
        check: impl Into<String>,
        inequality: impl Into<String>,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        Verdict {
            check: check.into(),
            inequality: inequality.into(),
            lhs,
            relation: "<=",
            rhs,
            pass: lhs <= rhs,
        }
    }

    pub fn at_least(
        check: impl Into<String>,
        inequality: impl Into<String>,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        Verdict {
            check: check.into(),
            inequality: inequality.into(),
            lhs,
            relation: ">=",
            rhs,
            pass: lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Telemetry {
    /// Highest precision any part of the run needed.
    pub precision_bits: u32,
    pub wall_clock_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub schema_version: u32,
    pub measure: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub verdicts: Vec<Verdict>,
    pub outcome: Option<Outcome>,
    pub warnings: Vec<String>,
    /// Some rows are missing because a precision or range budget ran out.
    pub incomplete: bool,
    pub telemetry: Telemetry,
}

impl ExperimentReport {
    fn new(experiment: &str, measure: Option<&MeasureSpec>, columns: &[&str]) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            schema_version: SCHEMA_VERSION,
            measure: measure.map(|m| m.label.clone()),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            outcome: None,
            warnings: Vec::new(),
            incomplete: false,
            telemetry: Telemetry {
                precision_bits: 0,
                wall_clock_ms: 0,
            },
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn used(&mut self, bits: u32) {
        self.telemetry.precision_bits = self.telemetry.precision_bits.max(bits);
    }

    fn finish(mut self, started: Instant) -> Self {
        self.telemetry.wall_clock_ms = started.elapsed().as_millis();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// CSV with a versioned header comment. Verdicts, outcome and warnings
    /// follow the rows as `#` comment lines; wall-clock time is left out so
    /// identical runs produce identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# opuc {} schema v{}",
            self.experiment, self.schema_version
        );
        if let Some(m) = &self.measure {
            let _ = writeln!(out, "# measure: {m}");
        }
        let _ = writeln!(out, "# precision_bits: {}", self.telemetry.precision_bits);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "# verdict: {} | {} | {:e} {} {:e} | {}",
                v.check,
                v.inequality,
                v.lhs,
                v.relation,
                v.rhs,
                if v.pass { "pass" } else { "FAIL" }
            );
        }
        if let Some(o) = self.outcome {
            let _ = writeln!(out, "# outcome: {}", o.as_str());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        if self.incomplete {
            let _ = writeln!(out, "# incomplete: budget exhausted for some rows");
        }
        out
    }

    /// Rows become objects keyed by column name.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().cloned())
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "experiment": self.experiment,
            "schema_version": self.schema_version,
            "measure": self.measure,
            "columns": self.columns,
            "rows": rows,
            "verdicts": self.verdicts,
            "outcome": self.outcome,
            "warnings": self.warnings,
            "incomplete": self.incomplete,
            "telemetry": self.telemetry,
        })
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:e}", n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn fnum(x: &Float) -> Value {
    num(x.to_f64())
}

fn int(x: impl Into<u128>) -> Value {
    let x: u128 = x.into();
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

/// Relative slack `2^{-bits/4}` for comparisons between quantities computed
/// by different routes.
fn slack(bits: u32) -> f64 {
    residual_tolerance(bits).to_f64()
}

/// `lhs / rhs`, with `0 / 0 = 0`.
fn ratio(lhs: &Float, rhs: &Float) -> f64 {
    if rhs.is_zero() {
        if lhs.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        Float::with_val(lhs.prec().max(rhs.prec()), lhs / rhs).to_f64()
    }
}

/// `m_0..m_order`.
pub fn run_moments(
    measure: &MeasureSpec,
    order: usize,
    precision: u32,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new("moments", Some(measure), &["k", "re", "im", "modulus"]);
    let m = measure.moments(order, precision)?;
    report.used(precision);
    let mut worst = Float::new(precision);
    for (k, v) in m.values().iter().enumerate() {
        let (re, im) = v.to_f64();
        let modulus = v.abs();
        if modulus > worst {
            worst = modulus.clone();
        }
        report.push(vec![int(k as u64), num(re), num(im), fnum(&modulus)]);
    }
    report.verdicts.push(Verdict::at_most(
        "moments of a probability measure",
        "max_k |m_k| <= 1",
        worst.to_f64(),
        1.0 + slack(precision),
    ));
    Ok(report.finish(started))
}

/// `α_0..α_{len-1}` with the running products `‖Φ_{n+1}‖²`.
pub fn run_alphas(
    measure: &MeasureSpec,
    len: usize,
    policy: PrecisionPolicy,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "alphas",
        Some(measure),
        &["n", "re", "im", "modulus", "norm_sq_next"],
    );
    let available = match measure.rank() {
        Some(r) if r < len + 1 => {
            report.warnings.push(format!(
                "atomic measure of rank {r}: only α_0..α_{} are defined",
                r.saturating_sub(2)
            ));
            r.saturating_sub(1)
        }
        _ => len,
    };
    let alphas = measure.alphas_with(available, policy)?;
    let prec = alphas.precision();
    report.used(prec);
    let mut prod = Float::with_val(prec, 1);
    let mut worst = Float::new(prec);
    for (n, a) in alphas.values().iter().enumerate() {
        let (re, im) = a.to_f64();
        let modulus = a.abs();
        prod *= Float::with_val(prec, 1 - a.norm_sqr());
        report.push(vec![
            int(n as u64),
            num(re),
            num(im),
            fnum(&modulus),
            fnum(&prod),
        ]);
        if modulus > worst {
            worst = modulus;
        }
    }
    if !alphas.is_empty() {
        report.verdicts.push(Verdict::at_most(
            "Verblunsky coefficients lie in the open disk",
            "max_n |α_n| < 1",
            worst.to_f64(),
            1.0 - f64::EPSILON / 2.0,
        ));
    }
    Ok(report.finish(started))
}

/// β over the grid `1 ≤ k ≤ k_max`, `0 ≤ n ≤ n_max`.
pub fn run_beta(
    measure: &MeasureSpec,
    k_max: usize,
    n_max: usize,
    policy: PrecisionPolicy,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "beta",
        Some(measure),
        &[
            "k",
            "n",
            "beta",
            "precision_bits",
            "residual",
            "rank_limited",
        ],
    );
    if k_max == 0 {
        return Err(OpucError::domain("k_max must be at least 1"));
    }
    let engine = BetaEngine::rows(measure, 1, k_max, n_max, policy)?;
    let bits = engine.precision();
    report.used(bits);
    let mut worst_increase = f64::NEG_INFINITY;
    let mut worst_cell = (0, 0);
    for k in 1..=k_max {
        let row = engine.row(k)?;
        for (n, r) in row.iter().enumerate() {
            report.push(vec![
                int(k as u64),
                int(n as u64),
                fnum(&r.value),
                int(r.precision),
                num(r.residual),
                Value::Bool(r.rank_limited),
            ]);
            if n > 0 {
                let inc = Float::with_val(bits, &r.value - &row[n - 1].value).to_f64();
                if inc > worst_increase {
                    worst_increase = inc;
                    worst_cell = (k, n);
                }
            }
        }
    }
    if n_max > 0 {
        report.verdicts.push(Verdict::at_most(
            format!(
                "β nonincreasing in n (largest step at k = {}, n = {})",
                worst_cell.0, worst_cell.1
            ),
            "max β(k,n) - β(k,n-1) <= 2^{-p/4}",
            worst_increase,
            slack(bits),
        ));
    }
    Ok(report.finish(started))
}

/// Largest `n' ≤ n_max` for which an engine over `k_lo..=k_hi` builds, together
/// with the error that stopped the next size.
fn largest_engine(
    measure: &MeasureSpec,
    k_lo: usize,
    k_hi: usize,
    n_max: usize,
    policy: PrecisionPolicy,
) -> Result<(Option<BetaEngine>, Option<String>)> {
    match BetaEngine::rows(measure, k_lo, k_hi, n_max, policy) {
        Ok(e) => Ok((Some(e), None)),
        Err(e @ OpucError::Precision { .. }) => {
            let first = e.to_string();
            // bisect on the largest size that still succeeds
            let (mut good, mut bad) = (None, n_max);
            let mut lo = 0;
            while lo < bad {
                let mid = lo + (bad - lo) / 2;
                match BetaEngine::rows(measure, k_lo, k_hi, mid, policy) {
                    Ok(e) => {
                        good = Some(e);
                        lo = mid + 1;
                    }
                    Err(OpucError::Precision { .. }) => bad = mid,
                    Err(e) => return Err(e),
                }
            }
            Ok((good, Some(first)))
        }
        Err(e) => Err(e),
    }
}

/// β next to both upper bounds on `1 ≤ k ≤ k_max`, `1 ≤ n ≤ n_max`.
///
/// Cells the precision budget cannot reach are emitted with a status and no
/// values; the table itself still succeeds.
pub fn run_bound_table(
    measure: &MeasureSpec,
    k_max: usize,
    n_max: usize,
    policy: PrecisionPolicy,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "bounds",
        Some(measure),
        &[
            "k",
            "n",
            "beta",
            "bound_3_7",
            "bound_3_8",
            "precision_bits",
            "status",
        ],
    );
    if k_max == 0 || n_max == 0 {
        return Err(OpucError::domain(
            "the bound table needs k_max ≥ 1 and n_max ≥ 1",
        ));
    }
    let (engine, failure) = largest_engine(measure, 1, k_max, n_max, policy)?;
    let reach = engine.as_ref().map_or(0, |e| e.n_max());
    if let Some(f) = &failure {
        report.incomplete = true;
        report
            .warnings
            .push(format!("cells with n > {reach} not computed: {f}"));
    }
    let bits = engine.as_ref().map_or(policy.ceiling, |e| e.precision());
    report.used(bits);
    let tol = 1.0 + slack(bits);
    let mut worst_37 = (0.0f64, 0, 0);
    let mut worst_38 = (0.0f64, 0, 0);
    for k in 1..=k_max {
        for n in 1..=n_max {
            let cell = engine.as_ref().filter(|_| n <= reach);
            let Some(e) = cell else {
                report.push(vec![
                    int(k as u64),
                    int(n as u64),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    text("precision-error"),
                ]);
                continue;
            };
            let b = e.beta(k, n)?.value;
            let b37 = e.bound_3_7(k, n)?;
            let b38 = e.bound_3_8(k, n)?;
            let r37 = ratio(&b, &b37);
            let r38 = ratio(&b37, &b38);
            if r37 > worst_37.0 {
                worst_37 = (r37, k, n);
            }
            if r38 > worst_38.0 {
                worst_38 = (r38, k, n);
            }
            let status = if r37 <= tol && r38 <= tol {
                "ok"
            } else {
                "violation"
            };
            report.push(vec![
                int(k as u64),
                int(n as u64),
                fnum(&b),
                fnum(&b37),
                fnum(&b38),
                int(bits),
                text(status),
            ]);
        }
    }
    if reach > 0 {
        report.verdicts.push(Verdict::at_most(
            format!(
                "β below the composition bound (worst cell k = {}, n = {})",
                worst_37.1, worst_37.2
            ),
            "max β(k,n) / bound_3_7(k,n) <= 1 + 2^{-p/4}",
            worst_37.0,
            tol,
        ));
        report.verdicts.push(Verdict::at_most(
            format!(
                "composition bound below the binomial bound (worst cell k = {}, n = {})",
                worst_38.1, worst_38.2
            ),
            "max bound_3_7(k,n) / bound_3_8(k,n) <= 1 + 2^{-p/4}",
            worst_38.0,
            tol,
        ));
    }
    Ok(report.finish(started))
}

/// Which exponent-set construction to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSpec {
    /// Zero lower density for a given growth function.
    Cor34 { growth: GrowthFn, count: usize },
    /// Blocks of length `⌊k^s⌋`, auto-generated starts when `k` is absent.
    Thm12 {
        s: f64,
        #[serde(default)]
        k: Option<Vec<u64>>,
        count: usize,
    },
    /// Blocks of length `⌊t C_{ε,ℓ} ln(k) k⌋`.
    Cor42 {
        epsilon: f64,
        window: u32,
        t: f64,
        k: Vec<u64>,
        count: usize,
    },
    /// The gap set `Γ` and the block set `Λ` built in its complement.
    Cor43 {
        t: f64,
        t_tilde: f64,
        c: f64,
        count: usize,
        #[serde(default)]
        s: Option<f64>,
    },
    /// Blocks placed after a finite excluded set `Γ`.
    Cor35 {
        gamma: Vec<u64>,
        growth: GrowthFn,
        count: usize,
    },
}

impl LambdaSpec {
    pub fn parse(document: &str) -> Result<Self> {
        serde_json::from_str(document).map_err(|e| OpucError::domain(format!("construction: {e}")))
    }

    /// The exponent set `Λ` the construction produces.
    pub fn lambda_set(&self) -> Result<ExponentSet> {
        let widen = |v: &[u64]| v.iter().map(|&x| x as u128).collect::<Vec<_>>();
        let b = match self {
            LambdaSpec::Cor34 { growth, count } => construct_cor_3_4(&|k| growth.eval(k), *count)?,
            LambdaSpec::Thm12 { s, k, count } => {
                construct_thm_1_2(*s, k.as_deref().map(widen).as_deref(), *count)?
            }
            LambdaSpec::Cor42 {
                epsilon,
                window,
                t,
                k,
                count,
            } => construct_cor_4_2(*epsilon, *window, *t, &widen(k), *count)?,
            LambdaSpec::Cor43 {
                t,
                t_tilde,
                c,
                count,
                s,
            } => return Ok(construct_cor_4_3(*t, *t_tilde, *c, *count, *s)?.lambda),
            LambdaSpec::Cor35 {
                gamma,
                growth,
                count,
            } => construct_cor_3_5(&widen(gamma), &|k| growth.eval(k), *count)?,
        };
        Ok(b.set)
    }
}

/// Blocks of the construction, exact density checkpoints and the
/// construction-specific audits.
pub fn run_lambda(spec: &LambdaSpec) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "lambda",
        None,
        &["set", "j", "lo", "hi", "checkpoint", "count_upto", "ratio"],
    );
    let widen = |v: &[u64]| v.iter().map(|&x| x as u128).collect::<Vec<_>>();
    match spec {
        LambdaSpec::Cor34 { growth, count } => {
            let f = |k: u128| growth.eval(k);
            let b = construct_cor_3_4(&f, *count)?;
            block_rows(&mut report, &b, true)?;
            let audit = audit_divergence(&b.k, &b.l, &f)?;
            divergence_verdict(&mut report, &audit.gaps, audit.divergent);
        }
        LambdaSpec::Thm12 { s, k, count } => {
            let starts = k.as_deref().map(widen);
            let b = construct_thm_1_2(*s, starts.as_deref(), *count)?;
            block_rows(&mut report, &b, k.is_none())?;
        }
        LambdaSpec::Cor42 {
            epsilon,
            window,
            t,
            k,
            count,
        } => {
            let b = construct_cor_4_2(*epsilon, *window, *t, &widen(k), *count)?;
            block_rows(&mut report, &b, false)?;
        }
        LambdaSpec::Cor43 {
            t,
            t_tilde,
            c,
            count,
            s,
        } => {
            let g = construct_cor_4_3(*t, *t_tilde, *c, *count, *s)?;
            for (name, set) in [("gamma", &g.gamma), ("lambda", &g.lambda)] {
                for (j, iv) in set.intervals().iter().enumerate() {
                    report.push(vec![
                        text(name),
                        int(j as u64 + 1),
                        int(iv[0]),
                        int(iv[1]),
                        Value::Null,
                        Value::Null,
                        Value::Null,
                    ]);
                }
            }
            let overlap = g.gamma.intersection(&g.lambda);
            let shared: u128 = overlap.intervals().iter().map(|iv| iv[1] - iv[0] + 1).sum();
            report.verdicts.push(Verdict::at_most(
                "Γ and Λ are disjoint",
                "|Γ ∩ Λ| <= 0",
                shared as f64,
                0.0,
            ));
            match g.n_start {
                Some(n) => report
                    .warnings
                    .push(format!("Λ blocks start at j = {n} (s = {})", g.s)),
                None => report.warnings.push(format!(
                    "no block index satisfies the separation inequality for s = {}",
                    g.s
                )),
            }
        }
        LambdaSpec::Cor35 {
            gamma,
            growth,
            count,
        } => {
            let f = |k: u128| growth.eval(k);
            let b = construct_cor_3_5(&widen(gamma), &f, *count)?;
            block_rows(&mut report, &b, false)?;
            let gset = ExponentSet::from_intervals(gamma.iter().map(|&x| (x as u128, x as u128)))?;
            let shared = b.set.intersection(&gset);
            let n: u128 = shared.intervals().iter().map(|iv| iv[1] - iv[0] + 1).sum();
            report.verdicts.push(Verdict::at_most(
                "Λ avoids Γ",
                "|Γ ∩ Λ| <= 0",
                n as f64,
                0.0,
            ));
            let audit = audit_divergence(&b.k, &b.l, &f)?;
            divergence_verdict(&mut report, &audit.gaps, audit.divergent);
        }
    }
    Ok(report.finish(started))
}

/// One row per block with its checkpoint `N = k_{j+1} - 1`; with
/// `density_check`, also `|Λ ∩ [1, N]| / N ≤ 1/j` compared exactly.
fn block_rows(
    report: &mut ExperimentReport,
    b: &BlockConstruction,
    density_check: bool,
) -> Result<()> {
    let checkpoints = b.checkpoints();
    let density = if checkpoints.is_empty() {
        None
    } else {
        Some(density_report(&b.set, &checkpoints)?)
    };
    let mut worst: Option<(f64, usize)> = None;
    let mut all_ok = true;
    for (j, (&k, &l)) in b.k.iter().zip(&b.l).enumerate() {
        let cp = density.as_ref().and_then(|d| d.checkpoints.get(j));
        report.push(vec![
            text("lambda"),
            int(j as u64 + 1),
            int(k),
            int(k + l),
            cp.map_or(Value::Null, |c| int(c.n)),
            cp.map_or(Value::Null, |c| int(c.count)),
            cp.map_or(Value::Null, |c| num(c.ratio)),
        ]);
        if let Some(c) = cp {
            let jj = j as u128 + 1;
            all_ok &= ratio_at_most_inverse(c.count, c.n, jj);
            let excess = c.ratio * jj as f64;
            if worst.is_none_or(|(w, _)| excess > w) {
                worst = Some((excess, j + 1));
            }
        }
    }
    if density_check {
        if let Some((w, j)) = worst {
            let mut v = Verdict::at_most(
                format!("checkpoint density (largest at j = {j})"),
                "max_j j·|Λ ∩ [1, k_{j+1}-1]| / (k_{j+1}-1) <= 1",
                w,
                1.0,
            );
            // the exact rational comparison decides; the float only reports
            v.pass = all_ok;
            report.verdicts.push(v);
        }
    }
    Ok(())
}

fn divergence_verdict(report: &mut ExperimentReport, gaps: &[i128], divergent: bool) {
    let smallest_step = gaps
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64)
        .fold(f64::INFINITY, f64::min);
    let first = gaps.first().copied().unwrap_or(0) as f64;
    let mut v = Verdict::at_least(
        "ℓ_j - f(k_j) grows along the blocks",
        "min(ℓ_1 - f(k_1), min_j step) >= 1",
        first.min(smallest_step),
        1.0,
    );
    v.pass = divergent;
    report.verdicts.push(v);
}

/// `dist(z^m, span E(Λ ∩ [0, N]))` along a schedule of `N`.
pub fn run_density_curve(
    measure: &MeasureSpec,
    lambda: &ExponentSet,
    target: u64,
    schedule: &[u64],
    tol: f64,
    policy: PrecisionPolicy,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "density-curve",
        Some(measure),
        &["N", "distance", "precision_bits", "size"],
    );
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OpucError::domain(
            "the N schedule must be nonempty and increasing",
        ));
    }
    let last = *schedule.last().unwrap();
    if lambda.max().is_none_or(|m| m < last as u128) {
        report.warnings.push(format!(
            "Λ truncation ends before N = {last}; the tail of the schedule adds no exponents"
        ));
    }
    let exps = lambda.section(0, last as u128)?;
    // prefix length of Λ ∩ [0, N] inside the sorted section
    let prefixes: Vec<usize> = schedule
        .iter()
        .map(|&n| exps.partition_point(|&e| e <= n))
        .collect();
    let nonempty: Vec<usize> = prefixes.iter().copied().filter(|&p| p > 0).collect();
    let results = if nonempty.is_empty() {
        Vec::new()
    } else {
        gap_distance_prefixes(measure, &[target], &exps, &nonempty, policy)?.remove(0)
    };
    let mut it = results.into_iter();
    let mut values: Vec<f64> = Vec::with_capacity(schedule.len());
    let mut bits = policy.start;
    for (&n, &p) in schedule.iter().zip(&prefixes) {
        let (d, prec) = if p == 0 {
            (1.0, policy.start)
        } else {
            let r = it.next().expect("one result per nonempty prefix");
            (r.value.to_f64(), r.precision)
        };
        bits = bits.max(prec);
        values.push(d);
        report.push(vec![int(n), num(d), int(prec), int(p as u64)]);
    }
    report.used(bits);
    let eps = slack(bits);
    let worst = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    if values.len() > 1 {
        report.verdicts.push(Verdict::at_most(
            "distances nonincreasing in N",
            "max_i d(N_{i+1}) - d(N_i) <= 2^{-p/4}",
            worst,
            eps,
        ));
    }
    let final_d = *values.last().unwrap();
    report.outcome = Some(if final_d <= tol {
        Outcome::DecreasingBelowTol
    } else if values.len() > 1 && (values[values.len() - 2] - final_d).abs() <= eps {
        Outcome::FloorReached
    } else {
        Outcome::InconclusiveBudget
    });
    Ok(report.finish(started))
}

/// Parameters of the block-witness experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm33Params {
    /// Exponents `k` whose monomials `z^k` are approximated.
    pub targets: Vec<u64>,
    /// Tolerance defining the empirical `f(k) = min{n : β(k, n) ≤ tol}`.
    pub tol: f64,
    pub blocks: usize,
    /// Degree budget for `f`.
    pub n_max: usize,
    /// Explicit block starts; otherwise `k_1 = 1`, `k_{j+1} = k_j + ℓ_j + 1`.
    #[serde(default)]
    pub starts: Option<Vec<u64>>,
}

impl Default for Thm33Params {
    fn default() -> Self {
        Thm33Params {
            targets: vec![0, 1, 2],
            tol: 0.1,
            blocks: 4,
            n_max: 200,
            starts: None,
        }
    }
}

/// Relative agreement required between the single-block gap distance and
/// the witness β.
pub const WITNESS_RTOL: f64 = 1e-12;

struct Block {
    j: usize,
    k: u64,
    f: usize,
    l: u64,
    witness: Float,
    found: bool,
}

/// Blocks `[[k_j, k_j + ℓ_j]]` with `ℓ_j = f(k_j) + j` and the proof's
/// witnesses `‖z^k - z^{k+k_j} π_{k_j}‖ = β(k_j, f(k_j))`.
pub fn run_thm_3_3(
    measure: &MeasureSpec,
    params: &Thm33Params,
    policy: PrecisionPolicy,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut report = ExperimentReport::new(
        "thm33",
        Some(measure),
        &[
            "j",
            "k_j",
            "f_k_j",
            "l_j",
            "target",
            "window_lo",
            "window_hi",
            "witness",
            "gap_single",
            "gap_cumulative",
            "floor",
            "precision_bits",
            "status",
        ],
    );
    if !(params.tol > 0.0 && params.tol < 1.0) {
        return Err(OpucError::domain(format!(
            "tol = {} must lie in (0, 1)",
            params.tol
        )));
    }
    if params.blocks == 0 || params.targets.is_empty() {
        return Err(OpucError::domain("need at least one block and one target"));
    }
    if let Some(s) = &params.starts {
        if s.len() < params.blocks || s[0] == 0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OpucError::domain(
                "starts must be positive, strictly increasing and cover every block",
            ));
        }
    }

    // blocks and witnesses
    let mut blocks: Vec<Block> = Vec::new();
    let mut next_k = params.starts.as_ref().map_or(1, |s| s[0]);
    for j in 1..=params.blocks {
        let k = match &params.starts {
            Some(s) => s[j - 1],
            None => next_k,
        };
        let kk = usize::try_from(k).map_err(|_| OpucError::domain("block start too large"))?;
        match find_min_degree(measure, kk, params.tol, params.n_max, policy) {
            Ok(md) => {
                let (r, found) = match md {
                    MinDegree::Found(r) => (r, true),
                    MinDegree::Overflow { last, .. } => (last, false),
                };
                if !found {
                    report.incomplete = true;
                }
                report.used(r.precision);
                let l = (r.n + j) as u64;
                if let Some(s) = &params.starts {
                    if j < params.blocks && k + l >= s[j] {
                        report.warnings.push(format!(
                            "block {j} ends at {} and overlaps the next start {}",
                            k + l,
                            s[j]
                        ));
                    }
                }
                blocks.push(Block {
                    j,
                    k,
                    f: r.n,
                    l,
                    witness: r.value,
                    found,
                });
                next_k = k + l + 1;
            }
            Err(e @ OpucError::Precision { .. }) => {
                report.incomplete = true;
                report.warnings.push(format!("block {j} (k = {k}): {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if blocks.is_empty() {
        report.outcome = Some(Outcome::InconclusiveBudget);
        return Ok(report.finish(started));
    }

    // Szegő diagnostic and the lower floor β(k, n) ≥ ‖Φ_{n+k}‖
    let diag_n = blocks
        .iter()
        .map(|b| b.f + b.k as usize)
        .max()
        .unwrap()
        .max(params.n_max);
    let szego = szego_constant(measure, diag_n, policy);
    let (products, szego_like) = match &szego {
        Ok(sc) => {
            let p = sc.partial_products[diag_n].to_f64();
            let like = p > params.tol * params.tol;
            if like {
                report.warnings.push(format!(
                    "Szegő diagnostic: Π_(i≤{diag_n}) (1 - |α_i|²) = {p:e} exceeds tol² = {:e}; the measure looks Szegő and distances are expected to plateau",
                    params.tol * params.tol
                ));
            }
            (Some(&sc.partial_products), like)
        }
        Err(e) => {
            report
                .warnings
                .push(format!("Szegő diagnostic unavailable: {e}"));
            (None, false)
        }
    };
    let floor_of = |b: &Block| -> Option<Float> {
        products.map(|pp| {
            let idx = b.f + b.k as usize - 1;
            pp[idx].clone().sqrt()
        })
    };

    // Λ = ⋃ blocks; cumulative prefixes end at k_j + ℓ_j
    let lambda =
        ExponentSet::from_intervals(blocks.iter().map(|b| (b.k as u128, (b.k + b.l) as u128)))?;
    let last_end = blocks.iter().map(|b| b.k + b.l).max().unwrap();
    let exps = lambda.section(0, last_end as u128)?;
    let prefixes: Vec<usize> = blocks
        .iter()
        .map(|b| exps.partition_point(|&e| e <= b.k + b.l))
        .collect();
    let cumulative = gap_distance_prefixes(measure, &params.targets, &exps, &prefixes, policy);
    let cumulative = match cumulative {
        Ok(c) => Some(c),
        Err(e @ OpucError::Precision { .. }) => {
            report.incomplete = true;
            report.warnings.push(format!("cumulative distances: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let mut worst_identity: Option<(f64, usize, u64)> = None;
    let mut worst_cumulative: Option<(f64, usize, u64)> = None;
    let mut worst_floor: Option<(f64, usize)> = None;
    let mut cum_bits = 0;
    for (bi, b) in blocks.iter().enumerate() {
        let floor = floor_of(b);
        if let Some(fl) = &floor {
            let margin = Float::with_val(fl.prec().max(b.witness.prec()), &b.witness - fl).to_f64();
            if worst_floor.is_none_or(|(w, _)| margin < w) {
                worst_floor = Some((margin, b.j));
            }
        }
        for (ti, &t) in params.targets.iter().enumerate() {
            let lo = t + b.k;
            let hi = lo + b.f as u64;
            let window: Vec<u64> = (lo..=hi).collect();
            let single = gap_distance(measure, t, &window, policy);
            let fits = t <= b.l - b.f as u64;
            let cum = cumulative.as_ref().map(|c| &c[ti][bi]);
            let mut status = String::from(if b.found { "ok" } else { "budget" });
            let mut bits = 0;
            let single_value = match &single {
                Ok(g) => {
                    bits = g.precision;
                    let rel = Float::with_val(g.precision, &g.value - &b.witness)
                        .abs()
                        .to_f64()
                        / b.witness.to_f64().max(f64::MIN_POSITIVE);
                    if worst_identity.is_none_or(|(w, _, _)| rel > w) {
                        worst_identity = Some((rel, b.j, t));
                    }
                    fnum(&g.value)
                }
                Err(e) => {
                    report.incomplete = true;
                    status = format!("precision-error: {e}");
                    Value::Null
                }
            };
            if let Some(c) = cum {
                cum_bits = cum_bits.max(c.precision);
                if fits {
                    let r = ratio(&c.value, &b.witness);
                    if worst_cumulative.is_none_or(|(w, _, _)| r > w) {
                        worst_cumulative = Some((r, b.j, t));
                    }
                } else if status == "ok" {
                    status = "window-outside-block".into();
                }
            }
            report.used(bits);
            report.push(vec![
                int(b.j as u64),
                int(b.k),
                int(b.f as u64),
                int(b.l),
                int(t),
                int(lo),
                int(hi),
                fnum(&b.witness),
                single_value,
                cum.map_or(Value::Null, |c| fnum(&c.value)),
                floor.as_ref().map_or(Value::Null, fnum),
                int(bits.max(cum.map_or(0, |c| c.precision))),
                text(status),
            ]);
        }
    }
    report.used(cum_bits);
    let bits = report.telemetry.precision_bits;

    if let Some((w, j, t)) = worst_identity {
        report.verdicts.push(Verdict::at_most(
            format!("single-block gap distance equals the witness (worst j = {j}, target {t})"),
            "max |gap(z^k, [k+k_j, k+k_j+f(k_j)]) - β(k_j, f(k_j))| / β <= 1e-12",
            w,
            WITNESS_RTOL,
        ));
    }
    if let Some((w, j, t)) = worst_cumulative {
        report.verdicts.push(Verdict::at_most(
            format!("cumulative distance below the witness (worst j = {j}, target {t})"),
            "max gap(z^k, Λ ∩ [0, k_j+ℓ_j]) / β(k_j, f(k_j)) <= 1 + 2^{-p/4}",
            w,
            1.0 + slack(bits),
        ));
    }
    if let Some((m, j)) = worst_floor {
        report.verdicts.push(Verdict::at_least(
            format!("witness above the norm floor (tightest j = {j})"),
            "min β(k_j, f(k_j)) - ‖Φ_{f(k_j)+k_j}‖ >= -1e-12",
            m,
            -1e-12,
        ));
    }
    let last = blocks.last().unwrap();
    let all_found = blocks.iter().all(|b| b.found);
    if !szego_like {
        report.verdicts.push(Verdict::at_most(
            format!("last witness below tol (j = {})", last.j),
            "β(k_J, f(k_J)) <= tol",
            last.witness.to_f64(),
            params.tol,
        ));
    }
    report.outcome = Some(
        if all_found && !report.incomplete && last.witness <= params.tol {
            Outcome::DecreasingBelowTol
        } else if szego_like {
            Outcome::FloorReached
        } else {
            Outcome::InconclusiveBudget
        },
    );
    Ok(report.finish(started))
}

/// Geometric schedule `N = base·2^i` capped at `last`, always ending at `last`.
pub fn doubling_schedule(first: u64, last: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = first.max(1);
    while n < last {
        out.push(n);
        n = n.saturating_mul(2);
    }
    out.push(last);
    out
}
