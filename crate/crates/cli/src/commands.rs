//! One function per subcommand. Each renders its report as CSV or JSON and
//! says whether every check it ran passed.

use std::fmt::Write as _;

use masstransport::birkhoff::{self, AEpsilon};
use masstransport::transport::{
    ladder_epochs_before_zero, mass_received_at_zero, mass_row, records_after, total_sent,
};
use masstransport::verify::{
    self, exact_identity_report, mc_identity, survival_tail_bound, ExactConfig, IdentityReport, McConfig,
    Mode, Side,
};
use masstransport::{format_rational, EstimateCI, Process, Rational, EPSILON};
use serde_json::json;

use crate::config::{Format, RunConfig};

/// Default tolerance on `|S_n/n - E[X_1|I]|` at `n_max`.
pub const BIRKHOFF_TOLERANCE: f64 = 0.05;
/// Largest fraction of trajectories allowed outside the tolerance.
pub const BIRKHOFF_MAX_DEVIATING: f64 = 0.02;

pub struct Rendered {
    pub body: String,
    /// Summary lines for standard error.
    pub notes: String,
    pub passed: bool,
}

pub type CommandResult = Result<Rendered, masstransport::Error>;

fn mc(cfg: &RunConfig) -> McConfig {
    McConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        z: cfg.z,
    }
}

fn json_body(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sample(process: &Process, cfg: &RunConfig) -> CommandResult {
    let windows = (0..cfg.trials)
        .map(|t| process.sample_labeled(cfg.lo, cfg.hi, cfg.seed, t))
        .collect::<Result<Vec<_>, _>>()?;
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("trial,component,index,x,s\n");
            for (t, (label, w)) in windows.iter().enumerate() {
                for k in w.lo()..=w.hi() {
                    let x = if k > w.lo() { w.x(k).to_string() } else { String::new() };
                    writeln!(s, "{t},{label},{k},{x},{}", w.s(k)).unwrap();
                }
            }
            s
        }
        Format::Json => json_body(json!(windows
            .iter()
            .enumerate()
            .map(|(t, (label, w))| json!({
                "trial": t,
                "component": label,
                "lo": w.lo(),
                "hi": w.hi(),
                "values": w.values(),
                "sums": w.sums(),
            }))
            .collect::<Vec<_>>())),
    };
    Ok(Rendered {
        body,
        notes: String::new(),
        passed: true,
    })
}

/// `(table, n, m, value)` of the transport dump.
type TableRow = (&'static str, Option<i64>, Option<i64>, Option<f64>);

/// Records, ladders and mass rows of trial 0, with two internal consistency
/// gates: every row total equals its closed form, and the ladder closed form
/// for mass received at 0 equals the direct rows.
pub fn transport(process: &Process, cfg: &RunConfig) -> CommandResult {
    let w = process.sample_window(cfg.lo, cfg.hi, cfg.seed, 0)?;
    let mut passed = true;
    let mut rows: Vec<TableRow> = Vec::new();
    for k in w.lo()..=w.hi() {
        rows.push(("sum", None, Some(k), Some(*w.s(k))));
    }
    for n in w.lo()..w.hi() {
        for m in records_after(&w, n)?.records {
            rows.push(("record", Some(n), Some(m), Some(*w.s(m))));
        }
        let row = mass_row(&w, n)?;
        for (m, v) in &row.entries {
            rows.push(("mass", Some(n), Some(*m), Some(*v)));
        }
        let total = row.total();
        let closed = total_sent(&w, n)?;
        passed &= (total - closed).abs() <= EPSILON;
        rows.push(("row_total", Some(n), None, Some(total)));
        rows.push(("total_sent", Some(n), None, Some(closed)));
    }
    if w.lo() <= -1 {
        for m in ladder_epochs_before_zero(&w)?.epochs {
            rows.push(("ladder", None, Some(m), Some(*w.s(m))));
        }
        let received = mass_received_at_zero(&w)?;
        for m in w.lo()..=-1 {
            let direct = mass_row(&w, m)?.get(0);
            let closed = received.get(&m).copied().unwrap_or(0.0);
            passed &= (direct - closed).abs() <= EPSILON;
        }
        for (m, v) in &received {
            rows.push(("received", Some(*m), Some(0), Some(*v)));
        }
    }
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("table,n,m,value\n");
            let cell = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
            for (table, n, m, v) in &rows {
                writeln!(s, "{table},{},{},{}", cell(*n), cell(*m), opt(*v)).unwrap();
            }
            s
        }
        Format::Json => json_body(json!({
            "lo": w.lo(),
            "hi": w.hi(),
            "consistent": passed,
            "rows": rows
                .iter()
                .map(|(t, n, m, v)| json!({"table": t, "n": n, "m": m, "value": v}))
                .collect::<Vec<_>>(),
        })),
    };
    let notes = format!(
        "transport: window [{}, {}], consistency {}\n",
        w.lo(),
        w.hi(),
        if passed { "ok" } else { "FAILED" }
    );
    Ok(Rendered { body, notes, passed })
}

pub fn verify_identity(process: &Process, cfg: &RunConfig) -> CommandResult {
    let mut report = IdentityReport::default();
    if cfg.mode.exact() {
        report.extend(exact_identity_report(process, cfg.horizon, &ExactConfig::default())?);
    }
    if cfg.mode.mc() {
        report.extend(mc_identity(process, cfg.horizon, &mc(cfg))?);
    }
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("n,lhs,rhs,lhs_ci_lo,lhs_ci_hi,rhs_ci_lo,rhs_ci_hi,mode,pass\n");
            for row in &report.rows {
                let (lhs, llo, lhi) = side_cells(&row.lhs);
                let (rhs, rlo, rhi) = side_cells(&row.rhs);
                writeln!(
                    s,
                    "{},{lhs},{rhs},{llo},{lhi},{rlo},{rhi},{},{}",
                    row.n,
                    row.mode.as_str(),
                    row.pass
                )
                .unwrap();
            }
            s
        }
        Format::Json => json_body(json!({
            "rows": report.rows,
            "cumulative": report
                .cumulative()
                .into_iter()
                .map(|(n, mode, l, r)| json!({"n": n, "mode": mode, "lhs": l, "rhs": r}))
                .collect::<Vec<_>>(),
            "pass": report.all_pass(),
        })),
    };
    let failed = report.rows.iter().filter(|r| !r.pass).count();
    let notes = format!("verify-identity: {} rows, {failed} failed\n", report.rows.len());
    Ok(Rendered {
        body,
        notes,
        passed: report.all_pass(),
    })
}

fn side_cells(side: &Side) -> (String, String, String) {
    match side {
        Side::Exact(r) => (format_rational(r), String::new(), String::new()),
        Side::Mc(e) => (e.mean.to_string(), e.ci_low.to_string(), e.ci_high.to_string()),
    }
}

/// One output row shared by `verify-maximal` and `survival`.
struct ValueRow {
    big_n: u64,
    mode: Mode,
    exact: Option<Rational>,
    estimate: Option<EstimateCI>,
    tail_bound: Option<f64>,
    pass: bool,
}

impl ValueRow {
    fn value(&self) -> String {
        match (&self.exact, &self.estimate) {
            (Some(r), _) => format_rational(r),
            (None, Some(e)) => e.mean.to_string(),
            (None, None) => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "N": self.big_n,
            "mode": self.mode,
            "value": self.value(),
            "estimate": self.estimate,
            "tail_bound": self.tail_bound,
            "pass": self.pass,
        })
    }
}

fn render_values(rows: &[ValueRow], cfg: &RunConfig, with_tail: bool) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = String::from("N,mode,value,std_error,ci_lo,ci_hi");
            s.push_str(if with_tail { ",tail_bound,pass\n" } else { ",pass\n" });
            for row in rows {
                let e = row.estimate.as_ref();
                write!(
                    s,
                    "{},{},{},{},{},{}",
                    row.big_n,
                    row.mode.as_str(),
                    row.value(),
                    opt(e.map(|e| e.std_error)),
                    opt(e.map(|e| e.ci_low)),
                    opt(e.map(|e| e.ci_high)),
                )
                .unwrap();
                if with_tail {
                    write!(s, ",{}", opt(row.tail_bound)).unwrap();
                }
                writeln!(s, ",{}", row.pass).unwrap();
            }
            s
        }
        Format::Json => json_body(json!(rows.iter().map(ValueRow::to_json).collect::<Vec<_>>())),
    }
}

pub fn verify_maximal(process: &Process, cfg: &RunConfig) -> CommandResult {
    let mut rows = Vec::new();
    if cfg.mode.exact() {
        for big_n in 1..=cfg.horizon {
            let v = verify::exact_maximal_ergodic(process, big_n, &ExactConfig::default())?;
            rows.push(ValueRow {
                big_n,
                mode: Mode::Exact,
                pass: v <= Rational::from_integer(0.into()),
                exact: Some(v),
                estimate: None,
                tail_bound: None,
            });
        }
    }
    if cfg.mode.mc() {
        let profile = verify::mc_maximal_ergodic_profile(process, cfg.horizon, &mc(cfg))?;
        for (i, e) in profile.into_iter().enumerate() {
            rows.push(ValueRow {
                big_n: i as u64 + 1,
                mode: Mode::Mc,
                pass: e.mean <= 3.0 * e.std_error,
                exact: None,
                estimate: Some(e),
                tail_bound: None,
            });
        }
    }
    let passed = rows.iter().all(|r| r.pass);
    let notes = format!(
        "verify-maximal: {} rows, {} failed\n",
        rows.len(),
        rows.iter().filter(|r| !r.pass).count()
    );
    Ok(Rendered {
        body: render_values(&rows, cfg, false),
        notes,
        passed,
    })
}

/// For positive-mean processes, survival must stay positive: exactly in exact
/// mode, by three standard errors in Monte Carlo.
pub fn survival(process: &Process, cfg: &RunConfig) -> CommandResult {
    let positive = process.mean() > 0.0;
    let mut rows = Vec::new();
    if cfg.mode.exact() {
        for big_n in 1..=cfg.horizon {
            let v = verify::exact_survival(process, big_n, &ExactConfig::default())?;
            rows.push(ValueRow {
                big_n,
                mode: Mode::Exact,
                pass: !positive || v > Rational::from_integer(0.into()),
                exact: Some(v),
                estimate: None,
                tail_bound: survival_tail_bound(process, big_n),
            });
        }
    }
    if cfg.mode.mc() {
        let e = verify::mc_survival(process, cfg.horizon, &mc(cfg))?;
        rows.push(ValueRow {
            big_n: cfg.horizon,
            mode: Mode::Mc,
            pass: !positive || e.mean - 3.0 * e.std_error > 0.0,
            exact: None,
            estimate: Some(e),
            tail_bound: survival_tail_bound(process, cfg.horizon),
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    let mut notes = String::new();
    if let Some(last) = rows.last() {
        write!(notes, "survival: N={} estimate {}", last.big_n, last.value()).unwrap();
        if let Some(b) = last.tail_bound {
            write!(notes, ", truncation bias <= {b:e}").unwrap();
        }
        notes.push('\n');
    }
    Ok(Rendered {
        body: render_values(&rows, cfg, true),
        notes,
        passed,
    })
}

pub fn birkhoff(process: &Process, cfg: &RunConfig) -> CommandResult {
    let report = birkhoff::trajectories(process, cfg.n_max, cfg.trials, cfg.seed)?;
    let targets = birkhoff::conditional_mean(process)?;
    let a_eps = birkhoff::estimate_a_epsilon(process, &AEpsilon::new(cfg.epsilon, cfg.n_max), &mc(cfg))?;
    let deviating = report.fraction_deviating(BIRKHOFF_TOLERANCE);
    let passed = deviating <= BIRKHOFF_MAX_DEVIATING;
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("trial,component,n,avg\n");
            for row in &report.rows {
                for (n, avg) in report.grid.iter().zip(&row.averages) {
                    writeln!(s, "{},{},{n},{avg}", row.trial, row.component).unwrap();
                }
            }
            s
        }
        Format::Json => json_body(json!({
            "grid": report.grid,
            "targets": targets,
            "rows": report.rows,
            "deviating_fraction": deviating,
            "a_epsilon": a_eps,
            "pass": passed,
        })),
    };
    let notes = format!(
        "birkhoff: deviating fraction {deviating} (tolerance {BIRKHOFF_TOLERANCE}, n={}); \
         A_eps(eps={}) estimate {} (se {})\n",
        cfg.n_max,
        cfg.epsilon,
        a_eps.mean,
        a_eps.std_error
    );
    Ok(Rendered { body, notes, passed })
}
