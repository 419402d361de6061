use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use zeta_floor::curve::{phi_injection_holds, satisfies_eq4, Curve, CurvePoint, ExceptionRecord};
use zeta_floor::error::{CheckError, CurveError, EnclosureError};
use zeta_floor::poly::{
    exponent_bound_holds, g_decreasing_check, h_monotonicity_check, inequality2_check, lemma41_certificate,
    lemma41_negativity_check,
};
use zeta_floor::report::{write_csv_with_columns, TailRow, VerdictRow};
use zeta_floor::tail::TailEnclosure;
use zeta_floor::{exceptional_set, TailEvaluator, TailMethod, Verdict, Verifier};

use crate::config::{command_name, Command, Format, RunConfig, UsageError};

/// Worst outcome seen during a run; orders like the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Undecided,
    Fails,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fails => 1,
            Status::Undecided => 2,
        }
    }

    fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Holds => Status::Ok,
            Verdict::Fails => Status::Fails,
            Verdict::Undecided => Status::Undecided,
        }
    }

    fn of_check(r: &Result<bool, CheckError>) -> Status {
        match r {
            Ok(true) => Status::Ok,
            Ok(false) => Status::Fails,
            Err(CheckError::Undecided(_)) => Status::Undecided,
            Err(_) => Status::Fails,
        }
    }
}

pub struct Outcome {
    /// The report, exactly as written.
    pub body: String,
    /// One-line human summary.
    pub summary: String,
    pub status: Status,
}

/// A report's tabular part and its JSON result.
struct Table {
    columns: &'static [&'static str],
    rows: Vec<Value>,
}

struct Produced {
    result: Value,
    table: Table,
    summary: String,
    status: Status,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, UsageError> {
    let produced = match cfg.command {
        Command::Tail => tail(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Scan => scan(cfg)?,
        Command::Curve => curve(cfg)?,
        Command::Exceptions => exceptions(cfg)?,
        Command::Certify => certify(cfg)?,
    };
    let body = render(cfg, &produced)?;
    Ok(Outcome { body, summary: produced.summary, status: produced.status })
}

fn rows<T: Serialize>(items: &[T]) -> Vec<Value> {
    items.iter().map(|r| serde_json::to_value(r).expect("serializable row")).collect()
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn render(cfg: &RunConfig, produced: &Produced) -> Result<String, UsageError> {
    let tool = format!("zeta-floor {}", env!("CARGO_PKG_VERSION"));
    let config = serde_json::to_value(cfg).expect("serializable config");
    match cfg.format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            if !cfg.no_header {
                doc.insert("generated_unix".into(), json!(unix_seconds()));
            }
            doc.insert("tool".into(), json!(tool));
            doc.insert("config".into(), config);
            doc.insert("result".into(), produced.result.clone());
            let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut out = Vec::new();
            if !cfg.no_header {
                out.extend(format!("# {tool} generated_unix={}\n", unix_seconds()).bytes());
            }
            out.extend(format!("# config: {}\n", serde_json::to_string(&config).expect("json")).bytes());
            let flat: Vec<Vec<String>> = produced
                .table
                .rows
                .iter()
                .map(|row| produced.table.columns.iter().map(|c| cell(&row[*c])).collect())
                .collect();
            write_csv_with_columns(&flat, produced.table.columns, &mut out)
                .map_err(|e| UsageError::new(format!("csv: {e}")))?;
            Ok(String::from_utf8(out).expect("utf-8 csv"))
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn tail(cfg: &RunConfig) -> Result<Produced, UsageError> {
    let s = cfg.s.expect("resolved");
    let n = cfg.n.expect("resolved");
    let kind = cfg.kind.expect("resolved").into();
    let policy = cfg.policy()?;
    let eval = TailEvaluator::new(s);
    let (enclosure, converged) = match eval.enclosure(kind, n, cfg.target_radius, &policy) {
        Ok(e) => (e, true),
        Err(EnclosureError::PrecisionExhausted { ball, bits }) => {
            let e = TailEnclosure { kind, n, s, value: *ball, method: TailMethod::Accelerated, precision_bits: bits };
            (e, false)
        }
        Err(e) => return Err(UsageError::new(e.to_string())),
    };
    let row = TailRow::from(&enclosure);
    let mut result = serde_json::to_value(&row).expect("json");
    result["converged"] = json!(converged);
    let summary = format!(
        "{} n={n} s={s}: {} +/- {:.3e}{}",
        json!(row.kind).as_str().unwrap_or_default(),
        row.midpoint_text,
        row.radius,
        if converged { "" } else { " (target radius not reached)" }
    );
    Ok(Produced {
        result,
        table: Table {
            columns: &["kind", "n", "s", "midpoint", "radius", "lower", "upper", "midpoint_text", "method", "precision_bits"],
            rows: rows(&[row]),
        },
        summary,
        status: if converged { Status::Ok } else { Status::Undecided },
    })
}

const VERDICT_COLUMNS: &[&str] = &["n", "lhs_floor", "rhs_floor", "verdict", "precision_used"];

fn verify(cfg: &RunConfig) -> Result<Produced, UsageError> {
    let s = cfg.s.expect("resolved");
    let record = Verifier::new(s, cfg.policy()?).verify(cfg.n.expect("resolved"));
    let lhs = record.lhs_floor.map_or_else(|| "undecided".to_string(), |v| v.to_string());
    let summary = format!("{}, lhs={lhs}, rhs={}", record.verdict, record.rhs_floor);
    Ok(Produced {
        result: serde_json::to_value(&record).expect("json"),
        table: Table { columns: VERDICT_COLUMNS, rows: rows(&[VerdictRow::from(&record)]) },
        summary,
        status: Status::of_verdict(record.verdict),
    })
}

fn scan(cfg: &RunConfig) -> Result<Produced, UsageError> {
    let s = cfg.s.expect("resolved");
    let n_max = cfg.n_max.expect("resolved");
    let report = Verifier::new(s, cfg.policy()?)
        .scan(n_max)
        .map_err(|e| UsageError::new(e.message().to_string()))?;
    let holds = report.records.iter().filter(|r| r.verdict == Verdict::Holds).count();
    let mut result = serde_json::to_value(&report).expect("json");
    result["holds"] = json!(holds);
    let status = if !report.exceptions.is_empty() {
        Status::Fails
    } else if !report.undecided.is_empty() {
        Status::Undecided
    } else {
        Status::Ok
    };
    let summary = format!(
        "s={s} n_max={n_max}: holds={holds} fails={} undecided={} empirical_N={}",
        report.exceptions.len(),
        report.undecided.len(),
        report.empirical_n
    );
    let table_rows: Vec<VerdictRow> = report.records.iter().map(VerdictRow::from).collect();
    Ok(Produced { result, table: Table { columns: VERDICT_COLUMNS, rows: rows(&table_rows) }, summary, status })
}

/// Beyond this `p` the full range of `m` is too large to enumerate by default.
const ALL_M_MAX_P: u32 = 17;

fn curve(cfg: &RunConfig) -> Result<Produced, UsageError> {
    let p = cfg.p[0];
    let y_bound = cfg.y_bound.expect("resolved");
    let ms: Vec<i64> = match cfg.m {
        Some(m) => vec![m],
        None if p <= ALL_M_MAX_P && p >= 5 => (1..(1i64 << (p - 1))).collect(),
        None if p < 5 => return Err(UsageError::new(format!("p must be odd and at least 5, got {p}"))),
        None => return Err(UsageError::new(format!("curve needs --m when p > {ALL_M_MAX_P}"))),
    };
    let mut points = Vec::new();
    let mut mirror_closed = true;
    for &m in &ms {
        let c = Curve::stated(p, m).map_err(|e| UsageError::new(e.message().to_string()))?;
        let found = c.points(y_bound).map_err(|e| UsageError::new(e.message().to_string()))?;
        mirror_closed &= found.iter().all(|&(x, y)| found.contains(&(x, -1 - y)));
        points.extend(found.into_iter().map(|(x, y)| CurvePoint { p, m, x, y }));
    }
    let eq4_holds = points.iter().all(satisfies_eq4);
    let status = if mirror_closed && eq4_holds { Status::Ok } else { Status::Fails };
    let summary = format!(
        "p={p} m in {:?} |y| <= {y_bound}: {} points, mirror_closed={mirror_closed}, eq4_holds={eq4_holds}",
        (ms[0], ms[ms.len() - 1]),
        points.len()
    );
    let result = json!({
        "curves_scanned": ms.len(),
        "points": rows(&points),
        "mirror_closed": mirror_closed,
        "eq4_holds": eq4_holds,
    });
    Ok(Produced { result, table: Table { columns: &["p", "m", "x", "y"], rows: rows(&points) }, summary, status })
}

fn exceptions(cfg: &RunConfig) -> Result<Produced, UsageError> {
    let n_max = cfg.n_max.expect("resolved");
    let mut per_p = Vec::new();
    let mut all: Vec<ExceptionRecord> = Vec::new();
    let mut status = Status::Ok;
    let mut parts = Vec::new();
    for &p in &cfg.p {
        match exceptional_set(p, n_max) {
            Ok(records) => {
                let phi = phi_injection_holds(p, &records);
                if !phi {
                    status = status.max(Status::Fails);
                }
                parts.push(format!("p={p}: {} exceptional n, injection {}", records.len(), if phi { "ok" } else { "FAILED" }));
                per_p.push(json!({ "p": p, "n_max": n_max, "records": rows(&records), "phi_injection": phi }));
                all.extend(records);
            }
            Err(CurveError::Argument(e)) => return Err(UsageError::new(e.message().to_string())),
            Err(e @ CurveError::MultipleWitnesses { .. }) => {
                status = Status::Fails;
                parts.push(format!("p={p}: {e}"));
                per_p.push(json!({ "p": p, "n_max": n_max, "error": e.to_string() }));
            }
        }
    }
    Ok(Produced {
        result: json!({ "per_p": per_p }),
        table: Table { columns: &["p", "n", "a", "m"], rows: rows(&all) },
        summary: parts.join("; "),
        status,
    })
}

const H_GRID: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];
const G_GRID: [f64; 4] = [2.0, 3.0, 4.0, 10.0];
const INEQ_ALPHAS: [f64; 4] = [8.0, 16.0, 64.0, 256.0];
const NEG_ALPHA_MAX: f64 = 200.0;

fn check_json(r: &Result<bool, CheckError>) -> Value {
    match r {
        Ok(v) => json!(v),
        Err(e) => json!(e.to_string()),
    }
}

fn certify(cfg: &RunConfig) -> Result<Produced, UsageError> {
    if let Some(p) = cfg.p.iter().find(|&&p| p < 5) {
        return Err(UsageError::new(format!("certify needs p >= 5, got {p}")));
    }
    let cert = lemma41_certificate();
    let mut status = if cert.all_match() { Status::Ok } else { Status::Fails };
    let mut checks = Vec::new();
    for &p in &cfg.p {
        let negativity = lemma41_negativity_check(&[p], 8.0, NEG_ALPHA_MAX);
        let h = h_monotonicity_check(p, &H_GRID);
        let g = g_decreasing_check(p, &G_GRID);
        let ineq: Vec<Result<bool, CheckError>> = INEQ_ALPHAS.iter().map(|&a| inequality2_check(p, a)).collect();
        let bound = exponent_bound_holds(p);
        for r in [&negativity, &h, &g].into_iter().chain(ineq.iter()) {
            status = status.max(Status::of_check(r));
        }
        if !bound {
            status = Status::Fails;
        }
        checks.push(json!({
            "p": p,
            "negative_on_alpha_8_to_200": check_json(&negativity),
            "h_sum_increasing_below_2": { "grid": H_GRID, "holds": check_json(&h) },
            "g_decreasing_f_positive": { "grid": G_GRID, "holds": check_json(&g) },
            "inequality_2": INEQ_ALPHAS.iter().zip(&ineq).map(|(a, r)| json!({ "alpha": a, "holds": check_json(r) })).collect::<Vec<_>>(),
            "exponent_below_7_3": bound,
        }));
    }
    let summary = format!(
        "{} of {} coefficient rows match, even degrees vanish: {}; checks for p = {:?}: {}",
        cert.matched,
        cert.rows.len(),
        cert.even_degrees_vanish,
        cfg.p,
        if status == Status::Ok { "all pass" } else { "see report" }
    );
    Ok(Produced {
        result: json!({ "certificate": cert, "all_match": cert.all_match(), "checks": checks }),
        table: Table { columns: &["alpha_degree", "computed", "expected", "matches"], rows: rows(&cert.rows) },
        summary: format!("{}: {summary}", command_name(cfg.command)),
        status,
    })
}
