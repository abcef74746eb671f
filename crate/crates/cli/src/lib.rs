//! Front end for `spc`: run programs, format results, check the bundled corpus.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use spc_core::engine::{count, RunOptions};
use spc_core::lang::{load, Program};
use spc_core::result::{Backend, CountResult};
use spc_core::scalar::{fmt_decimal, fmt_float, parse_rational};
use spc_core::semiring::{Ext, Value};
use spc_core::Error;

/// Exit status for a program that fails to parse.
pub const EXIT_DIAGNOSTICS: i32 = 1;
/// Exit status for an engine error.
pub const EXIT_ENGINE: i32 = 2;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_DIAGNOSTICS,
        _ => EXIT_ENGINE,
    }
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<(Program, CountResult), Error> {
    let p = load(path)?;
    let r = count(&p, opts)?;
    Ok((p, r))
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => json!({"kind": "bool", "bool": b}),
        Value::Num(Ext::Fin(r)) => json!({
            "kind": "rational",
            "numerator": r.numer().to_string(),
            "denominator": r.denom().to_string(),
            "float": spc_core::Scalar::to_f64(r),
        }),
        Value::Num(Ext::PosInf) => json!({"kind": "inf"}),
        Value::Num(Ext::NegInf) => json!({"kind": "-inf"}),
        Value::Float(x) if x.is_finite() => json!({"kind": "float", "float": x}),
        Value::Float(x) => json!({"kind": "float", "float": fmt_float(*x)}),
        Value::Pair(a, b) => json!({"kind": "pair", "pair": [value_json(a), value_json(b)]}),
    }
}

/// The JSON document printed by `spc run --json`.
pub fn result_json(program: &str, r: &CountResult) -> Json {
    let mut doc = json!({
        "program": program,
        "backend": r.backend.name(),
        "value": value_json(&r.value),
        "exact": r.exact,
        "stats": r.stats,
    });
    if let Some(w) = &r.witness {
        doc["witness"] = json!(w.literals());
    }
    if let Some(se) = r.std_error {
        doc["std_error"] = json!(se);
    }
    if !r.flags.is_empty() {
        doc["flags"] = json!(r.flags);
    }
    doc
}

/// `2/5 (0.4)` for proper fractions, plain text otherwise.
pub fn value_text(v: &Value) -> String {
    match v {
        Value::Num(Ext::Fin(r)) if !r.is_integer() => format!("{} ({})", v, fmt_decimal(r)),
        Value::Pair(a, b) => format!("({}, {})", value_text(a), value_text(b)),
        _ => v.to_string(),
    }
}

pub fn result_text(r: &CountResult) -> String {
    let mut out = format!("value: {}\n", value_text(&r.value));
    if let Some(se) = r.std_error {
        out.push_str(&format!("std_error: {}\n", fmt_float(se)));
    }
    if let Some(w) = &r.witness {
        out.push_str(&format!("witness: {w}\n"));
    }
    out.push_str(&format!("exact: {}\nbackend: {}\n", r.exact, r.backend));
    for f in &r.flags {
        out.push_str(&format!("flag: {f}\n"));
    }
    if let Json::Object(stats) = json!(r.stats) {
        let parts: Vec<String> = stats.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if !parts.is_empty() {
            out.push_str(&format!("stats: {}\n", parts.join(" ")));
        }
    }
    out
}

/// One entry of `expected.toml`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Case {
    pub file: String,
    /// Expected value as printed, e.g. `6`, `2/5`, `(0, 3/10)`.
    pub value: String,
    pub witness: Option<String>,
    pub backend: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Absolute tolerance; exact comparison when absent.
    pub tol: Option<f64>,
    #[serde(default)]
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Expected {
    #[serde(rename = "case")]
    pub cases: Vec<Case>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub file: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Where the bundled corpus lives: `SPC_CORPUS_DIR`, else the source tree.
pub fn corpus_dir() -> PathBuf {
    std::env::var_os("SPC_CORPUS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus"))
}

pub fn load_expected(dir: &Path) -> Result<Expected, String> {
    let path = dir.join("expected.toml");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn close(actual: &Value, expected: &str, tol: f64) -> bool {
    let exp = expected.trim();
    match actual {
        Value::Pair(a, b) => {
            let inner = exp.strip_prefix('(').and_then(|s| s.strip_suffix(')'));
            match inner.and_then(|s| s.split_once(',')) {
                Some((x, y)) => close(a, x, tol) && close(b, y, tol),
                None => false,
            }
        }
        _ => match (actual.as_f64(), parse_rational(exp)) {
            (Some(x), Some(r)) => (x - spc_core::Scalar::to_f64(&r)).abs() <= tol,
            _ => actual.to_string() == exp,
        },
    }
}

pub fn check_case(dir: &Path, case: &Case) -> CaseReport {
    let mut report = CaseReport {
        file: case.file.clone(),
        passed: false,
        expected: case.value.clone(),
        actual: String::new(),
        message: None,
    };
    let mut opts = RunOptions::default();
    if let Some(b) = &case.backend {
        match b.parse::<Backend>() {
            Ok(b) => opts.backend = b,
            Err(e) => {
                report.message = Some(e);
                return report;
            }
        }
    }
    opts.samples = case.samples.unwrap_or(opts.samples);
    opts.seed = case.seed.unwrap_or(opts.seed);
    let r = match run_file(&dir.join(&case.file), &opts) {
        Ok((_, r)) => r,
        Err(e) => {
            report.actual = "error".into();
            report.message = Some(e.to_string());
            return report;
        }
    };
    report.actual = r.value.to_string();
    let value_ok = match case.tol {
        Some(t) => close(&r.value, &case.value, t),
        None => report.actual == case.value,
    };
    let witness_ok = match &case.witness {
        None => true,
        Some(w) => r.witness.as_ref().map(|x| x.to_string()).as_deref() == Some(w.as_str()),
    };
    let flags_ok = case.flags.iter().all(|f| r.has_flag(f));
    report.passed = value_ok && witness_ok && flags_ok;
    if !witness_ok {
        report.message = Some(format!(
            "witness {} != {}",
            r.witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into()),
            case.witness.as_deref().unwrap_or_default()
        ));
    } else if !flags_ok {
        report.message = Some(format!("flags {:?} lack {:?}", r.flags, case.flags));
    }
    report
}

/// Runs every case in `dir/expected.toml`, in file order.
pub fn check_corpus(dir: &Path) -> Result<Vec<CaseReport>, String> {
    let expected = load_expected(dir)?;
    Ok(expected.cases.par_iter().map(|c| check_case(dir, c)).collect())
}

/// Reads a numeric CSV matrix; entries may be integers, decimals or `n/d`.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<BigRational>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let row = rec
            .iter()
            .map(|f| parse_rational(f).ok_or_else(|| format!("{}:{}: `{f}` is not a number", path.display(), i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}
