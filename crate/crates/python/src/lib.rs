//! Python bindings. Terms and theories cross the boundary as text.
//! Theory arguments are either `@name` for a bundled theory or theory source.

use termsat::analysis::{cost_function, sign_of, SignAnalysis};
use termsat::classical::parse_strategy;
use termsat::rules::{parse_theory, Theory};
use termsat::saturation::{prove_equal, simplify as saturate_simplify, SaturationParams, SchedulerKind};
use termsat::theories::{bundled, stream_optimize, BUNDLED};
use termsat::{parse_term, Term};

pub fn load_theories(specs: &[String]) -> Result<Theory, String> {
    let mut parts = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let th = match spec.strip_prefix('@') {
            Some(name) => bundled(name).ok_or_else(|| format!("no bundled theory `{name}`"))?,
            None => parse_theory(&format!("t{i}"), spec).map_err(|e| e.to_string())?,
        };
        parts.push(th);
    }
    Theory::concat("py", &parts).map_err(|e| e.to_string())
}

fn term(src: &str) -> Result<Term, String> {
    parse_term(src).map_err(|e| e.to_string())
}

pub fn params(timeout: usize, enodelimit: usize, scheduler: &str) -> Result<SaturationParams, String> {
    let scheduler = match scheduler {
        "simple" => SchedulerKind::Simple,
        "backoff" => SchedulerKind::Backoff { ban_length: 5 },
        other => return Err(format!("unknown scheduler `{other}`")),
    };
    Ok(SaturationParams {
        timeout,
        enodelimit,
        scheduler,
        ..Default::default()
    })
}

/// Returns the extracted term and the JSON report.
pub fn simplify_text(expr: &str, theories: &[String], cost: &str, p: &SaturationParams) -> Result<(String, String), String> {
    let t = term(expr)?;
    let th = load_theories(theories)?;
    let cf = cost_function(cost).ok_or_else(|| format!("unknown cost function `{cost}`"))?;
    let (best, report) = saturate_simplify(&t, &th, p, cf.as_ref()).map_err(|e| e.to_string())?;
    Ok((best.to_string(), report.to_json().to_string()))
}

pub fn prove_text(a: &str, b: &str, theories: &[String], p: &SaturationParams) -> Result<bool, String> {
    let th = load_theories(theories)?;
    let (equal, _) = prove_equal(&term(a)?, &term(b)?, &th, p).map_err(|e| e.to_string())?;
    Ok(equal)
}

pub fn rewrite_text(expr: &str, theories: &[String], strategy: &str) -> Result<String, String> {
    let t = term(expr)?;
    let th = load_theories(theories)?;
    let s = parse_strategy(strategy, &th, false).map_err(|e| e.to_string())?;
    Ok(s.rewriter.rewrite(&t).unwrap_or(t).to_string())
}

pub fn sign_text(expr: &str, assume: &[String]) -> Result<String, String> {
    let mut a = SignAnalysis::default();
    for spec in assume {
        a.assume_spec(spec)?;
    }
    Ok(sign_of(&term(expr)?, a).map_err(|e| e.to_string())?.to_string())
}

pub fn optimize_stream_text(expr: &str, p: &SaturationParams) -> Result<String, String> {
    Ok(stream_optimize(&term(expr)?, p).map_err(|e| e.to_string())?.to_string())
}

pub fn bundled_names() -> Vec<String> {
    BUNDLED.iter().map(|(n, _)| n.to_string()).collect()
}

#[pyo3::pymodule]
mod termsat_py {
    use pyo3::exceptions::PyValueError;
    use pyo3::prelude::*;

    fn value_err(e: String) -> PyErr {
        PyValueError::new_err(e)
    }

    /// Saturates `expr` and returns `(term, report_json)`.
    #[pyfunction]
    #[pyo3(signature = (expr, theories, cost = "astsize", timeout = 8, enodelimit = 15000, scheduler = "backoff"))]
    fn simplify(
        py: Python<'_>,
        expr: &str,
        theories: Vec<String>,
        cost: &str,
        timeout: usize,
        enodelimit: usize,
        scheduler: &str,
    ) -> PyResult<(String, String)> {
        let p = super::params(timeout, enodelimit, scheduler).map_err(value_err)?;
        py.detach(|| super::simplify_text(expr, &theories, cost, &p)).map_err(value_err)
    }

    /// True when saturation puts `a` and `b` in the same class.
    #[pyfunction]
    #[pyo3(signature = (a, b, theories, timeout = 8, enodelimit = 15000, scheduler = "backoff"))]
    fn prove(
        py: Python<'_>,
        a: &str,
        b: &str,
        theories: Vec<String>,
        timeout: usize,
        enodelimit: usize,
        scheduler: &str,
    ) -> PyResult<bool> {
        let p = super::params(timeout, enodelimit, scheduler).map_err(value_err)?;
        py.detach(|| super::prove_text(a, b, &theories, &p)).map_err(value_err)
    }

    #[pyfunction]
    #[pyo3(signature = (expr, theories, strategy = termsat::classical::DEFAULT_STRATEGY))]
    fn rewrite(expr: &str, theories: Vec<String>, strategy: &str) -> PyResult<String> {
        super::rewrite_text(expr, &theories, strategy).map_err(value_err)
    }

    /// Sign of `expr` as "+1", "-1", "0", "unknown" or "NaN".
    #[pyfunction]
    #[pyo3(signature = (expr, assume = Vec::new()))]
    fn sign(expr: &str, assume: Vec<String>) -> PyResult<String> {
        super::sign_text(expr, &assume).map_err(value_err)
    }

    #[pyfunction]
    #[pyo3(signature = (expr, timeout = 8))]
    fn optimize_stream(py: Python<'_>, expr: &str, timeout: usize) -> PyResult<String> {
        let p = super::params(timeout, 15000, "backoff").map_err(value_err)?;
        py.detach(|| super::optimize_stream_text(expr, &p)).map_err(value_err)
    }

    #[pyfunction]
    fn bundled_theories() -> Vec<String> {
        super::bundled_names()
    }
}
