//! Python bindings. Rationals cross the boundary as `"p/q"` strings so that
//! thresholds such as `θ = 1/(1-v̂)` stay exact.

use betadim::bary::{self, DigitSet};
use betadim::beta_shift::{parry_invert as invert, BetaSystem};
use betadim::constructions::{BaryPlan, ConstructionSpec, FillPolicy, ScheduledRuns};
use betadim::measures_dim as md;
use betadim::numerics::{format_rational, parse_rational};
use betadim::words::UltimatelyPeriodicWord;
use num_bigint::BigUint;
use num_rational::BigRational;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn err(e: betadim::Error) -> PyErr {
    if e.is_precision() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rat(s: &str) -> PyResult<BigRational> {
    parse_rational(s).map_err(err)
}

/// Digit lists come back as Python lists rather than `bytes`.
fn list(d: Vec<u8>) -> Vec<u32> {
    d.into_iter().map(u32::from).collect()
}

fn system(spec: &str) -> PyResult<BetaSystem> {
    BetaSystem::parse(spec).map_err(err)
}

/// `(θ-1-θv̂)/((1+θv̂)(θ-1))` as an exact `"p/q"` string.
#[pyfunction]
fn dim_formula(theta: &str, v_hat: &str) -> PyResult<String> {
    let v = rat(v_hat)?;
    let f = if theta.trim() == "inf" {
        md::dim_formula_at_infinity(&v)
    } else {
        md::dim_formula(&rat(theta)?, &v)
    };
    f.map(|q| format_rational(&q)).map_err(err)
}

/// `(θ₀, sup)` with `θ₀ = 2/(1-v̂)`; raises if the certificate fails.
#[pyfunction]
fn dim_sup(v_hat: &str) -> PyResult<(String, String)> {
    let r = md::dim_sup(&rat(v_hat)?, 200).map_err(err)?;
    if !r.holds() {
        return Err(PyArithmeticError::new_err("supremum certificate failed"));
    }
    Ok((format_rational(&r.theta0), format_rational(&r.value)))
}

/// Number of admissible words of length `n`.
#[pyfunction]
fn count_admissible(beta: &str, n: usize) -> PyResult<BigUint> {
    system(beta)?.count_admissible(n).map_err(err)
}

#[pyfunction]
fn is_admissible(beta: &str, word: Vec<u8>) -> PyResult<bool> {
    system(beta)?.is_admissible(&word).map_err(err)
}

/// First `n` digits of `d*_β(1)`, or of `d_β(1)` when `greedy`.
#[pyfunction]
#[pyo3(signature = (beta, n, greedy = false))]
fn expansion_of_one(beta: &str, n: usize, greedy: bool) -> PyResult<Vec<u32>> {
    let b = system(beta)?;
    let d = if greedy { b.d1_prefix(n) } else { b.expansion_of_one_star(n) };
    d.map(list).map_err(err)
}

/// Greedy β-digits of the rational `x`.
#[pyfunction]
fn greedy_expand(beta: &str, x: &str, n: usize) -> PyResult<Vec<u32>> {
    system(beta)?.greedy_expand(&rat(x)?, n).map(list).map_err(err)
}

#[pyfunction]
fn expand_rational(p: u64, q: u64, base: u32, n: usize) -> PyResult<Vec<u32>> {
    bary::expand_rational(p, q, base, n).map(list).map_err(err)
}

/// `(v, v̂)` estimates of a digit sequence, as `"p/q"` strings.
#[pyfunction]
fn estimate_exponents(digits: Vec<u8>, base: u32) -> PyResult<(String, String)> {
    let e = bary::estimate_or_zero(&digits, base).map_err(err)?;
    Ok((format_rational(&e.v), format_rational(&e.v_hat)))
}

/// Digits of a seeded point of the b-ary (or restricted, with `digits`) construction.
#[pyfunction]
#[pyo3(signature = (theta, v_hat, base, depth, seed = 0, digits = None))]
fn generate_bary(theta: &str, v_hat: &str, base: u32, depth: u64, seed: u64, digits: Option<Vec<u8>>) -> PyResult<Vec<u32>> {
    let spec = ConstructionSpec::new(rat(theta)?, rat(v_hat)?, FillPolicy::Seeded(seed), depth);
    let set = digits.map(|d| DigitSet::new(base, &d)).transpose().map_err(err)?;
    let plan = BaryPlan::new(&spec, base, set.as_ref()).map_err(err)?;
    let mut out = Vec::with_capacity(depth as usize);
    plan.stream(&spec.fill, depth, |c| out.extend_from_slice(c)).map_err(err)?;
    Ok(list(out))
}

/// Checkpoint ratios `[(k, lo, hi)]` and the expected limit `(lo, hi)`.
#[pyfunction]
#[pyo3(signature = (theta, v_hat, base, stages, digits = None))]
#[allow(clippy::type_complexity)]
fn local_dimension(
    theta: &str,
    v_hat: &str,
    base: u32,
    stages: usize,
    digits: Option<Vec<u8>>,
) -> PyResult<(Vec<(usize, f64, f64)>, (f64, f64))> {
    let runs = ScheduledRuns::new(&rat(theta)?, &rat(v_hat)?, stages, if base == 2 { 2 } else { 1 }).map_err(err)?;
    let set = digits.map(|d| DigitSet::new(base, &d)).transpose().map_err(err)?;
    let tol = BigRational::new(1.into(), 100.into());
    let rep = md::local_dimension_bary(&runs, base, set.as_ref(), stages, &tol, 256).map_err(err)?;
    let traj = rep
        .trajectory
        .iter()
        .map(|p| {
            let (lo, hi) = p.ratio.to_f64();
            (p.k, lo, hi)
        })
        .collect();
    Ok((traj, rep.limit.to_f64()))
}

/// Enclosure `(lo, hi)` of the base whose expansion of 1 is `word`, e.g. `"(10)"`.
#[pyfunction]
#[pyo3(signature = (word, bits = 128))]
fn parry_invert(word: &str, bits: u32) -> PyResult<(f64, f64)> {
    let w = UltimatelyPeriodicWord::parse(word).map_err(err)?;
    let r = invert(&w).map_err(err)?.refine(bits).map_err(err)?;
    Ok((r.lo_f64(), r.hi_f64()))
}

#[pymodule]
#[pyo3(name = "betadim")]
fn betadim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", betadim::VERSION)?;
    m.add_function(wrap_pyfunction!(dim_formula, m)?)?;
    m.add_function(wrap_pyfunction!(dim_sup, m)?)?;
    m.add_function(wrap_pyfunction!(count_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(expansion_of_one, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_expand, m)?)?;
    m.add_function(wrap_pyfunction!(expand_rational, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(generate_bary, m)?)?;
    m.add_function(wrap_pyfunction!(local_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(parry_invert, m)?)?;
    Ok(())
}
