//! Python bindings for the detbell library: exact matrices over the four
//! coefficient domains, every determinant/permanent formula, the counting
//! functions, decomposition building/verification, rank bounds, the tiling
//! volume, and the GF(2) rank-1 search.
//!
//! Exact values cross the boundary as strings (integers and reduced
//! fractions), counts as Python ints.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use detbell::combinatorics;
use detbell::det_formulas::{self, FormulaKind, Target};
use detbell::f2_search::{self, PackedF2Matrix, SearchConfig, SearchOutcome};
use detbell::geometry::{self, AdmissibleMatrix};
use detbell::scalar::{Domain, Matrix as CoreMatrix};
use detbell::tensor_decomp::{self, Verdict};
use detbell::waring;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_domain(s: &str) -> PyResult<Domain> {
    s.parse().map_err(value_err)
}

fn parse_kind(s: &str) -> PyResult<FormulaKind> {
    s.parse().map_err(value_err)
}

/// An exact square matrix over Z, Q, Fp:<p> or F2.
#[pyclass(name = "Matrix")]
struct PyMatrix {
    inner: CoreMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Build from rows of entry strings (fractions as "a/b") and a domain
    /// tag.
    #[new]
    #[pyo3(signature = (rows, domain = "Z"))]
    fn new(rows: Vec<Vec<String>>, domain: &str) -> PyResult<Self> {
        let domain = parse_domain(domain)?;
        let n = rows.len();
        let mut text = format!("{n} {domain}\n");
        for row in &rows {
            if row.len() != n {
                return Err(PyValueError::new_err("matrix must be square"));
            }
            text.push_str(&row.join(" "));
            text.push('\n');
        }
        Ok(PyMatrix {
            inner: CoreMatrix::parse_text(&text).map_err(value_err)?,
        })
    }

    /// Parse the text format used by the CLI (`n d` header, then rows).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: CoreMatrix::parse_text(text).map_err(value_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn domain(&self) -> String {
        self.inner.domain().to_string()
    }

    /// Determinant by the named formula (default: the Leibniz oracle).
    #[pyo3(signature = (formula = "leibniz"))]
    fn det(&self, formula: &str) -> PyResult<String> {
        let kind = parse_kind(formula)?;
        if kind.target() != Target::Determinant {
            return Err(PyValueError::new_err(format!(
                "{formula} computes the permanent; use per()"
            )));
        }
        Ok(det_formulas::eval(kind, &self.inner)
            .map_err(value_err)?
            .to_string())
    }

    /// Permanent by the named formula (default: the Leibniz oracle).
    #[pyo3(signature = (formula = "per-leibniz"))]
    fn per(&self, formula: &str) -> PyResult<String> {
        let kind = parse_kind(formula)?;
        if kind.target() != Target::Permanent {
            return Err(PyValueError::new_err(format!(
                "{formula} computes the determinant; use det()"
            )));
        }
        Ok(det_formulas::eval(kind, &self.inner)
            .map_err(value_err)?
            .to_string())
    }

    /// Evaluate every formula applicable in this domain; returns
    /// `{formula: (value, agrees_with_oracle)}`.
    fn compare<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        let det = det_formulas::det_leibniz(&self.inner);
        let per = det_formulas::per_leibniz(&self.inner);
        for kind in FormulaKind::ALL {
            if kind
                .admits_characteristic(self.inner.domain().characteristic())
                .is_err()
            {
                continue;
            }
            let value = det_formulas::eval(kind, &self.inner).map_err(value_err)?;
            let oracle = match kind.target() {
                Target::Determinant => &det,
                Target::Permanent => &per,
            };
            out.set_item(kind.to_string(), (value.to_string(), value == *oracle))?;
        }
        Ok(out)
    }

    /// For admissible matrices: the exact tile volume and skeleton sizes,
    /// as `(volume, vertices, edges)`.
    fn tile_report(&self) -> PyResult<(String, usize, usize)> {
        let a = AdmissibleMatrix::new(&self.inner).map_err(value_err)?;
        let sk = geometry::skeleton(&a);
        Ok((
            geometry::volume_inclusion_exclusion(&a).to_string(),
            sk.vertices.len(),
            sk.edges.len(),
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Matrix(n={}, domain={})",
            self.inner.n(),
            self.inner.domain()
        )
    }
}

#[pyfunction]
fn bell(n: usize) -> num_bigint::BigInt {
    combinatorics::bell(n)
}

#[pyfunction]
fn bell_nk(n: usize, k: usize) -> num_bigint::BigInt {
    combinatorics::bell_nk(n, k)
}

#[pyfunction]
fn stirling2(k: usize, m: usize) -> num_bigint::BigInt {
    combinatorics::stirling2(k, m)
}

/// Number of ordered partial partitions of an n-element ground set.
#[pyfunction]
fn opp_count(n: usize) -> usize {
    combinatorics::ordered_partial_partitions(n).count()
}

/// Outer-sum term count of a formula at dimension n over a domain of the
/// given characteristic.
#[pyfunction]
#[pyo3(signature = (formula, n, characteristic = 0))]
fn term_count(formula: &str, n: usize, characteristic: u64) -> PyResult<num_bigint::BigInt> {
    let kind = parse_kind(formula)?;
    det_formulas::term_count(kind, n, characteristic).map_err(value_err)
}

/// Tensor decomposition induced by a formula, as the interchange JSON
/// document.
#[pyfunction]
fn decompose_json(formula: &str, n: usize, domain: &str) -> PyResult<String> {
    let kind = parse_kind(formula)?;
    let domain = parse_domain(domain)?;
    let dec = tensor_decomp::decomposition_from_formula(kind, n, &domain).map_err(value_err)?;
    tensor_decomp::export_decomposition(&dec).map_err(value_err)
}

/// Check a decomposition document against the dense target tensor.
/// Returns `(valid, witness)`, the witness being the first mismatching
/// multi-index when invalid.
#[pyfunction]
fn verify_decomposition(doc: &str) -> PyResult<(bool, Option<Vec<usize>>)> {
    let dec = tensor_decomp::import_decomposition(doc).map_err(value_err)?;
    match tensor_decomp::expand_and_check(&dec).map_err(value_err)? {
        Verdict::Valid => Ok((true, None)),
        Verdict::Invalid { witness } => Ok((false, Some(witness))),
    }
}

#[pyfunction]
fn lower_bound_general(n: usize) -> num_bigint::BigInt {
    tensor_decomp::lower_bound_general(n)
}

#[pyfunction]
fn lower_bound_fq(n: usize, q: u64) -> PyResult<num_bigint::BigInt> {
    tensor_decomp::lower_bound_fq(n, q).map_err(value_err)
}

/// Rank of the s-flattening of the determinant or permanent tensor.
#[pyfunction]
#[pyo3(signature = (n, s, domain = "Q", target = "det"))]
fn flattening_rank(n: usize, s: usize, domain: &str, target: &str) -> PyResult<usize> {
    let domain = parse_domain(domain)?;
    let target = match target {
        "det" => Target::Determinant,
        "per" => Target::Permanent,
        other => return Err(PyValueError::new_err(format!("unknown target {other:?}"))),
    };
    tensor_decomp::flattening_rank(target, n, s, &domain).map_err(value_err)
}

/// Waring decomposition of det_n over Q: `(term_count, valid)` with the
/// verification run for n <= 4.
#[pyfunction]
fn waring_summary(n: usize) -> PyResult<(usize, bool)> {
    let w = waring::waring_from_formula(n, &Domain::Rational).map_err(value_err)?;
    let valid = if n <= 4 {
        matches!(
            waring::verify_waring(&w).map_err(value_err)?,
            waring::WaringVerdict::Valid
        )
    } else {
        true
    };
    Ok((w.rank(), valid))
}

fn parse_f2_tuple(matrices: Vec<Vec<Vec<u8>>>) -> PyResult<Vec<PackedF2Matrix>> {
    matrices
        .into_iter()
        .map(|m| {
            if m.len() != 4 || m.iter().any(|r| r.len() != 4) {
                return Err(PyValueError::new_err("matrices must be 4x4 over GF(2)"));
            }
            let mut rows = [[0u8; 4]; 4];
            for (i, r) in m.iter().enumerate() {
                for (j, &v) in r.iter().enumerate() {
                    rows[i][j] = v & 1;
                }
            }
            Ok(PackedF2Matrix::from_rows(&rows))
        })
        .collect()
}

/// The unique-hit filter on a tuple of 4x4 GF(2) matrices (given as
/// nested 0/1 lists).
#[pyfunction]
fn lemma_filter_check(matrices: Vec<Vec<Vec<u8>>>) -> PyResult<bool> {
    Ok(f2_search::lemma_filter_check(&parse_f2_tuple(matrices)?))
}

/// Pair-contraction feasibility; returns the 1-based index that becomes
/// over-constrained, or None when feasible.
#[pyfunction]
fn pair_contraction_check(matrices: Vec<Vec<Vec<u8>>>) -> PyResult<Option<usize>> {
    Ok(
        match f2_search::pair_contraction_check(&parse_f2_tuple(matrices)?) {
            f2_search::PairContractionVerdict::Feasible => None,
            f2_search::PairContractionVerdict::Infeasible { index } => Some(index),
        },
    )
}

/// Run the rank-1 tuple search. Returns a dict with the outcome and the
/// run counters.
#[pyfunction]
#[pyo3(signature = (r, lemma_filter = true, workers = 0))]
fn search_f2(py: Python<'_>, r: usize, lemma_filter: bool, workers: usize) -> PyResult<Bound<'_, PyDict>> {
    let mut config = SearchConfig::new(r);
    config.lemma_filter = lemma_filter;
    config.workers = workers;
    let result = f2_search::search(&config).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item(
        "outcome",
        match &result.outcome {
            SearchOutcome::NoSolution => "no_solution",
            SearchOutcome::Candidates(_) => "candidates",
        },
    )?;
    if let SearchOutcome::Candidates(ts) = &result.outcome {
        out.set_item("num_candidates", ts.len())?;
    }
    out.set_item("nodes_visited", result.nodes_visited)?;
    out.set_item("pruned", result.pruned)?;
    out.set_item("lemma_eliminated", result.lemma_eliminated)?;
    out.set_item("wall_millis", result.wall_millis)?;
    Ok(out)
}

#[pymodule]
fn detbell_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(bell, m)?)?;
    m.add_function(wrap_pyfunction!(bell_nk, m)?)?;
    m.add_function(wrap_pyfunction!(stirling2, m)?)?;
    m.add_function(wrap_pyfunction!(opp_count, m)?)?;
    m.add_function(wrap_pyfunction!(term_count, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_general, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_fq, m)?)?;
    m.add_function(wrap_pyfunction!(flattening_rank, m)?)?;
    m.add_function(wrap_pyfunction!(waring_summary, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_filter_check, m)?)?;
    m.add_function(wrap_pyfunction!(pair_contraction_check, m)?)?;
    m.add_function(wrap_pyfunction!(search_f2, m)?)?;
    Ok(())
}
