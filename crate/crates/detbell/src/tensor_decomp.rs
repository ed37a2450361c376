//! Tensor-rank decompositions of the determinant and permanent tensors.
//!
//! Any formula in the common outer-sum shape turns into a rank-1
//! decomposition by reading row `i`'s linear factor as a vector in the
//! `i`-th tensor slot. The verifier expands a claimed decomposition into a
//! dense order-`n` tensor and compares it entrywise against the Leibniz
//! tensor, so no decomposition is ever trusted on construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{binomial, permutations};
use crate::det_formulas::{
    for_each_permutation, formula_terms, FormulaError, FormulaKind, Target,
};
use crate::scalar::{is_prime_u64, Domain, Matrix, Scalar, ScalarError};

/// Hard cap for dense expansion: n^n cells at n = 7 is still fine, n = 8
/// is not worth supporting.
pub const MAX_DENSE_DIMENSION: usize = 7;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dense expansion is capped at n = {MAX_DENSE_DIMENSION}, got n = {0}")]
    DimensionTooLarge(usize),
    #[error("operation requires a field domain, got {0}")]
    NonFieldDomain(Domain),
    #[error("{0} is not a prime power >= 2")]
    InvalidQ(u64),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `coefficient * v_1 (x) v_2 (x) ... (x) v_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Term {
    pub coefficient: Scalar,
    pub vectors: Vec<Vec<Scalar>>,
}

/// A claimed expression of the determinant or permanent tensor as a sum
/// of rank-1 terms. The claimed rank is simply the number of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorDecomposition {
    pub n: usize,
    pub target: Target,
    pub domain: Domain,
    pub terms: Vec<Rank1Term>,
}

impl TensorDecomposition {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// First multi-index (1-based) where the expansion disagrees.
    Invalid { witness: Vec<usize> },
}

/// Builds the decomposition induced by a formula: term `k`'s vector in
/// slot `i` is the coefficient vector of row `i`'s linear factor, and the
/// outer coefficient is the formula's, embedded in the domain. Terms whose
/// embedded coefficient vanishes are dropped.
pub fn decomposition_from_formula(
    kind: FormulaKind,
    n: usize,
    domain: &Domain,
) -> Result<TensorDecomposition, TensorError> {
    let terms = formula_terms(kind, n, domain.characteristic())?;
    let glynn_scale = if kind == FormulaKind::Glynn && n >= 1 {
        let denom = Scalar::from_bigint(&(BigInt::one() << (n - 1)), domain);
        Some(Scalar::one(domain).div(&denom)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for t in &terms {
        let mut coefficient = Scalar::from_bigint(&t.coeff, domain);
        if let Some(s) = &glynn_scale {
            coefficient = coefficient.mul(s)?;
        }
        if coefficient.is_zero() {
            continue;
        }
        let vectors = t
            .rows
            .iter()
            .map(|row| row.iter().map(|&w| Scalar::from_i64(w, domain)).collect())
            .collect();
        out.push(Rank1Term {
            coefficient,
            vectors,
        });
    }
    Ok(TensorDecomposition {
        n,
        target: kind.target(),
        domain: *domain,
        terms: out,
    })
}

/// The dense determinant/permanent tensor: `sgn(sigma)` (resp. 1) at
/// permutation multi-indices, zero elsewhere. Flat layout is row-major
/// with the first tensor factor most significant.
pub fn target_tensor(target: Target, n: usize, domain: &Domain) -> Result<Vec<Scalar>, TensorError> {
    if n > MAX_DENSE_DIMENSION {
        return Err(TensorError::DimensionTooLarge(n));
    }
    let size = n.pow(n as u32);
    let mut dense = vec![Scalar::zero(domain); size.max(1)];
    for_each_permutation(n, |perm, sign| {
        let idx = perm.iter().fold(0usize, |acc, &j| acc * n + j);
        dense[idx] = match target {
            Target::Determinant if sign < 0 => Scalar::one(domain).neg(),
            _ => Scalar::one(domain),
        };
    });
    Ok(dense)
}

/// Expands the decomposition into a dense tensor.
pub fn expand_dense(d: &TensorDecomposition) -> Result<Vec<Scalar>, TensorError> {
    let n = d.n;
    if n > MAX_DENSE_DIMENSION {
        return Err(TensorError::DimensionTooLarge(n));
    }
    let size = n.pow(n as u32);
    let mut dense = vec![Scalar::zero(&d.domain); size.max(1)];
    for term in &d.terms {
        debug_assert_eq!(term.vectors.len(), n);
        add_term_rec(&mut dense, term, 0, 0, term.coefficient.clone(), n)?;
    }
    Ok(dense)
}

fn add_term_rec(
    dense: &mut [Scalar],
    term: &Rank1Term,
    slot: usize,
    flat: usize,
    acc: Scalar,
    n: usize,
) -> Result<(), TensorError> {
    if slot == n {
        dense[flat] = dense[flat].add(&acc)?;
        return Ok(());
    }
    for (j, v) in term.vectors[slot].iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        add_term_rec(dense, term, slot + 1, flat * n + j, acc.mul(v)?, n)?;
    }
    Ok(())
}

/// Expands and compares against the target tensor. On disagreement the
/// witness is the first mismatching multi-index, 1-based.
pub fn expand_and_check(d: &TensorDecomposition) -> Result<Verdict, TensorError> {
    let expanded = expand_dense(d)?;
    let want = target_tensor(d.target, d.n, &d.domain)?;
    for (idx, (got, expect)) in expanded.iter().zip(&want).enumerate() {
        if got != expect {
            let mut digits = Vec::with_capacity(d.n);
            let mut rest = idx;
            for _ in 0..d.n {
                digits.push(rest % d.n + 1);
                rest /= d.n;
            }
            digits.reverse();
            return Ok(Verdict::Invalid { witness: digits });
        }
    }
    Ok(Verdict::Valid)
}

/// Evaluates the decomposition as a formula at a concrete matrix:
/// `sum_k c_k prod_i <v_{i,k}, row_i(A)>`.
pub fn evaluate_decomposition(
    d: &TensorDecomposition,
    a: &Matrix,
) -> Result<Scalar, TensorError> {
    let mut acc = Scalar::zero(&d.domain);
    for term in &d.terms {
        let mut prod = term.coefficient.clone();
        for (i, v) in term.vectors.iter().enumerate() {
            let mut sum = Scalar::zero(&d.domain);
            for (j, w) in v.iter().enumerate() {
                if !w.is_zero() {
                    sum = sum.add(&w.mul(a.get(i, j))?)?;
                }
            }
            prod = prod.mul(&sum)?;
        }
        acc = acc.add(&prod)?;
    }
    Ok(acc)
}

/// The matrix flattening of a dense order-`n` tensor that groups the
/// first `s` factors into rows.
fn reshape(dense: &[Scalar], n: usize, s: usize) -> Vec<Vec<Scalar>> {
    assert!(s >= 1 && s < n, "row arity must be in [1, n-1]");
    let rows = n.pow(s as u32);
    let cols = n.pow((n - s) as u32);
    (0..rows)
        .map(|r| dense[r * cols..(r + 1) * cols].to_vec())
        .collect()
}

/// Rank of the `s`-flattening of the target tensor, by exact elimination.
pub fn flattening_rank(
    target: Target,
    n: usize,
    s: usize,
    domain: &Domain,
) -> Result<usize, TensorError> {
    let dense = target_tensor(target, n, domain)?;
    matrix_rank(reshape(&dense, n, s), domain)
}

/// Rank of the `s`-flattening of a decomposition's expansion.
pub fn decomposition_flattening_rank(
    d: &TensorDecomposition,
    s: usize,
) -> Result<usize, TensorError> {
    let dense = expand_dense(d)?;
    matrix_rank(reshape(&dense, d.n, s), &d.domain)
}

/// Exact rank over a field domain. Rational input is cleared to integers
/// row by row and eliminated fraction-free (Bareiss) to keep coefficients
/// small; prime fields and F2 use plain modular elimination.
pub fn matrix_rank(rows: Vec<Vec<Scalar>>, domain: &Domain) -> Result<usize, TensorError> {
    if !domain.is_field() {
        return Err(TensorError::NonFieldDomain(*domain));
    }
    if rows.is_empty() {
        return Ok(0);
    }
    match domain {
        Domain::Rational => {
            let int_rows: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|row| {
                    let mut lcm = BigInt::one();
                    for v in row {
                        if let Scalar::Rat(r) = v {
                            lcm = lcm.lcm(r.denom());
                        }
                    }
                    row.iter()
                        .map(|v| match v {
                            Scalar::Rat(r) => r.numer() * (&lcm / r.denom()),
                            _ => unreachable!("rational matrix"),
                        })
                        .collect()
                })
                .collect();
            Ok(bareiss_rank(int_rows))
        }
        _ => Ok(field_rank(rows)),
    }
}

fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn field_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = Scalar::one(&m[rank][col].domain())
            .div(&m[rank][col])
            .expect("pivot is nonzero in a field");
        for i in 0..rows {
            if i == rank || m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].mul(&inv).expect("same domain");
            for j in col..cols {
                let delta = factor.mul(&m[rank][j]).expect("same domain");
                m[i][j] = m[i][j].sub(&delta).expect("same domain");
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// The signed symmetrization basis of the antisymmetric subspace of
/// `(F^n)^(x s)`: one vector per increasing `s`-tuple from `[n]`, each the
/// signed sum over permutations of the tuple.
pub fn antisymmetric_basis(n: usize, s: usize, domain: &Domain) -> Vec<Vec<Scalar>> {
    assert!(s >= 1 && s <= n);
    let len = n.pow(s as u32);
    let mut basis = Vec::new();
    let mut tuple: Vec<usize> = (0..s).collect();
    loop {
        let mut vec = vec![Scalar::zero(domain); len];
        for perm in permutations(s) {
            let idx = perm.iter().fold(0usize, |acc, &k| acc * n + tuple[k]);
            let sign = perm_sign(&perm);
            vec[idx] = if sign < 0 {
                Scalar::one(domain).neg()
            } else {
                Scalar::one(domain)
            };
        }
        basis.push(vec);
        // next increasing tuple
        let mut i = s;
        loop {
            if i == 0 {
                debug_assert_eq!(basis.len(), binomial(n, s).to_usize().unwrap());
                return basis;
            }
            i -= 1;
            if tuple[i] < n - (s - i) {
                tuple[i] += 1;
                for j in i + 1..s {
                    tuple[j] = tuple[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn perm_sign(perm: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Field-independent lower bound `C(n, floor(n/2)) + 1` on the rank of
/// the determinant and permanent tensors.
pub fn lower_bound_general(n: usize) -> BigInt {
    binomial(n, n / 2) + 1
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if is_prime_u64(q) {
        return true;
    }
    let mut p = 2u64;
    loop {
        if p.saturating_mul(p) > q {
            return false; // q > 1 with no factor <= sqrt(q) is prime, handled above
        }
        if q % p == 0 {
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
            }
            return rest == 1;
        }
        p += 1;
    }
}

/// Lower bound on the rank of the n x n determinant tensor over the field
/// with `q` elements.
///
/// For `n >= 5` this is the least integer `r` with `r + 1 <= q^(r - C)`
/// where `C = C(n, floor(n/2))` (a monotone integer search, so no
/// transcendental solving is needed); the `n = 4` case uses the weaker
/// inequality `r + 2 <= 2 q^(r - 6)` forced by rank-2 antisymmetric
/// tensors. For `n <= 3` the finite-field refinement adds nothing and the
/// field-independent bound is returned.
pub fn lower_bound_fq(n: usize, q: u64) -> Result<BigInt, TensorError> {
    if !is_prime_power(q) {
        return Err(TensorError::InvalidQ(q));
    }
    if n <= 3 {
        return Ok(lower_bound_general(n));
    }
    let c = binomial(n, n / 2).to_u64().expect("desk-scale binomial");
    let mut r = c + 1;
    loop {
        let power = BigInt::from(q).pow((r - c) as u32);
        let ok = if n == 4 {
            BigInt::from(r + 2) <= 2 * power
        } else {
            BigInt::from(r + 1) <= power
        };
        if ok {
            return Ok(BigInt::from(r));
        }
        r += 1;
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DecompositionDoc {
    n: usize,
    target: String,
    domain: String,
    terms: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermDoc {
    coeff: String,
    vectors: Vec<Vec<i64>>,
}

/// Serializes a decomposition to the interchange JSON document. Vector
/// entries must be integral in the domain (prime-field residues are
/// stored canonically); coefficients are exact strings.
pub fn export_decomposition(d: &TensorDecomposition) -> Result<String, TensorError> {
    let terms = d
        .terms
        .iter()
        .map(|t| {
            let vectors = t
                .vectors
                .iter()
                .map(|v| v.iter().map(scalar_to_i64).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TermDoc {
                coeff: t.coefficient.to_string(),
                vectors,
            })
        })
        .collect::<Result<Vec<_>, TensorError>>()?;
    let doc = DecompositionDoc {
        n: d.n,
        target: match d.target {
            Target::Determinant => "det".into(),
            Target::Permanent => "per".into(),
        },
        domain: d.domain.to_string(),
        terms,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("serializable"))
}

fn scalar_to_i64(s: &Scalar) -> Result<i64, TensorError> {
    let fail = || TensorError::SchemaViolation(format!("vector entry {s} is not a small integer"));
    match s {
        Scalar::Int(v) => v.to_i64().ok_or_else(fail),
        Scalar::Rat(r) => {
            if r.is_integer() {
                r.numer().to_i64().ok_or_else(fail)
            } else {
                Err(fail())
            }
        }
        Scalar::Fp { val, .. } => i64::try_from(*val).map_err(|_| fail()),
        Scalar::Bit(b) => Ok(i64::from(*b)),
    }
}

/// Parses and validates the interchange document.
pub fn import_decomposition(json: &str) -> Result<TensorDecomposition, TensorError> {
    let doc: DecompositionDoc = serde_json::from_str(json)
        .map_err(|e| TensorError::SchemaViolation(e.to_string()))?;
    let domain: Domain = doc
        .domain
        .parse()
        .map_err(TensorError::SchemaViolation)?;
    let target = match doc.target.as_str() {
        "det" => Target::Determinant,
        "per" => Target::Permanent,
        other => {
            return Err(TensorError::SchemaViolation(format!(
                "target must be \"det\" or \"per\", got {other:?}"
            )))
        }
    };
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (k, t) in doc.terms.iter().enumerate() {
        if t.vectors.len() != doc.n {
            return Err(TensorError::SchemaViolation(format!(
                "term {k} has {} vectors, expected {}",
                t.vectors.len(),
                doc.n
            )));
        }
        let mut vectors = Vec::with_capacity(doc.n);
        for v in &t.vectors {
            if v.len() != doc.n {
                return Err(TensorError::SchemaViolation(format!(
                    "term {k} has a vector of length {}, expected {}",
                    v.len(),
                    doc.n
                )));
            }
            vectors.push(v.iter().map(|&w| Scalar::from_i64(w, &domain)).collect());
        }
        let coefficient = parse_coeff(&t.coeff, &domain)?;
        if coefficient.is_zero() {
            return Err(TensorError::SchemaViolation(format!(
                "term {k} has a zero coefficient"
            )));
        }
        terms.push(Rank1Term {
            coefficient,
            vectors,
        });
    }
    Ok(TensorDecomposition {
        n: doc.n,
        target,
        domain,
        terms,
    })
}

fn parse_coeff(s: &str, domain: &Domain) -> Result<Scalar, TensorError> {
    let bad = |e: String| TensorError::SchemaViolation(format!("bad coefficient {s:?}: {e}"));
    if let Some((num, den)) = s.split_once('/') {
        if *domain != Domain::Rational {
            return Err(bad("fractions only exist in domain Q".into()));
        }
        let num: BigInt = num.parse().map_err(|e| bad(format!("{e}")))?;
        let den: BigInt = den.parse().map_err(|e| bad(format!("{e}")))?;
        if den.is_zero() {
            return Err(bad("zero denominator".into()));
        }
        return Ok(Scalar::Rat(num_rational::BigRational::new(num, den)));
    }
    let v: BigInt = s.parse().map_err(|e| bad(format!("{e}")))?;
    Ok(Scalar::from_bigint(&v, domain))
}
