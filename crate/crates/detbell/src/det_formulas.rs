//! Determinant and permanent evaluators: the Leibniz expansion (the oracle
//! everything else is checked against), Ryser's and Glynn's permanent
//! formulas, the Bell-number partial-partition formula with its
//! positive-characteristic and characteristic-2 restrictions, and the
//! in-tree expansion.
//!
//! Every formula is normalized to a common shape: an outer sum of terms,
//! each term carrying an integer coefficient and one linear form per row.
//! That shape is what the tensor-decomposition builder consumes, so the
//! evaluators and the decompositions cannot drift apart.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::{bell, bell_nk, factorial, mask_elements, partial_partitions};
use crate::poly::Poly;
use crate::scalar::{Domain, Matrix, Scalar, ScalarError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaKind {
    Leibniz,
    LeibnizPermanent,
    Ryser,
    Glynn,
    MainBell,
    CharP,
    Char2,
    InTree,
}

/// What a formula computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Determinant,
    Permanent,
}

impl FormulaKind {
    pub const ALL: [FormulaKind; 8] = [
        FormulaKind::Leibniz,
        FormulaKind::LeibnizPermanent,
        FormulaKind::Ryser,
        FormulaKind::Glynn,
        FormulaKind::MainBell,
        FormulaKind::CharP,
        FormulaKind::Char2,
        FormulaKind::InTree,
    ];

    pub fn target(&self) -> Target {
        match self {
            FormulaKind::LeibnizPermanent | FormulaKind::Ryser | FormulaKind::Glynn => {
                Target::Permanent
            }
            _ => Target::Determinant,
        }
    }

    /// Checks the characteristic constraints of the formula.
    pub fn admits_characteristic(&self, ch: u64) -> Result<(), FormulaError> {
        match self {
            FormulaKind::Glynn if ch == 2 => Err(FormulaError::GlynnInCharacteristic2),
            FormulaKind::CharP if ch == 0 => {
                Err(FormulaError::NeedsPositiveCharacteristic(*self))
            }
            FormulaKind::Char2 if ch != 2 => Err(FormulaError::NeedsCharacteristic2(*self, ch)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FormulaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormulaKind::Leibniz => "leibniz",
            FormulaKind::LeibnizPermanent => "per-leibniz",
            FormulaKind::Ryser => "ryser",
            FormulaKind::Glynn => "glynn",
            FormulaKind::MainBell => "main",
            FormulaKind::CharP => "charp",
            FormulaKind::Char2 => "char2",
            FormulaKind::InTree => "intree",
        };
        write!(f, "{s}")
    }
}

impl FromStr for FormulaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leibniz" => Ok(FormulaKind::Leibniz),
            "per-leibniz" => Ok(FormulaKind::LeibnizPermanent),
            "ryser" => Ok(FormulaKind::Ryser),
            "glynn" => Ok(FormulaKind::Glynn),
            "main" => Ok(FormulaKind::MainBell),
            "charp" => Ok(FormulaKind::CharP),
            "char2" => Ok(FormulaKind::Char2),
            "intree" => Ok(FormulaKind::InTree),
            _ => Err(format!("unknown formula {s:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("formula '{0}' requires positive characteristic")]
    NeedsPositiveCharacteristic(FormulaKind),
    #[error("formula '{0}' requires characteristic 2, got {1}")]
    NeedsCharacteristic2(FormulaKind, u64),
    #[error("Glynn's formula divides by 2^(n-1), which characteristic 2 forbids")]
    GlynnInCharacteristic2,
    #[error("Glynn sum over the integers is not divisible by 2^(n-1)")]
    GlynnNotDivisible,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One outer-sum term: an integer coefficient and, per row, the integer
/// coefficient vector of that row's linear factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaTerm {
    pub coeff: BigInt,
    pub rows: Vec<Vec<i64>>,
}

/// Visits all permutations of `0..n` with their signs, via Heap's
/// algorithm (each step is a single transposition, so the sign just
/// alternates with it).
pub fn for_each_permutation<F: FnMut(&[usize], i32)>(n: usize, mut visit: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut sign = 1;
    visit(&a, sign);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            visit(&a, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// The outer-sum terms of a formula at dimension `n`. `characteristic`
/// matters only where the formula itself depends on it (the part-count cap
/// of `CharP`); constraints are checked for every kind.
pub fn formula_terms(
    kind: FormulaKind,
    n: usize,
    characteristic: u64,
) -> Result<Vec<FormulaTerm>, FormulaError> {
    kind.admits_characteristic(characteristic)?;
    let mut terms = Vec::new();
    match kind {
        FormulaKind::Leibniz | FormulaKind::LeibnizPermanent => {
            let signed = kind == FormulaKind::Leibniz;
            for_each_permutation(n, |perm, sign| {
                let rows = perm
                    .iter()
                    .map(|&j| {
                        let mut row = vec![0i64; n];
                        row[j] = 1;
                        row
                    })
                    .collect();
                terms.push(FormulaTerm {
                    coeff: BigInt::from(if signed { sign } else { 1 }),
                    rows,
                });
            });
        }
        FormulaKind::Ryser => {
            if n == 0 {
                terms.push(FormulaTerm {
                    coeff: BigInt::one(),
                    rows: Vec::new(),
                });
            }
            for s in 1u64..(1u64 << n) {
                let sign = if (s.count_ones() as usize + n) % 2 == 0 {
                    1
                } else {
                    -1
                };
                let row: Vec<i64> = (0..n).map(|j| i64::from(s >> j & 1 == 1)).collect();
                terms.push(FormulaTerm {
                    coeff: BigInt::from(sign),
                    rows: vec![row; n],
                });
            }
        }
        FormulaKind::Glynn => {
            // delta_1 = 1; the remaining n-1 signs range over +-1. The
            // global 1/2^(n-1) factor is applied by the evaluator.
            for code in 0u64..(1u64 << n.saturating_sub(1)) {
                let delta: Vec<i64> = (0..n)
                    .map(|j| {
                        if j > 0 && code >> (j - 1) & 1 == 1 {
                            -1
                        } else {
                            1
                        }
                    })
                    .collect();
                let sign: i64 = delta.iter().product();
                terms.push(FormulaTerm {
                    coeff: BigInt::from(sign),
                    rows: vec![delta; n],
                });
            }
        }
        FormulaKind::MainBell | FormulaKind::CharP => {
            let max_parts = match kind {
                FormulaKind::CharP => Some(characteristic as usize - 1),
                _ => None,
            };
            for p in partial_partitions(n, true, max_parts) {
                let coeff = BigInt::from(p.sign()) * factorial(p.num_parts());
                let support = p.support();
                let rows = (1..=n)
                    .map(|i| {
                        let mut row = vec![0i64; n];
                        if let Some(k) = p.part_of(i) {
                            for j in mask_elements(p.parts()[k]) {
                                if j != i {
                                    row[j - 1] = 1;
                                }
                            }
                        } else {
                            row[i - 1] = 1;
                            for j in mask_elements(support) {
                                row[j - 1] = 1;
                            }
                        }
                        row
                    })
                    .collect();
                terms.push(FormulaTerm { coeff, rows });
            }
        }
        FormulaKind::Char2 => {
            // Singleton subsets make one row's factor an empty sum, so the
            // whole term is structurally zero and must be skipped.
            for s in 0u64..(1u64 << n) {
                if s.count_ones() == 1 {
                    continue;
                }
                let rows = (1..=n)
                    .map(|i| {
                        let sym = s ^ (1u64 << (i - 1));
                        (0..n).map(|j| i64::from(sym >> j & 1 == 1)).collect()
                    })
                    .collect();
                terms.push(FormulaTerm {
                    coeff: BigInt::one(),
                    rows,
                });
            }
        }
        FormulaKind::InTree => {
            let global = BigInt::from(if n % 2 == 0 { 1 } else { -1 });
            for_each_in_tree(n, |targets| {
                let rows = targets
                    .iter()
                    .map(|&j| {
                        if j == 0 {
                            vec![-1i64; n]
                        } else {
                            let mut row = vec![0i64; n];
                            row[j - 1] = 1;
                            row
                        }
                    })
                    .collect();
                terms.push(FormulaTerm {
                    coeff: global.clone(),
                    rows,
                });
            });
        }
    }
    Ok(terms)
}

/// Visits the out-edge target vectors `(j_1, .., j_n)` of all in-trees on
/// vertices `{0, .., n}` rooted at 0: vertex `i` points at `j_i != i`, and
/// the underlying undirected graph must be a tree (checked with a
/// union-find; `n` acyclic edges on `n + 1` vertices are always a tree).
fn for_each_in_tree<F: FnMut(&[usize])>(n: usize, mut visit: F) {
    let mut targets = vec![0usize; n];
    loop {
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut acyclic = true;
        for (i, &j) in targets.iter().enumerate() {
            let (a, b) = (find(&mut parent, i + 1), find(&mut parent, j));
            if a == b {
                acyclic = false;
                break;
            }
            parent[a] = b;
        }
        if acyclic {
            visit(&targets);
        }
        // next target vector, skipping self-loops
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            targets[i] += 1;
            if targets[i] == i + 1 {
                targets[i] += 1; // no self-loops
            }
            if targets[i] <= n {
                break;
            }
            targets[i] = 0;
            i += 1;
        }
    }
}

/// Leibniz determinant: the oracle for every other formula.
pub fn det_leibniz(a: &Matrix) -> Scalar {
    leibniz_eval(a, true)
}

/// Leibniz permanent.
pub fn per_leibniz(a: &Matrix) -> Scalar {
    leibniz_eval(a, false)
}

fn leibniz_eval(a: &Matrix, signed: bool) -> Scalar {
    let d = a.domain();
    let n = a.n();
    let mut acc = Scalar::zero(&d);
    let mut err = None;
    for_each_permutation(n, |perm, sign| {
        if err.is_some() {
            return;
        }
        let mut prod = if signed && sign < 0 {
            Scalar::one(&d).neg()
        } else {
            Scalar::one(&d)
        };
        for (i, &j) in perm.iter().enumerate() {
            match prod.mul(a.get(i, j)) {
                Ok(v) => prod = v,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            }
        }
        acc = acc.add(&prod).expect("same domain");
    });
    assert!(err.is_none(), "matrix entries share the matrix domain");
    acc
}

/// Evaluates `kind` on `a`, exactly.
pub fn eval(kind: FormulaKind, a: &Matrix) -> Result<Scalar, FormulaError> {
    let d = a.domain();
    let n = a.n();
    let terms = formula_terms(kind, n, d.characteristic())?;
    let mut acc = Scalar::zero(&d);
    for t in &terms {
        let c = Scalar::from_bigint(&t.coeff, &d);
        if c.is_zero() {
            continue;
        }
        let mut prod = c;
        for (i, row) in t.rows.iter().enumerate() {
            let mut sum = Scalar::zero(&d);
            for (j, &w) in row.iter().enumerate() {
                match w {
                    0 => {}
                    1 => sum = sum.add(a.get(i, j))?,
                    -1 => sum = sum.sub(a.get(i, j))?,
                    _ => {
                        let w = Scalar::from_i64(w, &d);
                        sum = sum.add(&w.mul(a.get(i, j))?)?;
                    }
                }
            }
            prod = prod.mul(&sum)?;
        }
        acc = acc.add(&prod)?;
    }
    if kind == FormulaKind::Glynn && n >= 1 {
        acc = glynn_rescale(&acc, n)?;
    }
    Ok(acc)
}

/// Applies Glynn's global 1/2^(n-1) factor: a field division where
/// possible, and over the integers an exact division that is checked.
fn glynn_rescale(total: &Scalar, n: usize) -> Result<Scalar, FormulaError> {
    let denom = BigInt::one() << (n - 1);
    match total {
        Scalar::Int(v) => {
            if (v % &denom).is_zero() {
                Ok(Scalar::Int(v / &denom))
            } else {
                Err(FormulaError::GlynnNotDivisible)
            }
        }
        _ => {
            let d = total.domain();
            Ok(total.div(&Scalar::from_bigint(&denom, &d))?)
        }
    }
}

pub fn det_main(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::MainBell, a)
}

pub fn det_charp(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::CharP, a)
}

pub fn det_char2(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::Char2, a)
}

pub fn det_intree(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::InTree, a)
}

pub fn per_ryser(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::Ryser, a)
}

pub fn per_glynn(a: &Matrix) -> Result<Scalar, FormulaError> {
    eval(FormulaKind::Glynn, a)
}

/// Number of outer-sum terms the evaluator actually multiplies at
/// dimension `n` over a domain of the given characteristic. Computed in
/// closed form; tests cross-check it against the enumerated streams.
pub fn term_count(
    kind: FormulaKind,
    n: usize,
    characteristic: u64,
) -> Result<BigInt, FormulaError> {
    kind.admits_characteristic(characteristic)?;
    let graded_cap = |p: u64| -> BigInt {
        (0..=(n / 2).min(p as usize - 1))
            .map(|k| bell_nk(n, k))
            .sum()
    };
    Ok(match kind {
        FormulaKind::Leibniz | FormulaKind::LeibnizPermanent => factorial(n),
        FormulaKind::Ryser => {
            if n == 0 {
                BigInt::one()
            } else {
                (BigInt::one() << n) - 1
            }
        }
        FormulaKind::Glynn => BigInt::one() << n.saturating_sub(1),
        FormulaKind::MainBell => {
            // Terms whose |P|! coefficient is a multiple of the
            // characteristic embed to zero and are skipped.
            if characteristic == 0 {
                bell(n)
            } else {
                graded_cap(characteristic)
            }
        }
        FormulaKind::CharP => graded_cap(characteristic),
        FormulaKind::Char2 => (BigInt::one() << n) - n,
        FormulaKind::InTree => {
            if n == 0 {
                BigInt::one()
            } else {
                BigInt::from(n + 1).pow(n as u32 - 1)
            }
        }
    })
}

/// The formula expanded as a polynomial in the `n^2` matrix entries
/// (variable `x_{i,j}` has index `i*n + j`), over any domain in which the
/// formula's coefficients exist.
pub fn symbolic_polynomial(
    kind: FormulaKind,
    n: usize,
    domain: &Domain,
) -> Result<Poly, FormulaError> {
    let terms = formula_terms(kind, n, domain.characteristic())?;
    let mut acc = Poly::zero(n * n, domain);
    for t in &terms {
        let c = Scalar::from_bigint(&t.coeff, domain);
        if c.is_zero() {
            continue;
        }
        let mut prod = Poly::constant(n * n, &c);
        for (i, row) in t.rows.iter().enumerate() {
            let mut form = Poly::zero(n * n, domain);
            for (j, &w) in row.iter().enumerate() {
                if w != 0 {
                    form = form.add(&Poly::linear(n * n, i * n + j, &Scalar::from_i64(w, domain)));
                }
            }
            prod = prod.mul(&form);
        }
        acc = acc.add(&prod);
    }
    if kind == FormulaKind::Glynn && n >= 1 {
        let denom = Scalar::from_bigint(&(BigInt::one() << (n - 1)), domain);
        let inv = Scalar::one(domain).div(&denom)?;
        acc = acc.scale(&inv);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mat(rows: &[Vec<i64>], d: &Domain) -> Matrix {
        Matrix::from_i64_rows(rows, d)
    }

    fn random_matrix(rng: &mut StdRng, n: usize, d: &Domain) -> Matrix {
        let entries = (0..n * n)
            .map(|_| match d {
                Domain::Rational => {
                    let num = rng.random_range(-9i64..=9);
                    let den = rng.random_range(1i64..=9);
                    Scalar::Rat(num_rational::BigRational::new(num.into(), den.into()))
                }
                _ => Scalar::from_i64(rng.random_range(-9i64..=9), d),
            })
            .collect();
        Matrix::new(n, *d, entries).unwrap()
    }

    #[test]
    fn identity_determinant() {
        for d in [Domain::Integer, Domain::Rational, Domain::F2, Domain::PrimeField(7)] {
            let a = Matrix::identity(3, &d);
            assert_eq!(det_leibniz(&a), Scalar::one(&d));
            assert_eq!(det_main(&a).unwrap(), Scalar::one(&d));
            assert_eq!(det_intree(&a).unwrap(), Scalar::one(&d));
            assert_eq!(per_leibniz(&a), Scalar::one(&d));
            assert_eq!(per_ryser(&a).unwrap(), Scalar::one(&d));
        }
        assert_eq!(
            det_char2(&Matrix::identity(3, &Domain::F2)).unwrap(),
            Scalar::one(&Domain::F2)
        );
    }

    #[test]
    fn worked_integer_examples() {
        let d = Domain::Integer;
        let a = mat(&[vec![5, -2], vec![-1, 3]], &d);
        assert_eq!(det_leibniz(&a), Scalar::from_i64(13, &d));
        assert_eq!(det_main(&a).unwrap(), Scalar::from_i64(13, &d));
        assert_eq!(det_intree(&a).unwrap(), Scalar::from_i64(13, &d));

        // 4I - J at n = 3
        let b = mat(
            &[vec![3, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3]],
            &d,
        );
        assert_eq!(det_leibniz(&b), Scalar::from_i64(16, &d));
        assert_eq!(det_main(&b).unwrap(), Scalar::from_i64(16, &d));

        let c = mat(&[vec![1, 2], vec![3, 4]], &d);
        assert_eq!(det_main(&c).unwrap(), Scalar::from_i64(-2, &d));
        assert_eq!(per_glynn(&c).unwrap(), Scalar::from_i64(10, &d));
        assert_eq!(per_ryser(&c).unwrap(), Scalar::from_i64(10, &d));
        assert_eq!(per_leibniz(&c), Scalar::from_i64(10, &d));
    }

    #[test]
    fn zero_dimension_conventions() {
        for kind in FormulaKind::ALL {
            if kind == FormulaKind::CharP || kind == FormulaKind::Char2 {
                continue;
            }
            let a = Matrix::new(0, Domain::Integer, vec![]).unwrap();
            assert_eq!(
                eval(kind, &a).unwrap(),
                Scalar::one(&Domain::Integer),
                "{kind}"
            );
        }
        let a = Matrix::new(0, Domain::F2, vec![]).unwrap();
        assert_eq!(det_char2(&a).unwrap(), Scalar::one(&Domain::F2));
    }

    #[test]
    fn characteristic_constraints() {
        let z = Matrix::identity(2, &Domain::Integer);
        assert!(matches!(
            det_charp(&z),
            Err(FormulaError::NeedsPositiveCharacteristic(_))
        ));
        assert!(matches!(
            det_char2(&z),
            Err(FormulaError::NeedsCharacteristic2(_, 0))
        ));
        let f2 = Matrix::identity(2, &Domain::F2);
        assert!(matches!(
            per_glynn(&f2),
            Err(FormulaError::GlynnInCharacteristic2)
        ));
    }

    #[test]
    fn all_formulas_agree_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(7);
        let domains = [
            Domain::Integer,
            Domain::Rational,
            Domain::F2,
            Domain::PrimeField(3),
            Domain::PrimeField(5),
            Domain::prime_field((1u64 << 61) - 1).unwrap(),
        ];
        for d in domains {
            for n in 0..=5 {
                for _ in 0..20 {
                    let a = random_matrix(&mut rng, n, &d);
                    let det = det_leibniz(&a);
                    let per = per_leibniz(&a);
                    assert_eq!(det_main(&a).unwrap(), det, "main, {d}, n={n}");
                    assert_eq!(det_intree(&a).unwrap(), det, "intree, {d}, n={n}");
                    assert_eq!(per_ryser(&a).unwrap(), per, "ryser, {d}, n={n}");
                    if d.characteristic() != 2 {
                        assert_eq!(per_glynn(&a).unwrap(), per, "glynn, {d}, n={n}");
                    }
                    if d.characteristic() > 0 {
                        assert_eq!(det_charp(&a).unwrap(), det, "charp, {d}, n={n}");
                    }
                    if d.characteristic() == 2 {
                        assert_eq!(det_char2(&a).unwrap(), det, "char2, {d}, n={n}");
                        assert_eq!(det, per, "det = per in characteristic 2");
                    }
                }
            }
        }
    }

    #[test]
    fn term_counts_match_enumeration() {
        for n in 0..=6 {
            for (kind, ch) in [
                (FormulaKind::Leibniz, 0u64),
                (FormulaKind::LeibnizPermanent, 0),
                (FormulaKind::Ryser, 0),
                (FormulaKind::Glynn, 0),
                (FormulaKind::MainBell, 0),
                (FormulaKind::CharP, 2),
                (FormulaKind::CharP, 3),
                (FormulaKind::CharP, 5),
                (FormulaKind::Char2, 2),
                (FormulaKind::InTree, 0),
            ] {
                let listed = formula_terms(kind, n, ch).unwrap().len();
                assert_eq!(
                    term_count(kind, n, ch).unwrap(),
                    BigInt::from(listed),
                    "{kind}, n = {n}, ch = {ch}"
                );
            }
        }
    }

    #[test]
    fn headline_term_counts() {
        assert_eq!(term_count(FormulaKind::MainBell, 4, 0).unwrap(), 15.into());
        assert_eq!(term_count(FormulaKind::Char2, 5, 2).unwrap(), 27.into());
        assert_eq!(term_count(FormulaKind::Leibniz, 5, 0).unwrap(), 120.into());
        assert_eq!(term_count(FormulaKind::Ryser, 5, 0).unwrap(), 31.into());
        assert_eq!(term_count(FormulaKind::Glynn, 5, 0).unwrap(), 16.into());
        assert_eq!(term_count(FormulaKind::InTree, 4, 0).unwrap(), 125.into());
        assert_eq!(term_count(FormulaKind::InTree, 2, 0).unwrap(), 3.into());
        // over characteristic 3 at n = 4 the cap is inactive: 1 + 11 + 3
        assert_eq!(term_count(FormulaKind::CharP, 4, 3).unwrap(), 15.into());
        // multiplication-count regression: 15 products of 4 factors vs 24
        let main = formula_terms(FormulaKind::MainBell, 4, 0).unwrap();
        assert_eq!(main.len(), 15);
        assert!(main.iter().all(|t| t.rows.len() == 4));
        assert_eq!(formula_terms(FormulaKind::Leibniz, 4, 0).unwrap().len(), 24);
    }

    #[test]
    fn char2_agrees_exhaustively_over_f2() {
        for n in 0..=4usize {
            for bits in 0u32..(1 << (n * n)) {
                let entries: Vec<Scalar> = (0..n * n)
                    .map(|k| Scalar::from_i64(i64::from(bits >> k & 1), &Domain::F2))
                    .collect();
                let a = Matrix::new(n, Domain::F2, entries).unwrap();
                let det = det_leibniz(&a);
                assert_eq!(det_char2(&a).unwrap(), det, "n = {n}, bits = {bits:#x}");
                assert_eq!(det_charp(&a).unwrap(), det, "n = {n}, bits = {bits:#x}");
            }
        }
    }

    #[test]
    fn char2_terms_are_the_unsigned_bell_terms_at_n3() {
        // at n = 3 the characteristic-2 formula is the field-independent
        // one with signs ignored
        let mut main: Vec<Vec<Vec<i64>>> = formula_terms(FormulaKind::MainBell, 3, 0)
            .unwrap()
            .into_iter()
            .inspect(|t| assert!(t.coeff.clone().abs() == BigInt::one()))
            .map(|t| t.rows)
            .collect();
        let mut char2: Vec<Vec<Vec<i64>>> = formula_terms(FormulaKind::Char2, 3, 2)
            .unwrap()
            .into_iter()
            .inspect(|t| assert!(t.coeff == BigInt::one()))
            .map(|t| t.rows)
            .collect();
        main.sort();
        char2.sort();
        assert_eq!(main, char2);
    }

    #[test]
    fn in_tree_census() {
        for n in 1..=6usize {
            let count = formula_terms(FormulaKind::InTree, n, 0).unwrap().len();
            assert_eq!(count, (n + 1).pow(n as u32 - 1), "n = {n}");
        }
    }

    #[test]
    fn symbolic_identity_small() {
        for n in 0..=4 {
            let main = symbolic_polynomial(FormulaKind::MainBell, n, &Domain::Integer).unwrap();
            let leibniz = symbolic_polynomial(FormulaKind::Leibniz, n, &Domain::Integer).unwrap();
            assert!(main.sub(&leibniz).is_zero(), "n = {n}");
            let intree = symbolic_polynomial(FormulaKind::InTree, n, &Domain::Integer).unwrap();
            assert!(intree.sub(&leibniz).is_zero(), "n = {n}");
        }
        // permanent side, over the rationals so Glynn's division exists
        for n in 1..=4 {
            let per =
                symbolic_polynomial(FormulaKind::LeibnizPermanent, n, &Domain::Rational).unwrap();
            let ryser = symbolic_polynomial(FormulaKind::Ryser, n, &Domain::Rational).unwrap();
            let glynn = symbolic_polynomial(FormulaKind::Glynn, n, &Domain::Rational).unwrap();
            assert!(per.sub(&ryser).is_zero(), "ryser n = {n}");
            assert!(per.sub(&glynn).is_zero(), "glynn n = {n}");
        }
    }

    #[test]
    fn main_bell_n2_is_the_two_term_formula() {
        let terms = formula_terms(FormulaKind::MainBell, 2, 0).unwrap();
        assert_eq!(terms.len(), 2);
        let diag = FormulaTerm {
            coeff: BigInt::one(),
            rows: vec![vec![1, 0], vec![0, 1]],
        };
        let swap = FormulaTerm {
            coeff: -BigInt::one(),
            rows: vec![vec![0, 1], vec![1, 0]],
        };
        assert!(terms.contains(&diag));
        assert!(terms.contains(&swap));
    }
}
