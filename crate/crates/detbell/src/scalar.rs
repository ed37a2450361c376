//! Exact coefficient domains: arbitrary-precision integers, rationals,
//! prime fields `F_p` with `p < 2^61`, and the two-element field `F2`.
//!
//! Every value carries its domain; mixing domains in an arithmetic
//! operation is an error rather than a coercion. There is no floating
//! point anywhere in this crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest admissible prime-field modulus: `2^61 - 1`.
///
/// Word arithmetic via `u128` products covers this comfortably; nothing at
/// desk scale needs a bigger modulus.
pub const MAX_PRIME_MODULUS: u64 = (1u64 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("operands belong to different domains ({0} vs {1})")]
    DomainMismatch(Domain, Domain),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is only defined in field domains, not {0}")]
    DivisionInNonField(Domain),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the 2^61 - 1 limit")]
    ModulusTooLarge(u64),
}

/// One of the supported exact coefficient domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Integer,
    Rational,
    PrimeField(u64),
    F2,
}

impl Domain {
    /// Constructs `F_p`, verifying that `p` is a prime below the word limit.
    pub fn prime_field(p: u64) -> Result<Domain, ScalarError> {
        if p > MAX_PRIME_MODULUS {
            return Err(ScalarError::ModulusTooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Domain::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Domain::Integer | Domain::Rational => 0,
            Domain::PrimeField(p) => *p,
            Domain::F2 => 2,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Domain::Integer)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Integer => write!(f, "Z"),
            Domain::Rational => write!(f, "Q"),
            Domain::PrimeField(p) => write!(f, "Fp:{p}"),
            Domain::F2 => write!(f, "F2"),
        }
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z" => Ok(Domain::Integer),
            "Q" => Ok(Domain::Rational),
            "F2" => Ok(Domain::F2),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .ok_or_else(|| format!("unknown domain {s:?} (expected Z, Q, Fp:<p> or F2)"))?
                    .parse::<u64>()
                    .map_err(|e| format!("bad prime field modulus: {e}"))?;
                Domain::prime_field(p).map_err(|e| e.to_string())
            }
        }
    }
}

/// A value in one of the exact domains, stored canonically: rationals in
/// lowest terms with positive denominator, `F_p` values as least
/// non-negative residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Fp { p: u64, val: u64 },
    Bit(bool),
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Int(_) => Domain::Integer,
            Scalar::Rat(_) => Domain::Rational,
            Scalar::Fp { p, .. } => Domain::PrimeField(*p),
            Scalar::Bit(_) => Domain::F2,
        }
    }

    pub fn zero(domain: &Domain) -> Scalar {
        Scalar::from_bigint(&BigInt::zero(), domain)
    }

    pub fn one(domain: &Domain) -> Scalar {
        Scalar::from_bigint(&BigInt::one(), domain)
    }

    /// The canonical ring map from the integers into `domain`.
    pub fn from_bigint(k: &BigInt, domain: &Domain) -> Scalar {
        match domain {
            Domain::Integer => Scalar::Int(k.clone()),
            Domain::Rational => Scalar::Rat(BigRational::from_integer(k.clone())),
            Domain::PrimeField(p) => {
                let m = BigInt::from(*p);
                let mut r = k % &m;
                if r.is_negative() {
                    r += &m;
                }
                Scalar::Fp {
                    p: *p,
                    val: r.to_u64().expect("residue fits in u64"),
                }
            }
            Domain::F2 => Scalar::Bit(k.bit(0)),
        }
    }

    pub fn from_i64(k: i64, domain: &Domain) -> Scalar {
        Scalar::from_bigint(&BigInt::from(k), domain)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
            Scalar::Bit(b) => !b,
        }
    }

    fn check_domain(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.domain() != other.domain() {
            return Err(ScalarError::DomainMismatch(self.domain(), other.domain()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => {
                let s = (*a as u128 + *b as u128) % *p as u128;
                Scalar::Fp { p: *p, val: s as u64 }
            }
            (Scalar::Bit(a), Scalar::Bit(b)) => Scalar::Bit(a ^ b),
            _ => unreachable!("domains checked above"),
        })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(v) => Scalar::Int(-v),
            Scalar::Rat(v) => Scalar::Rat(-v),
            Scalar::Fp { p, val } => Scalar::Fp {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
            Scalar::Bit(b) => Scalar::Bit(*b),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                p: *p,
                val: mul_mod(*a, *b, *p),
            },
            (Scalar::Bit(a), Scalar::Bit(b)) => Scalar::Bit(*a & *b),
            _ => unreachable!("domains checked above"),
        })
    }

    /// Division; defined only in the field domains.
    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_domain(other)?;
        if !self.domain().is_field() {
            return Err(ScalarError::DivisionInNonField(self.domain()));
        }
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a / b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { val: b, .. }) => Scalar::Fp {
                p: *p,
                val: mul_mod(*a, inv_mod(*b, *p), *p),
            },
            (Scalar::Bit(a), Scalar::Bit(_)) => Scalar::Bit(*a),
            _ => unreachable!("domains checked above"),
        })
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(&self.domain());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same domain");
            }
            base = base.mul(&base).expect("same domain");
            e >>= 1;
        }
        acc
    }

    /// The underlying rational value, embedding integers; `None` outside Z/Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(v) => Some(BigRational::from_integer(v.clone())),
            Scalar::Rat(v) => Some(v.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Rat(v) => write!(f, "{v}"),
            Scalar::Fp { val, .. } => write!(f, "{val}"),
            Scalar::Bit(b) => write!(f, "{}", u8::from(*b)),
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This witness set is exact for every 64-bit integer.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("entry at ({0}, {1}) is in domain {2}, expected {3}")]
    MixedDomains(usize, usize, Domain, Domain),
    #[error("expected {expected} entries for a {n} x {n} matrix, got {got}")]
    WrongEntryCount { n: usize, expected: usize, got: usize },
    #[error("matrix parse error: {0}")]
    Parse(String),
}

/// A dense square matrix whose entries all live in one domain.
///
/// Immutable once built; cheap to share between workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    domain: Domain,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(n: usize, domain: Domain, entries: Vec<Scalar>) -> Result<Matrix, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::WrongEntryCount {
                n,
                expected: n * n,
                got: entries.len(),
            });
        }
        for (k, e) in entries.iter().enumerate() {
            if e.domain() != domain {
                return Err(MatrixError::MixedDomains(k / n, k % n, e.domain(), domain));
            }
        }
        Ok(Matrix { n, domain, entries })
    }

    pub fn identity(n: usize, domain: &Domain) -> Matrix {
        let mut entries = vec![Scalar::zero(domain); n * n];
        for i in 0..n {
            entries[i * n + i] = Scalar::one(domain);
        }
        Matrix {
            n,
            domain: *domain,
            entries,
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], domain: &Domain) -> Matrix {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "rows must form a square matrix");
                r.iter().map(|&v| Scalar::from_i64(v, domain))
            })
            .collect();
        Matrix {
            n,
            domain: *domain,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Entry `(i, j)`, zero-indexed.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    /// Parses the text format: a header line `n d` with
    /// `d in {Z, Q, Fp:<p>, F2}`, then `n` rows of `n` whitespace-separated
    /// entries, fractions written `a/b`.
    pub fn parse_text(input: &str) -> Result<Matrix, MatrixError> {
        let mut tokens = input.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| MatrixError::Parse("empty input".into()))?
            .parse()
            .map_err(|e| MatrixError::Parse(format!("bad dimension: {e}")))?;
        let domain: Domain = tokens
            .next()
            .ok_or_else(|| MatrixError::Parse("missing domain tag".into()))?
            .parse()
            .map_err(MatrixError::Parse)?;
        let mut entries = Vec::with_capacity(n * n);
        for tok in tokens {
            entries.push(parse_entry(tok, &domain).map_err(MatrixError::Parse)?);
        }
        Matrix::new(n, domain, entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.domain);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_entry(tok: &str, domain: &Domain) -> Result<Scalar, String> {
    match domain {
        Domain::Rational => {
            if let Some((num, den)) = tok.split_once('/') {
                let num = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
                let den = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
                if den.is_zero() {
                    return Err(format!("zero denominator in {tok:?}"));
                }
                Ok(Scalar::Rat(BigRational::new(num, den)))
            } else {
                let v = BigInt::from_str(tok).map_err(|e| format!("bad entry {tok:?}: {e}"))?;
                Ok(Scalar::Rat(BigRational::from_integer(v)))
            }
        }
        _ => {
            let v = BigInt::from_str(tok).map_err(|e| format!("bad entry {tok:?}: {e}"))?;
            Ok(Scalar::from_bigint(&v, domain))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5(v: i64) -> Scalar {
        Scalar::from_i64(v, &Domain::PrimeField(5))
    }

    #[test]
    fn f2_addition_is_xor() {
        let one = Scalar::one(&Domain::F2);
        assert!(one.add(&one).unwrap().is_zero());
    }

    #[test]
    fn rational_products_reduce() {
        let d = Domain::Rational;
        let a = parse_entry("2/3", &d).unwrap();
        let b = parse_entry("3/4", &d).unwrap();
        assert_eq!(a.mul(&b).unwrap().to_string(), "1/2");
    }

    #[test]
    fn modular_negation() {
        assert_eq!(f5(2).neg(), f5(3));
    }

    #[test]
    fn int_embed_examples() {
        assert!(Scalar::from_i64(2, &Domain::F2).is_zero());
        assert_eq!(Scalar::from_i64(6, &Domain::PrimeField(5)), f5(1));
        assert_eq!(
            Scalar::from_i64(-1, &Domain::Integer),
            Scalar::Int(BigInt::from(-1))
        );
        assert_eq!(Scalar::from_i64(-7, &Domain::PrimeField(5)), f5(3));
    }

    #[test]
    fn domain_mismatch_rejected() {
        let a = Scalar::from_i64(1, &Domain::Integer);
        let b = Scalar::from_i64(1, &Domain::F2);
        assert!(matches!(a.add(&b), Err(ScalarError::DomainMismatch(_, _))));
    }

    #[test]
    fn division_rules() {
        let a = Scalar::from_i64(4, &Domain::Integer);
        let b = Scalar::from_i64(2, &Domain::Integer);
        assert!(matches!(
            a.div(&b),
            Err(ScalarError::DivisionInNonField(Domain::Integer))
        ));
        assert!(matches!(
            f5(1).div(&f5(0)),
            Err(ScalarError::DivisionByZero)
        ));
        assert_eq!(f5(1).div(&f5(2)).unwrap(), f5(3));
    }

    #[test]
    fn prime_field_construction() {
        assert!(Domain::prime_field(7).is_ok());
        assert!(Domain::prime_field(MAX_PRIME_MODULUS).is_ok()); // 2^61 - 1 is prime
        assert!(matches!(
            Domain::prime_field(6),
            Err(ScalarError::NotPrime(6))
        ));
        assert!(matches!(
            Domain::prime_field(1 << 61),
            Err(ScalarError::ModulusTooLarge(_))
        ));
    }

    #[test]
    fn characteristic_report() {
        assert_eq!(Domain::Integer.characteristic(), 0);
        assert_eq!(Domain::Rational.characteristic(), 0);
        assert_eq!(Domain::PrimeField(13).characteristic(), 13);
        assert_eq!(Domain::F2.characteristic(), 2);
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "2 Q\n5 -2/3\n-1 3\n";
        let m = Matrix::parse_text(text).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.get(0, 1).to_string(), "-2/3");
        assert_eq!(Matrix::parse_text(&m.to_text()).unwrap(), m);

        let text = "3 Fp:7\n6 8 -1\n0 1 2\n3 4 5\n";
        let m = Matrix::parse_text(text).unwrap();
        assert_eq!(m.get(0, 1).to_string(), "1");
        assert_eq!(m.get(0, 2).to_string(), "6");
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(Matrix::parse_text("").is_err());
        assert!(Matrix::parse_text("2 Z\n1 2 3\n").is_err());
        assert!(Matrix::parse_text("2 Fp:6\n1 2\n3 4\n").is_err());
        assert!(Matrix::parse_text("1 Q\n1/0\n").is_err());
    }

    fn domains() -> Vec<Domain> {
        vec![
            Domain::Integer,
            Domain::Rational,
            Domain::PrimeField(5),
            Domain::PrimeField(MAX_PRIME_MODULUS),
            Domain::F2,
        ]
    }

    proptest! {
        #[test]
        fn ring_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50) {
            for d in domains() {
                let (x, y, z) = (
                    Scalar::from_i64(a, &d),
                    Scalar::from_i64(b, &d),
                    Scalar::from_i64(c, &d),
                );
                // associativity
                prop_assert_eq!(
                    x.add(&y).unwrap().add(&z).unwrap(),
                    x.add(&y.add(&z).unwrap()).unwrap()
                );
                prop_assert_eq!(
                    x.mul(&y).unwrap().mul(&z).unwrap(),
                    x.mul(&y.mul(&z).unwrap()).unwrap()
                );
                // commutativity and distributivity
                prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
                prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
                prop_assert_eq!(
                    x.mul(&y.add(&z).unwrap()).unwrap(),
                    x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
                );
                // additive inverse
                prop_assert!(x.add(&x.neg()).unwrap().is_zero());
            }
        }

        #[test]
        fn int_embed_is_a_ring_homomorphism(a in -1000i64..1000, b in -1000i64..1000) {
            for d in domains() {
                let img = Scalar::from_bigint(&(BigInt::from(a) * BigInt::from(b)), &d);
                prop_assert_eq!(
                    img,
                    Scalar::from_i64(a, &d).mul(&Scalar::from_i64(b, &d)).unwrap()
                );
                let img = Scalar::from_bigint(&(BigInt::from(a) + BigInt::from(b)), &d);
                prop_assert_eq!(
                    img,
                    Scalar::from_i64(a, &d).add(&Scalar::from_i64(b, &d)).unwrap()
                );
            }
        }

        #[test]
        fn fermat_little_theorem(x in any::<i64>()) {
            for p in [3u64, 5, 31, 2147483647, MAX_PRIME_MODULUS] {
                let d = Domain::PrimeField(p);
                let s = Scalar::from_i64(x, &d);
                prop_assert_eq!(s.pow(p), s);
            }
        }

        #[test]
        fn field_inverses(x in 1i64..10_000) {
            for d in [Domain::Rational, Domain::PrimeField(10_007), Domain::F2] {
                let s = Scalar::from_i64(x, &d);
                if !s.is_zero() {
                    let inv = Scalar::one(&d).div(&s).unwrap();
                    prop_assert_eq!(s.mul(&inv).unwrap(), Scalar::one(&d));
                }
            }
        }
    }
}
