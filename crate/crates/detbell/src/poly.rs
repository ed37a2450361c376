//! Sparse multivariate polynomials keyed by exponent vectors, used for the
//! symbolic (polynomial-identity) checks and the Waring expansions.
//!
//! Coefficients are [`Scalar`]s sharing one domain; arithmetic panics on a
//! domain mix, which would be a bug in this crate rather than user input.

use std::collections::BTreeMap;

use crate::scalar::{Domain, Scalar};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n_vars: usize,
    domain: Domain,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(n_vars: usize, domain: &Domain) -> Poly {
        Poly {
            n_vars,
            domain: *domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: &Scalar) -> Poly {
        let mut p = Poly::zero(n_vars, &c.domain());
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c.clone());
        }
        p
    }

    /// The monomial `c * x_v`.
    pub fn linear(n_vars: usize, v: usize, c: &Scalar) -> Poly {
        let mut exps = vec![0u8; n_vars];
        exps[v] = 1;
        Poly::monomial(n_vars, exps, c)
    }

    pub fn monomial(n_vars: usize, exps: Monomial, c: &Scalar) -> Poly {
        assert_eq!(exps.len(), n_vars);
        let mut p = Poly::zero(n_vars, &c.domain());
        if !c.is_zero() {
            p.terms.insert(exps, c.clone());
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u8]) -> Scalar {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.domain))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exps: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            None => {
                self.terms.insert(exps, c.clone());
            }
            Some(old) => {
                let sum = old.add(c).expect("poly coefficients share a domain");
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Scalar::one(&self.domain).neg()))
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero(self.n_vars, &self.domain);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.add_term(e.clone(), &v.mul(c).expect("poly coefficients share a domain"));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = Poly::zero(self.n_vars, &self.domain);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Monomial = ea
                    .iter()
                    .zip(eb)
                    .map(|(x, y)| x.checked_add(*y).expect("exponent overflow"))
                    .collect();
                out.add_term(exps, &ca.mul(cb).expect("poly coefficients share a domain"));
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::constant(self.n_vars, &Scalar::one(&self.domain));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}
