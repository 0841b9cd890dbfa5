//! Sparse multivariate polynomials over cyclotomic scalars.
//!
//! These are the coefficient rings for generic elements: commuting
//! indeterminates `lambda_0, lambda_1, ...` with `CycScalar` coefficients.
//! Terms live in a `BTreeMap` keyed by monomials in graded-lexicographic
//! order, and zero coefficients are never stored, so equality is syntactic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::CycScalar;

/// Exponent vector of a monomial, with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut exps = vec![0; index + 1];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, rhs: &Monomial) -> Monomial {
        let n = self.0.len().max(rhs.0.len());
        let mut exps = vec![0u32; n];
        for (i, e) in self.0.iter().enumerate() {
            exps[i] += e;
        }
        for (i, e) in rhs.0.iter().enumerate() {
            exps[i] += e;
        }
        Monomial(exps)
    }
}

impl Ord for Monomial {
    /// Graded-lexicographic: lower total degree first, ties by exponent vector.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let n = self.0.len().max(other.0.len());
                for i in 0..n {
                    let a = self.0.get(i).copied().unwrap_or(0);
                    let b = other.0.get(i).copied().unwrap_or(0);
                    match a.cmp(&b) {
                        std::cmp::Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, e) in self.0.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "l{i}")?;
            } else {
                write!(f, "l{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial in commuting indeterminates over `CycScalar`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, CycScalar>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(CycScalar::one())
    }

    pub fn constant(c: CycScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        SparsePoly { terms }
    }

    pub fn var(index: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(index), CycScalar::one());
        SparsePoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: &CycScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &CycScalar) -> Self {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        let mut out = SparsePoly::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &(a * c));
        }
        out
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }
}

impl AddAssign<&SparsePoly> for SparsePoly {
    fn add_assign(&mut self, rhs: &SparsePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})·{m:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: usize) -> SparsePoly {
        SparsePoly::var(i)
    }

    #[test]
    fn graded_lex_ordering() {
        // 1 < l1 < l0 < l0*l1 < l0^2  under graded lex with l0 > l1.
        let unit = Monomial::unit();
        let l0 = Monomial::var(0);
        let l1 = Monomial::var(1);
        let l0l1 = Monomial::from_exponents(vec![1, 1]);
        let l0sq = Monomial::from_exponents(vec![2]);
        assert!(unit < l1);
        assert!(l1 < l0);
        assert!(l0 < l0l1);
        assert!(l0l1 < l0sq);
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = &l(0) - &l(0);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        let q = &(&l(0) + &l(1)) * &(&l(0) - &l(1));
        // l0^2 - l1^2: the cross terms cancel.
        assert_eq!(q.num_terms(), 2);
        assert_eq!(q.total_degree(), 2);
    }

    #[test]
    fn ring_axioms_spotcheck() {
        let a = &(&l(0) + &l(1)) * &l(2);
        let b = &(&l(0) * &l(2)) + &(&l(1) * &l(2));
        assert_eq!(a, b);
        let c = a.scale(&CycScalar::from_int(0));
        assert!(c.is_zero());
    }

    #[test]
    fn trailing_zero_exponents_normalize() {
        let m1 = Monomial::from_exponents(vec![1, 0, 0]);
        let m2 = Monomial::var(0);
        assert_eq!(m1, m2);
    }
}
