//! Cyclotomic polynomials and exact arithmetic in `Q(zeta_m)`.
//!
//! `Phi_m` is computed by the classical recursion
//! `Phi_m(x) = (x^m - 1) / prod_{d | m, d < m} Phi_d(x)`,
//! with exact integer polynomial division at every step.  Elements of
//! `Q(zeta_m)` are stored as coefficient vectors in the power basis
//! `1, zeta, ..., zeta^{phi(m)-1}`, i.e. as residues in `Q[x]/(Phi_m)`.
//!
//! Key invariants:
//! - coefficient vectors always have length `deg Phi_m = phi(m)`;
//! - two elements of different orders are unified by embedding both into
//!   `Q(zeta_lcm)` via `zeta_m = zeta_lcm^{lcm/m}` before any arithmetic;
//! - an element whose reduced form is rational is demoted to order 1, so a
//!   value and its image under any embedding compare equal.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Rational, ScalarError};

/// Coefficients of `Phi_m`, ascending degree, monic.  Length `phi(m) + 1`.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1, "cyclotomic order must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    let result = Arc::new(compute_cyclotomic(m));
    cache.lock().unwrap().insert(m, result.clone());
    result
}

fn compute_cyclotomic(m: u64) -> Vec<BigInt> {
    if m == 1 {
        // x - 1
        return vec![BigInt::from(-1), BigInt::from(1)];
    }
    // x^m - 1
    let mut numerator = vec![BigInt::zero(); m as usize + 1];
    numerator[0] = BigInt::from(-1);
    numerator[m as usize] = BigInt::one();
    let mut quotient = numerator;
    for d in 1..m {
        if m % d == 0 {
            quotient = div_exact(&quotient, &cyclotomic_polynomial(d));
        }
    }
    quotient
}

/// Exact division of integer polynomials (ascending coefficients); the divisor
/// must be monic and divide evenly, which holds throughout the recursion.
fn div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(rem.len() > dd);
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for qi in (0..quot.len()).rev() {
        let c = rem[qi + dd].clone();
        if !c.is_zero() {
            for (k, dk) in den.iter().enumerate() {
                let sub = dk * &c;
                rem[qi + k] -= sub;
            }
        }
        quot[qi] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Degree of `Phi_m`, i.e. Euler's totient of `m`.
pub fn phi_degree(m: u64) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// An element of the cyclotomic field `Q(zeta_order)`.
///
/// `coeffs[i]` is the coefficient of `zeta^i`; the vector length always equals
/// `phi(order)`.  Order 1 means the element is a plain rational.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar { order: 1, coeffs: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        CycScalar { order: 1, coeffs: vec![Rational::one()] }
    }

    pub fn from_rational(r: Rational) -> Self {
        CycScalar { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    /// `zeta_m^k`, reduced into the power basis of `Q(zeta_m)`.
    pub fn root_of_unity(m: u64, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let deg = phi_degree(m);
        let mut raw = vec![BigRational::zero(); k + 1];
        raw[k] = BigRational::one();
        let coeffs = reduce_mod_cyclotomic(raw, m, deg);
        CycScalar { order: m, coeffs }.canonicalize()
    }

    /// Builds an element of `Q(zeta_m)` from power-basis coefficients.
    ///
    /// The vector must have exactly `phi(m)` entries.
    pub fn from_coeffs(order: u64, coeffs: Vec<Rational>) -> Result<Self, ScalarError> {
        if coeffs.len() != phi_degree(order) {
            return Err(ScalarError::Parse(format!(
                "order-{order} element needs {} coefficients, got {}",
                phi_degree(order),
                coeffs.len()
            )));
        }
        Ok(CycScalar { order, coeffs }.canonicalize())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// The value as a rational, when it is one (i.e. order 1 after reduction).
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.order == 1 {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Embeds into `Q(zeta_n)`; requires `order | n`.
    pub fn embed(&self, n: u64) -> Result<Self, ScalarError> {
        if n % self.order != 0 {
            return Err(ScalarError::NotASubfield { from: self.order, to: n });
        }
        Ok(self.embed_raw(n).canonicalize())
    }

    /// Embedding without the final canonical demotion, so the result is
    /// guaranteed to carry exactly `phi(n)` coefficients at order `n`.
    fn embed_raw(&self, n: u64) -> Self {
        debug_assert_eq!(n % self.order, 0);
        if n == self.order {
            return self.clone();
        }
        let step = (n / self.order) as usize;
        let deg = phi_degree(n);
        // zeta_order^i maps to zeta_n^(i*step).
        let top = (self.coeffs.len() - 1) * step;
        let mut raw = vec![BigRational::zero(); top + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[i * step] += c.as_big();
            }
        }
        let coeffs = reduce_mod_cyclotomic(raw, n, deg);
        CycScalar { order: n, coeffs }
    }

    /// Rewrites both operands in the smallest common cyclotomic field without
    /// demotion, so both coefficient vectors have equal length.
    fn unify(a: &CycScalar, b: &CycScalar) -> (CycScalar, CycScalar) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = a.order.lcm(&b.order);
        (a.embed_raw(l), b.embed_raw(l))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(CycScalar::from_rational(self.coeffs[0].inv()?));
        }
        let modulus: Vec<BigRational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let a: Vec<BigRational> = self.coeffs.iter().map(|c| c.as_big().clone()).collect();
        let inv = poly_modular_inverse(&a, &modulus)
            .expect("nonzero element of a field has an inverse");
        let deg = phi_degree(self.order);
        let coeffs = reduce_mod_cyclotomic(inv, self.order, deg);
        Ok(CycScalar { order: self.order, coeffs }.canonicalize())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = CycScalar::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= r;
        }
        out.canonicalize()
    }

    /// Canonical form: trim to order 1 when the element is rational.
    fn canonicalize(mut self) -> Self {
        if self.order > 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            let c0 = std::mem::take(&mut self.coeffs[0]);
            return CycScalar { order: 1, coeffs: vec![c0] };
        }
        self
    }
}

/// Reduces raw polynomial coefficients modulo `Phi_m`, returning exactly `deg`
/// entries.
fn reduce_mod_cyclotomic(mut raw: Vec<BigRational>, m: u64, deg: usize) -> Vec<Rational> {
    let modulus = cyclotomic_polynomial(m);
    while raw.len() > deg {
        let top = raw.len() - 1;
        let lead = raw.pop().unwrap();
        if !lead.is_zero() {
            let shift = top - deg;
            for (k, c) in modulus.iter().take(deg).enumerate() {
                let sub = BigRational::from_integer(c.clone()) * &lead;
                raw[shift + k] -= sub;
            }
        }
    }
    raw.resize(deg, BigRational::zero());
    raw.into_iter().map(Rational::from_big).collect()
}

/// Extended Euclid in `Q[x]`: returns `u` with `u * a == 1 (mod modulus)`.
fn poly_modular_inverse(a: &[BigRational], modulus: &[BigRational]) -> Option<Vec<BigRational>> {
    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.last().map(|c| c.is_zero()).unwrap_or(false) {
            p.pop();
        }
        p
    }
    fn is_zero(p: &[BigRational]) -> bool {
        p.is_empty()
    }
    // Division with remainder; divisor need not be monic.
    fn divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut rem = num.to_vec();
        let dd = den.len() - 1;
        if rem.len() <= dd {
            return (vec![], trim(rem));
        }
        let lead = den.last().unwrap();
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for qi in (0..quot.len()).rev() {
            let c = &rem[qi + dd] / lead;
            if !c.is_zero() {
                for (k, dk) in den.iter().enumerate() {
                    let sub = dk * &c;
                    rem[qi + k] -= sub;
                }
            }
            quot[qi] = c;
        }
        (trim(quot), trim(rem))
    }
    fn sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        // a - q*b
        let mut out = a.to_vec();
        let prod_len = if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 };
        if out.len() < prod_len {
            out.resize(prod_len, BigRational::zero());
        }
        for (i, qi) in q.iter().enumerate() {
            if qi.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let sub = qi * bj;
                out[i + j] -= sub;
            }
        }
        trim(out)
    }

    let mut r0 = trim(modulus.to_vec());
    let mut r1 = trim(a.to_vec());
    let mut u0: Vec<BigRational> = vec![];
    let mut u1: Vec<BigRational> = vec![BigRational::one()];
    while !is_zero(&r1) {
        let (q, r) = divmod(&r0, &r1);
        let u = sub_mul(&u0, &q, &u1);
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, u);
    }
    // gcd is r0, a constant for coprime inputs.
    if r0.len() != 1 {
        return None;
    }
    let scale = r0[0].recip();
    Some(u0.into_iter().map(|c| c * &scale).collect())
}

impl Default for CycScalar {
    fn default() -> Self {
        CycScalar::zero()
    }
}

impl From<Rational> for CycScalar {
    fn from(r: Rational) -> Self {
        CycScalar::from_rational(r)
    }
}

impl Add for &CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        let (mut a, b) = CycScalar::unify(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a.canonicalize()
    }
}

impl Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        let (mut a, b) = CycScalar::unify(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a.canonicalize()
    }
}

impl Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        // Fast paths: zero and rational factors need no unification.
        if self.is_zero() || rhs.is_zero() {
            return CycScalar::zero();
        }
        if let Some(r) = self.as_rational() {
            return rhs.scale(r);
        }
        if let Some(r) = rhs.as_rational() {
            return self.scale(r);
        }
        let (a, b) = CycScalar::unify(self, rhs);
        let deg = phi_degree(a.order);
        let mut raw = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x.as_big() * y.as_big();
                }
            }
        }
        let coeffs = reduce_mod_cyclotomic(raw, a.order, deg);
        CycScalar { order: a.order, coeffs }.canonicalize()
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -c.clone();
        }
        out
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: CycScalar) -> CycScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: &CycScalar) -> CycScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycScalar> for CycScalar {
    fn mul_assign(&mut self, rhs: &CycScalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z{}", self.order)?,
                _ => write!(f, "({c})*z{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CycScalar {
    /// Rational values serialize as `"p/q"` strings, proper cyclotomic values
    /// as `{"order": m, "coeffs": [...]}`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        if let Some(r) = self.as_rational() {
            return r.serialize(serializer);
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("coeffs", &self.coeffs)?;
        map.serialize_entry("order", &self.order)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for CycScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rat(Rational),
            Cyc { order: u64, coeffs: Vec<Rational> },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Rat(r) => Ok(CycScalar::from_rational(r)),
            Repr::Cyc { order, coeffs } => {
                CycScalar::from_coeffs(order, coeffs).map_err(|e| D::Error::custom(format!("{e}")))
            }
        }
    }
}
