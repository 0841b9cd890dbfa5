//! Finite groups as multiplication tables, subgroup embeddings, and
//! root-of-unity valued 2-cocycles.
//!
//! Conventions: group elements are indices `0..order`, element `0` is the
//! identity, and every constructor checks the full group axioms (identity,
//! inverses, exhaustive associativity) so that downstream code can rely on
//! them unconditionally.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::scalars::CycScalar;

/// Index of a group element within its group's table.
pub type GroupElem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is not square or has out-of-range entries")]
    MalformedTable,
    #[error("element 0 is not a two-sided identity (fails at element {0})")]
    IdentityNotZero(GroupElem),
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(GroupElem),
    #[error("associativity fails at triple ({0}, {1}, {2})")]
    NonAssociative(GroupElem, GroupElem, GroupElem),
    #[error("embedding does not preserve products at ({0}, {1})")]
    NotAHomomorphism(GroupElem, GroupElem),
    #[error("embedding is not injective or maps identity away from identity")]
    BadEmbedding,
    #[error("cocycle table shape does not match the group order")]
    MalformedCocycle,
    #[error("cocycle is not normalized at element {0}")]
    NotNormalized(GroupElem),
    #[error("cocycle identity fails at triple ({0}, {1}, {2})")]
    CocycleViolation(GroupElem, GroupElem, GroupElem),
}

/// A finite group presented by its full multiplication table.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    order: usize,
    /// `mult[a][b]` is the product `a * b`.
    mult: Vec<Vec<GroupElem>>,
    labels: Vec<String>,
    #[serde(skip)]
    inv: Vec<GroupElem>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {}, [{}])", self.order, self.labels.join(", "))
    }
}

impl FiniteGroup {
    /// Validates a raw table and builds the group.  `labels` may be empty, in
    /// which case default labels (`e`, `g1`, ...) are assigned.
    pub fn from_table(mult: Vec<Vec<GroupElem>>, labels: Vec<String>) -> Result<Self, GroupError> {
        let n = mult.len();
        if n == 0 || mult.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(GroupError::MalformedTable);
        }
        for a in 0..n {
            if mult[0][a] != a || mult[a][0] != a {
                return Err(GroupError::IdentityNotZero(a));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| mult[a][b] == 0 && mult[b][a] == 0) {
                Some(b) => inv[a] = b,
                None => return Err(GroupError::MissingInverse(a)),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(GroupError::NonAssociative(a, b, c));
                    }
                }
            }
        }
        let labels = if labels.is_empty() {
            (0..n).map(|i| if i == 0 { "e".into() } else { format!("g{i}") }).collect()
        } else if labels.len() == n {
            labels
        } else {
            return Err(GroupError::MalformedTable);
        };
        Ok(FiniteGroup { order: n, mult, labels, inv })
    }

    /// The cyclic group of order `n`, generated by element 1.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = if n == 2 {
            vec!["e".into(), "g".into()]
        } else {
            (0..n).map(|i| if i == 0 { "e".into() } else { format!("g{i}") }).collect()
        };
        FiniteGroup::from_table(mult, labels).expect("cyclic group tables are valid")
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// Direct product; the pair `(a, b)` becomes index `a * |G2| + b`.
    pub fn direct_product(g1: &FiniteGroup, g2: &FiniteGroup) -> Self {
        let n1 = g1.order;
        let n2 = g2.order;
        let idx = |a: usize, b: usize| a * n2 + b;
        let mut mult = vec![vec![0usize; n1 * n2]; n1 * n2];
        let mut labels = vec![String::new(); n1 * n2];
        for a1 in 0..n1 {
            for b1 in 0..n2 {
                labels[idx(a1, b1)] = format!("({},{})", g1.labels[a1], g2.labels[b1]);
                for a2 in 0..n1 {
                    for b2 in 0..n2 {
                        mult[idx(a1, b1)][idx(a2, b2)] =
                            idx(g1.mult[a1][a2], g2.mult[b1][b2]);
                    }
                }
            }
        }
        FiniteGroup::from_table(mult, labels).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        self.mult[a][b]
    }

    pub fn inv(&self, a: GroupElem) -> GroupElem {
        self.inv[a]
    }

    pub fn identity(&self) -> GroupElem {
        0
    }

    pub fn label(&self, a: GroupElem) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> {
        0..self.order
    }

    /// Product of a word of elements, left to right.
    pub fn product(&self, word: impl IntoIterator<Item = GroupElem>) -> GroupElem {
        word.into_iter().fold(0, |acc, g| self.mul(acc, g))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mult[a][b] == self.mult[b][a]))
    }
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[allow(dead_code)]
            #[serde(default)]
            order: Option<usize>,
            mult: Vec<Vec<GroupElem>>,
            #[serde(default)]
            labels: Vec<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if let Some(order) = raw.order {
            if order != raw.mult.len() {
                return Err(D::Error::custom("declared order does not match table size"));
            }
        }
        FiniteGroup::from_table(raw.mult, raw.labels).map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// An injective homomorphism from a subgroup `H` into an ambient group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupEmbedding {
    pub sub: FiniteGroup,
    /// `images[h]` is the ambient element representing `h`.
    pub images: Vec<GroupElem>,
}

impl SubgroupEmbedding {
    pub fn new(
        sub: FiniteGroup,
        images: Vec<GroupElem>,
        ambient: &FiniteGroup,
    ) -> Result<Self, GroupError> {
        let e = SubgroupEmbedding { sub, images };
        e.validate(ambient)?;
        Ok(e)
    }

    /// The identity embedding of a group into itself.
    pub fn identity(g: &FiniteGroup) -> Self {
        SubgroupEmbedding { sub: g.clone(), images: (0..g.order()).collect() }
    }

    /// The unique embedding of the trivial group.
    pub fn trivial_into(_ambient: &FiniteGroup) -> Self {
        SubgroupEmbedding { sub: FiniteGroup::trivial(), images: vec![0] }
    }

    pub fn validate(&self, ambient: &FiniteGroup) -> Result<(), GroupError> {
        let n = self.sub.order();
        if self.images.len() != n
            || self.images.iter().any(|&x| x >= ambient.order())
            || self.images[0] != 0
        {
            return Err(GroupError::BadEmbedding);
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if self.images[a] == self.images[b] {
                    return Err(GroupError::BadEmbedding);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.images[self.sub.mul(a, b)] != ambient.mul(self.images[a], self.images[b]) {
                    return Err(GroupError::NotAHomomorphism(a, b));
                }
            }
        }
        Ok(())
    }

    pub fn image(&self, h: GroupElem) -> GroupElem {
        self.images[h]
    }
}

/// A normalized 2-cocycle on a finite group with values among the `m`-th roots
/// of unity, stored as the exponent table `f(a, b) = zeta_m^{exp[a][b]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCocycle {
    /// Root-of-unity order of the values.
    pub m: u64,
    /// `exponents[a][b]` is the exponent of `f(a, b)`, taken mod `m`.
    pub exponents: Vec<Vec<u64>>,
}

impl TwoCocycle {
    /// The trivial cocycle (constant 1) on a group of the given order.
    pub fn trivial(group_order: usize) -> Self {
        TwoCocycle { m: 1, exponents: vec![vec![0; group_order]; group_order] }
    }

    /// Builds the coboundary of `delta: H -> Z_m` with `delta(e) = 0`:
    /// `f(a, b) = zeta^{delta(a) + delta(b) - delta(ab)}`.
    pub fn coboundary(group: &FiniteGroup, m: u64, delta: &[u64]) -> Self {
        assert_eq!(delta.len(), group.order());
        assert_eq!(delta[0] % m, 0, "coboundary data must vanish at the identity");
        let n = group.order();
        let mut exponents = vec![vec![0u64; n]; n];
        for a in 0..n {
            for b in 0..n {
                let raw = delta[a] as i64 + delta[b] as i64 - delta[group.mul(a, b)] as i64;
                exponents[a][b] = raw.rem_euclid(m as i64) as u64;
            }
        }
        TwoCocycle { m, exponents }
    }

    /// Checks shape, normalization and the cocycle identity
    /// `f(a,b) f(ab,c) = f(b,c) f(a,bc)`; reports the first failing triple.
    pub fn validate(&self, group: &FiniteGroup) -> Result<(), GroupError> {
        let n = group.order();
        if self.m == 0
            || self.exponents.len() != n
            || self.exponents.iter().any(|row| row.len() != n)
        {
            return Err(GroupError::MalformedCocycle);
        }
        for h in 0..n {
            if self.exponents[0][h] % self.m != 0 {
                return Err(GroupError::NotNormalized(h));
            }
            if self.exponents[h][0] % self.m != 0 {
                return Err(GroupError::NotNormalized(h));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.exponents[a][b] + self.exponents[group.mul(a, b)][c];
                    let rhs = self.exponents[b][c] + self.exponents[a][group.mul(b, c)];
                    if lhs % self.m != rhs % self.m {
                        return Err(GroupError::CocycleViolation(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// The value `f(a, b)` as an exact cyclotomic scalar.
    pub fn value(&self, a: GroupElem, b: GroupElem) -> CycScalar {
        CycScalar::root_of_unity(self.m, (self.exponents[a][b] % self.m) as i64)
    }
}
