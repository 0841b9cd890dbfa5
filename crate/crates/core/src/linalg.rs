//! Exact linear algebra over cyclotomic scalars.
//!
//! The workhorse is [`RowSpace`], an incrementally maintained reduced
//! row-echelon basis.  Rows are absorbed one at a time (so evaluation sweeps
//! can generate them lazily and stop early once the rank is settled), local
//! accumulators built on disjoint row blocks merge associatively, and the
//! resulting rank, membership tests and nullspace are independent of row
//! order.  Before a row enters the basis its denominators are cleared and its
//! integer content divided out, which keeps the entries from swelling the way
//! naive fraction arithmetic would.

use num::bigint::BigInt;
use num::{Integer, One, Zero};

use crate::scalars::{CycScalar, Rational};

/// A reduced row-echelon basis for the span of the absorbed rows.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    /// Basis rows, ordered by pivot column; each pivot entry is 1 and is the
    /// only nonzero entry in its column among the basis rows.
    rows: Vec<Vec<CycScalar>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<CycScalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Eliminates the known pivots from `row` in place.
    fn reduce_in_place(&self, row: &mut [CycScalar]) {
        for (basis_row, &p) in self.rows.iter().zip(&self.pivots) {
            if row[p].is_zero() {
                continue;
            }
            let factor = row[p].clone();
            for (x, b) in row.iter_mut().zip(basis_row) {
                if !b.is_zero() {
                    *x -= &(&factor * b);
                }
            }
        }
    }

    /// Absorbs a row into the span.  Returns `true` when the rank grew.
    pub fn absorb(&mut self, mut row: Vec<CycScalar>) -> bool {
        assert_eq!(row.len(), self.cols);
        self.reduce_in_place(&mut row);
        normalize_content(&mut row);
        let Some(pivot) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        // Normalize the pivot to 1 and clear the pivot column above.
        let inv = row[pivot].inv().expect("pivot is nonzero");
        for c in row.iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        for (basis_row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if basis_row[pivot].is_zero() {
                continue;
            }
            let factor = basis_row[pivot].clone();
            for (b, r) in basis_row.iter_mut().zip(&row) {
                if !r.is_zero() {
                    *b -= &(&factor * r);
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, row);
        true
    }

    /// Whether `row` already lies in the span.
    pub fn contains(&self, row: &[CycScalar]) -> bool {
        assert_eq!(row.len(), self.cols);
        let mut r = row.to_vec();
        self.reduce_in_place(&mut r);
        r.iter().all(|c| c.is_zero())
    }

    /// Merges another accumulator over the same column space.
    pub fn merge(&mut self, other: RowSpace) {
        assert_eq!(self.cols, other.cols);
        for row in other.rows {
            self.absorb(row);
        }
    }

    /// A basis of `{ v : B v = 0 }` where `B` runs over the absorbed rows.
    ///
    /// One kernel vector per non-pivot column, in column order; entry at that
    /// column is 1.  For the zero row space this is the standard basis.
    pub fn nullspace(&self) -> Vec<Vec<CycScalar>> {
        let mut out = Vec::with_capacity(self.cols - self.rank());
        let mut next_pivot = 0usize;
        for col in 0..self.cols {
            if next_pivot < self.pivots.len() && self.pivots[next_pivot] == col {
                next_pivot += 1;
                continue;
            }
            let mut v = vec![CycScalar::zero(); self.cols];
            v[col] = CycScalar::one();
            for (basis_row, &p) in self.rows.iter().zip(&self.pivots) {
                if !basis_row[col].is_zero() {
                    v[p] = -&basis_row[col];
                }
            }
            out.push(v);
        }
        out
    }

    /// True when the other span is contained in this one.
    pub fn contains_space(&self, other: &RowSpace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Clears denominators and divides out the integer content of a row.
///
/// Purely a normalization of scale: the span is unchanged, but entries stay
/// integral and small through long elimination runs.
fn normalize_content(row: &mut [CycScalar]) {
    let mut denom_lcm = BigInt::one();
    let mut numer_gcd = BigInt::zero();
    for entry in row.iter() {
        for c in entry.coeffs() {
            if !c.is_zero() {
                denom_lcm = denom_lcm.lcm(c.denom());
                numer_gcd = numer_gcd.gcd(c.numer());
            }
        }
    }
    if numer_gcd.is_zero() {
        return;
    }
    let scale = Rational::from_big(num::rational::BigRational::new(denom_lcm, numer_gcd));
    if scale.is_one() {
        return;
    }
    let scale = CycScalar::from_rational(scale);
    for entry in row.iter_mut() {
        if !entry.is_zero() {
            *entry *= &scale;
        }
    }
}

/// Rank of a dense matrix given as rows.
pub fn rank(rows: &[Vec<CycScalar>], cols: usize) -> usize {
    let mut space = RowSpace::new(cols);
    for r in rows {
        space.absorb(r.clone());
    }
    space.rank()
}

/// Nullspace basis of the matrix whose rows are given.
pub fn nullspace(rows: &[Vec<CycScalar>], cols: usize) -> Vec<Vec<CycScalar>> {
    let mut space = RowSpace::new(cols);
    for r in rows {
        space.absorb(r.clone());
    }
    space.nullspace()
}

/// Do two row sets span the same subspace?
pub fn same_span(a: &[Vec<CycScalar>], b: &[Vec<CycScalar>], cols: usize) -> bool {
    let mut sa = RowSpace::new(cols);
    for r in a {
        sa.absorb(r.clone());
    }
    let mut sb = RowSpace::new(cols);
    for r in b {
        sb.absorb(r.clone());
    }
    sa.rank() == sb.rank() && sa.contains_space(&sb)
}
