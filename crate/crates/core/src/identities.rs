//! Evaluation of graded polynomials on graded algebras and everything built
//! on it: exhaustive and generic-element identity oracles, identity-space
//! kernels, degree-bounded T-ideal comparison, radical-substitution
//! bookkeeping, and the trace-emulation check.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebras::{GradedAlgebra, RadicalData};
use crate::groups::GroupElem;
use crate::linalg::RowSpace;
use crate::polynomials::{GradedPolynomial, PolyError, VarSpec};
use crate::scalars::{CycScalar, Rational, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("variable {0} is assigned a value of the wrong degree")]
    Inadmissible(u32),
    #[error("variable {0} has no assigned value")]
    Uncovered(u32),
    #[error("assigned value for variable {0} is not homogeneous of its degree")]
    NonHomogeneousValue(u32),
    #[error("refusing profile with {monomials} monomial orderings (limit {limit})")]
    RefusedSize { monomials: u128, limit: u128 },
    #[error("substituted values are linearly dependent")]
    ValuesDependent,
    #[error("trace matrix must be square of size equal to the alternating set")]
    BadTraceShape,
    #[error("polynomial must be multilinear for this operation")]
    NotMultilinear,
    #[error("groups of the two algebras differ")]
    GroupMismatch,
    #[error("{0}")]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Algebra(#[from] crate::algebras::AlgebraError),
}

/// A substitution: variable id to an index into a substitution frame (for the
/// standard frame, a basis index of the algebra).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment(pub BTreeMap<u32, usize>);

/// A pool of homogeneous values substitutions draw from.  The standard frame
/// is the algebra basis itself; the radical frame is the distinguished
/// evaluation basis split into radical and semisimple-complement vectors.
#[derive(Clone, Debug)]
pub struct Frame {
    vectors: Vec<Vec<CycScalar>>,
    degrees: Vec<GroupElem>,
    radical_flags: Option<Vec<bool>>,
    labels: Vec<String>,
}

impl Frame {
    pub fn standard(a: &GradedAlgebra) -> Frame {
        Frame {
            vectors: (0..a.dim()).map(|i| a.basis_vec(i)).collect(),
            degrees: a.degrees().to_vec(),
            radical_flags: None,
            labels: (0..a.dim()).map(|i| a.label(i).to_string()).collect(),
        }
    }

    pub fn from_radical_data(rad: &RadicalData) -> Frame {
        Frame {
            vectors: rad.eval_basis.vectors.clone(),
            degrees: rad.eval_basis.degree.clone(),
            radical_flags: Some(rad.eval_basis.is_radical.clone()),
            labels: (0..rad.eval_basis.vectors.len())
                .map(|i| {
                    let kind = if rad.eval_basis.is_radical[i] { "j" } else { "s" };
                    format!("{kind}{i}")
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &Vec<CycScalar> {
        &self.vectors[i]
    }

    pub fn degree(&self, i: usize) -> GroupElem {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn is_radical(&self, i: usize) -> bool {
        self.radical_flags.as_ref().map(|f| f[i]).unwrap_or(false)
    }

    /// Frame indices whose value has the given degree, ascending.
    pub fn component(&self, g: GroupElem) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == g).collect()
    }
}

/// Evaluates `f` under an assignment into the standard basis.
pub fn evaluate(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
    asg: &Assignment,
) -> Result<Vec<CycScalar>, IdentityError> {
    for v in f.alphabet() {
        let &idx = asg.0.get(&v.id).ok_or(IdentityError::Uncovered(v.id))?;
        if idx >= a.dim() || a.degree(idx) != v.degree {
            return Err(IdentityError::Inadmissible(v.id));
        }
    }
    let mut out = vec![CycScalar::zero(); a.dim()];
    for (word, coeff) in f.terms() {
        let basis_word: Vec<usize> = word.iter().map(|id| asg.0[id]).collect();
        for (k, c) in a.basis_word_product(&basis_word) {
            out[k] += &(coeff * &c);
        }
    }
    Ok(out)
}

/// Evaluates `f` substituting arbitrary homogeneous vectors for variables.
pub fn evaluate_with_values(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
    values: &BTreeMap<u32, Vec<CycScalar>>,
) -> Result<Vec<CycScalar>, IdentityError> {
    for v in f.alphabet() {
        let val = values.get(&v.id).ok_or(IdentityError::Uncovered(v.id))?;
        if val.len() != a.dim() {
            return Err(IdentityError::NonHomogeneousValue(v.id));
        }
        for (i, c) in val.iter().enumerate() {
            if !c.is_zero() && a.degree(i) != v.degree {
                return Err(IdentityError::NonHomogeneousValue(v.id));
            }
        }
    }
    let mut out = vec![CycScalar::zero(); a.dim()];
    for (word, coeff) in f.terms() {
        let mut acc: Option<Vec<CycScalar>> = None;
        for id in word {
            let val = &values[id];
            acc = Some(match acc {
                None => val.clone(),
                Some(prev) => a.mul_vec(&prev, val),
            });
        }
        let acc = acc.unwrap_or_else(|| {
            a.unit().cloned().expect("empty word requires a unital algebra")
        });
        for (k, c) in acc.iter().enumerate() {
            if !c.is_zero() {
                out[k] += &(coeff * c);
            }
        }
    }
    Ok(out)
}

/// Outcome of an identity check.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub is_identity: bool,
    /// True when no admissible assignment exists at all.
    pub vacuous: bool,
    /// First nonzero assignment in lexicographic order, if any.
    pub counterexample: Option<Assignment>,
    /// Number of assignments in the sweep (0 for the generic oracle).
    pub assignments_swept: u64,
}

/// Decides whether `f` is a graded identity of `a`.
///
/// Multilinear polynomials are checked exhaustively over basis substitutions
/// (sound and complete on the multilinear layer); everything else routes
/// through the generic-element oracle.
pub fn is_identity(f: &GradedPolynomial, a: &GradedAlgebra) -> Result<IdentityResult, IdentityError> {
    if f.multilinear() {
        is_identity_exhaustive(f, a)
    } else {
        let generic = evaluate_generic(f, a)?;
        Ok(IdentityResult {
            is_identity: generic.is_identity,
            vacuous: generic.vacuous,
            counterexample: None,
            assignments_swept: 0,
        })
    }
}

fn is_identity_exhaustive(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
) -> Result<IdentityResult, IdentityError> {
    let frame = Frame::standard(a);
    let vars: Vec<VarSpec> = f.alphabet().to_vec();
    let pools: Vec<Vec<usize>> = vars.iter().map(|v| frame.component(v.degree)).collect();
    if pools.iter().any(|p| p.is_empty()) {
        return Ok(IdentityResult {
            is_identity: true,
            vacuous: true,
            counterexample: None,
            assignments_swept: 0,
        });
    }
    let total: u64 = pools.iter().map(|p| p.len() as u64).product();
    let hit = crate::par::find_first_map(total as usize, |t| {
        let asg = decode_assignment(t, &vars, &pools);
        let val = evaluate(f, a, &asg).expect("admissible by construction");
        if val.iter().any(|c| !c.is_zero()) {
            Some(asg)
        } else {
            None
        }
    });
    Ok(IdentityResult {
        is_identity: hit.is_none(),
        vacuous: false,
        counterexample: hit.map(|(_, asg)| asg),
        assignments_swept: total,
    })
}

/// Decodes a mixed-radix index into an assignment (most significant digit =
/// first variable, so the sweep is lexicographic).
fn decode_assignment(t: usize, vars: &[VarSpec], pools: &[Vec<usize>]) -> Assignment {
    let radices: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    let digits = decode_digits(t, &radices);
    Assignment(
        vars.iter().enumerate().map(|(i, v)| (v.id, pools[i][digits[i]])).collect(),
    )
}

/// Identity check for a polynomial alternating in the given disjoint id-sets:
/// the sweep restricts each alternating set to strictly increasing
/// combinations of frame indices (values at permuted or repeated assignments
/// are determined by antisymmetry), which both prunes the search and
/// certifies `f` to be an identity outright when some component is smaller
/// than its alternating set.
pub fn alternating_is_identity(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
    alt_sets: &[Vec<u32>],
) -> Result<IdentityResult, IdentityError> {
    for s in alt_sets {
        if !f.is_alternating(s)? {
            return Err(IdentityError::Poly(PolyError::NotAlternating));
        }
    }
    let frame = Frame::standard(a);
    let in_alt: std::collections::BTreeSet<u32> =
        alt_sets.iter().flatten().copied().collect();
    let free_vars: Vec<VarSpec> =
        f.alphabet().iter().filter(|v| !in_alt.contains(&v.id)).copied().collect();
    let free_pools: Vec<Vec<usize>> =
        free_vars.iter().map(|v| frame.component(v.degree)).collect();
    // Per alternating set: all strictly increasing index combinations.
    let mut set_combos: Vec<Vec<Vec<usize>>> = Vec::new();
    for s in alt_sets {
        let degree = f.degree_of(s[0])?;
        let pool = frame.component(degree);
        set_combos.push(sorted_combinations(&pool, s.len()));
    }
    if set_combos.iter().any(|c| c.is_empty()) {
        // Some component is too small to receive its alternating set
        // injectively: every evaluation vanishes by antisymmetry.
        return Ok(IdentityResult {
            is_identity: true,
            vacuous: false,
            counterexample: None,
            assignments_swept: 0,
        });
    }
    if free_pools.iter().any(|p| p.is_empty()) {
        return Ok(IdentityResult {
            is_identity: true,
            vacuous: true,
            counterexample: None,
            assignments_swept: 0,
        });
    }
    let mut radices: Vec<usize> = set_combos.iter().map(|c| c.len()).collect();
    radices.extend(free_pools.iter().map(|p| p.len()));
    let total: u64 = radices.iter().map(|&r| r as u64).product();
    let hit = crate::par::find_first_map(total as usize, |t| {
        let digits = decode_digits(t, &radices);
        let mut asg = BTreeMap::new();
        for (si, s) in alt_sets.iter().enumerate() {
            let combo = &set_combos[si][digits[si]];
            for (vi, &id) in s.iter().enumerate() {
                asg.insert(id, combo[vi]);
            }
        }
        for (fi, v) in free_vars.iter().enumerate() {
            asg.insert(v.id, free_pools[fi][digits[alt_sets.len() + fi]]);
        }
        let asg = Assignment(asg);
        let val = evaluate(f, a, &asg).expect("admissible by construction");
        if val.iter().any(|c| !c.is_zero()) {
            Some(asg)
        } else {
            None
        }
    });
    Ok(IdentityResult {
        is_identity: hit.is_none(),
        vacuous: false,
        counterexample: hit.map(|(_, asg)| asg),
        assignments_swept: total,
    })
}

/// All strictly increasing `k`-element choices from `pool` (itself ascending).
pub fn sorted_combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + (k - i) < pool.len() {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn decode_digits(mut t: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0usize; radices.len()];
    for (i, &r) in radices.iter().enumerate().rev() {
        digits[i] = t % r;
        t /= r;
    }
    digits
}

/// Generic-element data: one vector of commutative polynomials per variable.
#[derive(Clone, Debug)]
pub struct GenericElements {
    /// `values[i]` is the generic element for profile position `i`, a vector
    /// of polynomials in the lambda variables.
    pub values: Vec<Vec<SparsePoly>>,
    /// Profile positions whose degree component is zero-dimensional.
    pub unrealizable: Vec<u32>,
}

/// Builds the generic elements `y_i = sum_j b_{j} lambda_{i,j}` (the sum over
/// the basis of the component of the variable's degree).  Lambda variables
/// are numbered `i * dim + j`.
pub fn generic_elements(a: &GradedAlgebra, profile: &[VarSpec]) -> GenericElements {
    let mut values = Vec::with_capacity(profile.len());
    let mut unrealizable = Vec::new();
    for (i, v) in profile.iter().enumerate() {
        let component = a.component_basis(v.degree);
        if component.is_empty() {
            unrealizable.push(v.id);
        }
        let mut vec = vec![SparsePoly::zero(); a.dim()];
        for j in component {
            vec[j] = SparsePoly::var(i * a.dim() + j);
        }
        values.push(vec);
    }
    GenericElements { values, unrealizable }
}

/// Result of the generic-element oracle.
#[derive(Clone, Debug)]
pub struct GenericEvaluation {
    pub is_identity: bool,
    pub vacuous: bool,
    /// The evaluated coordinate polynomials (all zero iff identity).
    pub coordinates: Vec<SparsePoly>,
}

/// Evaluates `f` on generic elements.  `f` is a graded identity of `a` iff
/// every coordinate polynomial vanishes; this decides arbitrary (not
/// necessarily multilinear) polynomials.
pub fn evaluate_generic(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
) -> Result<GenericEvaluation, IdentityError> {
    let profile: Vec<VarSpec> = f.alphabet().to_vec();
    let generic = generic_elements(a, &profile);
    if !generic.unrealizable.is_empty() {
        // Some variable cannot be substituted at all: vacuous identity.
        let used: Vec<u32> = f
            .terms()
            .keys()
            .flat_map(|w| w.iter().copied())
            .filter(|id| generic.unrealizable.contains(id))
            .collect();
        if !used.is_empty() {
            return Ok(GenericEvaluation {
                is_identity: true,
                vacuous: true,
                coordinates: vec![SparsePoly::zero(); a.dim()],
            });
        }
    }
    let index_of: BTreeMap<u32, usize> =
        profile.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    let mut out = vec![SparsePoly::zero(); a.dim()];
    for (word, coeff) in f.terms() {
        let mut acc: Option<Vec<SparsePoly>> = None;
        for id in word {
            let val = &generic.values[index_of[id]];
            acc = Some(match acc {
                None => val.clone(),
                Some(prev) => mul_generic(a, &prev, val),
            });
        }
        let acc = acc.expect("empty words do not arise from nonzero polynomials");
        for (k, p) in acc.into_iter().enumerate() {
            if !p.is_zero() {
                out[k] += &p.scale(coeff);
            }
        }
    }
    Ok(GenericEvaluation {
        is_identity: out.iter().all(|p| p.is_zero()),
        vacuous: false,
        coordinates: out,
    })
}

fn mul_generic(a: &GradedAlgebra, x: &[SparsePoly], y: &[SparsePoly]) -> Vec<SparsePoly> {
    let mut out = vec![SparsePoly::zero(); a.dim()];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let prod = xi * yj;
            for (k, c) in a.sc_entry(i, j) {
                out[*k] += &prod.scale(c);
            }
        }
    }
    out
}

/// The multilinear identity layer of an algebra at a fixed degree profile: a
/// basis of the kernel of the evaluation map on the span of the `m!` monomial
/// orderings.
#[derive(Clone, Debug)]
pub struct IdentitySpace {
    pub profile: Vec<VarSpec>,
    /// The `m!` words, lexicographic in the variable ids.
    pub monomials: Vec<Vec<u32>>,
    /// Kernel vectors over the monomials.
    pub basis: Vec<Vec<CycScalar>>,
    pub vacuous: bool,
}

impl IdentitySpace {
    pub fn kernel_dim(&self) -> usize {
        self.basis.len()
    }

    /// Renders a kernel vector as a polynomial.
    pub fn polynomial(&self, vector: &[CycScalar]) -> GradedPolynomial {
        let mut p = GradedPolynomial::zero(self.profile.clone()).expect("profile ids distinct");
        for (w, c) in self.monomials.iter().zip(vector) {
            p.add_term(w.clone(), c.clone()).expect("monomials use profile ids");
        }
        p
    }
}

const IDENTITY_SPACE_LIMIT: u128 = 5040; // 7!

/// Computes the multilinear identity space at `profile`.  Rows of the
/// evaluation matrix are generated assignment by assignment and absorbed
/// incrementally, stopping as soon as the rank reaches `m!` (kernel zero).
pub fn identity_space(
    a: &GradedAlgebra,
    profile: &[VarSpec],
) -> Result<IdentitySpace, IdentityError> {
    let m = profile.len();
    let monomial_count: u128 = (1..=m as u128).product();
    if monomial_count > IDENTITY_SPACE_LIMIT {
        return Err(IdentityError::RefusedSize {
            monomials: monomial_count,
            limit: IDENTITY_SPACE_LIMIT,
        });
    }
    let id_order: Vec<u32> = {
        let mut s: Vec<u32> = profile.iter().map(|v| v.id).collect();
        s.sort_unstable();
        s.dedup();
        if s.len() != m {
            return Err(IdentityError::Poly(PolyError::DuplicateId(profile[0].id)));
        }
        s
    };
    let monomials: Vec<Vec<u32>> = crate::polynomials::permutations_with_signs(m)
        .into_iter()
        .map(|(perm, _)| perm.into_iter().map(|i| id_order[i]).collect())
        .collect();
    let degree_of: BTreeMap<u32, GroupElem> =
        profile.iter().map(|v| (v.id, v.degree)).collect();
    let pools: Vec<Vec<usize>> =
        id_order.iter().map(|id| a.component_basis(degree_of[id])).collect();
    if pools.iter().any(|p| p.is_empty()) {
        // Vacuous: the kernel is everything.
        let dim = monomials.len();
        let basis = (0..dim)
            .map(|i| {
                let mut v = vec![CycScalar::zero(); dim];
                v[i] = CycScalar::one();
                v
            })
            .collect();
        return Ok(IdentitySpace { profile: profile.to_vec(), monomials, basis, vacuous: true });
    }
    let radices: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    let total: usize = radices.iter().product();
    let cols = monomials.len();
    let mut space = RowSpace::new(cols);
    let chunk = 64usize;
    let mut start = 0usize;
    'sweep: while start < total {
        let end = (start + chunk).min(total);
        // Build rows for this block of assignments in parallel, in order.
        let blocks = crate::par::map_indexed(end - start, |off| {
            let t = start + off;
            let digits = decode_digits(t, &radices);
            let assignment: BTreeMap<u32, usize> = id_order
                .iter()
                .enumerate()
                .map(|(i, &id)| (id, pools[i][digits[i]]))
                .collect();
            // One row per output coordinate: entry (w) = coeff of b_k in w(asg).
            let mut rows: Vec<Vec<CycScalar>> = Vec::new();
            let mut by_coord: BTreeMap<usize, Vec<CycScalar>> = BTreeMap::new();
            for (wi, word) in monomials.iter().enumerate() {
                let basis_word: Vec<usize> = word.iter().map(|id| assignment[id]).collect();
                for (k, c) in a.basis_word_product(&basis_word) {
                    by_coord.entry(k).or_insert_with(|| vec![CycScalar::zero(); cols])[wi] = c;
                }
            }
            for (_, row) in by_coord {
                rows.push(row);
            }
            rows
        });
        for rows in blocks {
            for row in rows {
                space.absorb(row);
            }
            if space.rank() == cols {
                break 'sweep;
            }
        }
        start = end;
    }
    let basis = space.nullspace();
    Ok(IdentitySpace { profile: profile.to_vec(), monomials, basis, vacuous: false })
}

/// Verdict of a degree-bounded T-ideal comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TIdealOrder {
    Equal,
    /// `id(A)` is strictly contained in `id(B)` up to the bound.
    AInB,
    /// `id(B)` is strictly contained in `id(A)` up to the bound.
    BInA,
    Incomparable,
}

#[derive(Clone, Debug)]
pub struct TIdealComparison {
    pub verdict: TIdealOrder,
    pub max_degree: usize,
    /// Profile and polynomial witnessing an identity of B that A misses.
    pub witness_b_only: Option<(Vec<VarSpec>, GradedPolynomial)>,
    /// Profile and polynomial witnessing an identity of A that B misses.
    pub witness_a_only: Option<(Vec<VarSpec>, GradedPolynomial)>,
}

/// Compares the multilinear identity layers of two algebras over the same
/// group at every degree profile of total degree `<= max_degree`, in
/// deterministic profile order.
pub fn tideals_compare(
    a: &GradedAlgebra,
    b: &GradedAlgebra,
    max_degree: usize,
) -> Result<TIdealComparison, IdentityError> {
    if a.group().order() != b.group().order() {
        return Err(IdentityError::GroupMismatch);
    }
    let r = a.group().order();
    let mut witness_a_only = None;
    let mut witness_b_only = None;
    for m in 1..=max_degree {
        // All degree sequences of length m, lexicographic.
        let mut seq = vec![0usize; m];
        loop {
            let profile: Vec<VarSpec> = seq
                .iter()
                .enumerate()
                .map(|(i, &g)| VarSpec { id: i as u32 + 1, degree: g })
                .collect();
            let sa = identity_space(a, &profile)?;
            let sb = identity_space(b, &profile)?;
            let mut space_a = RowSpace::new(sa.monomials.len());
            for v in &sa.basis {
                space_a.absorb(v.clone());
            }
            let mut space_b = RowSpace::new(sb.monomials.len());
            for v in &sb.basis {
                space_b.absorb(v.clone());
            }
            if witness_a_only.is_none() {
                if let Some(v) = sa.basis.iter().find(|v| !space_b.contains(v)) {
                    witness_a_only = Some((profile.clone(), sa.polynomial(v)));
                }
            }
            if witness_b_only.is_none() {
                if let Some(v) = sb.basis.iter().find(|v| !space_a.contains(v)) {
                    witness_b_only = Some((profile.clone(), sb.polynomial(v)));
                }
            }
            // next degree sequence
            let mut i = m;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                seq[i] += 1;
                if seq[i] < r {
                    break;
                }
                seq[i] = 0;
            }
            if seq.iter().all(|&g| g == 0) {
                break;
            }
        }
    }
    let verdict = match (&witness_a_only, &witness_b_only) {
        (None, None) => TIdealOrder::Equal,
        (None, Some(_)) => TIdealOrder::AInB,
        (Some(_), None) => TIdealOrder::BInA,
        (Some(_), Some(_)) => TIdealOrder::Incomparable,
    };
    Ok(TIdealComparison { verdict, max_degree, witness_b_only, witness_a_only })
}

/// Number of radical substitutions an assignment into the radical frame makes.
pub fn count_radical_substitutions(asg: &Assignment, frame: &Frame) -> usize {
    asg.0.values().filter(|&&i| frame.is_radical(i)).count()
}

/// Outcome of a property-K check.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyK {
    pub holds: bool,
    pub is_identity: bool,
    /// Threshold `n_A - 1`.
    pub radical_threshold: usize,
    /// An assignment with fewer than the threshold radical substitutions that
    /// evaluates nonzero (disproving the property), if one exists.
    pub violation: Option<Assignment>,
}

/// Checks whether `f` vanishes on every admissible evaluation with fewer than
/// `n_A - 1` radical substitutions while being a non-identity overall.
/// Substitutions run over the distinguished homogeneous evaluation basis.
pub fn property_k_check(
    f: &GradedPolynomial,
    a: &GradedAlgebra,
    rad: &RadicalData,
) -> Result<PropertyK, IdentityError> {
    if !f.multilinear() {
        return Err(IdentityError::NotMultilinear);
    }
    let frame = Frame::from_radical_data(rad);
    let threshold = rad.nilpotency_index.saturating_sub(1);
    let vars: Vec<VarSpec> = f.alphabet().to_vec();
    let pools: Vec<Vec<usize>> = vars.iter().map(|v| frame.component(v.degree)).collect();
    if pools.iter().any(|p| p.is_empty()) {
        // Vacuous: f is an identity, hence cannot satisfy property K.
        return Ok(PropertyK {
            holds: false,
            is_identity: true,
            radical_threshold: threshold,
            violation: None,
        });
    }
    let radices: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    let total: usize = radices.iter().product();
    let mut violation = None;
    let mut any_nonzero = false;
    for t in 0..total {
        let digits = decode_digits(t, &radices);
        let asg = Assignment(
            vars.iter().zip(&digits).enumerate().map(|(i, (v, &d))| (v.id, pools[i][d])).collect(),
        );
        let values: BTreeMap<u32, Vec<CycScalar>> =
            asg.0.iter().map(|(&id, &i)| (id, frame.vector(i).clone())).collect();
        let val = evaluate_with_values(f, a, &values)?;
        let nonzero = val.iter().any(|c| !c.is_zero());
        if nonzero {
            any_nonzero = true;
            if count_radical_substitutions(&asg, &frame) < threshold && violation.is_none() {
                violation = Some(asg);
            }
        }
    }
    Ok(PropertyK {
        holds: violation.is_none() && any_nonzero,
        is_identity: !any_nonzero,
        radical_threshold: threshold,
        violation,
    })
}

/// Verifies the trace-emulation equality
/// `Tr(T) f(a_1..a_t; b) = sum_k f(a_1, ..., T a_k, ..., a_t; b)`
/// for `f` alternating in `t_ids`, values given by `asg`, and `T` a `t x t`
/// rational matrix acting in the frame of the substituted values
/// (`T a_k = sum_l T[l][k] a_l`).
pub fn verify_theorem_j(
    a: &GradedAlgebra,
    f: &GradedPolynomial,
    t_ids: &[u32],
    asg: &Assignment,
    t_matrix: &[Vec<Rational>],
) -> Result<bool, IdentityError> {
    let t = t_ids.len();
    if t_matrix.len() != t || t_matrix.iter().any(|row| row.len() != t) {
        return Err(IdentityError::BadTraceShape);
    }
    if !f.is_alternating(t_ids)? {
        return Err(IdentityError::Poly(PolyError::NotAlternating));
    }
    // Values of the alternating variables must be linearly independent.
    let mut span = RowSpace::new(a.dim());
    let mut values: BTreeMap<u32, Vec<CycScalar>> = BTreeMap::new();
    for v in f.alphabet() {
        let &idx = asg.0.get(&v.id).ok_or(IdentityError::Uncovered(v.id))?;
        if idx >= a.dim() || a.degree(idx) != v.degree {
            return Err(IdentityError::Inadmissible(v.id));
        }
        values.insert(v.id, a.basis_vec(idx));
    }
    for &id in t_ids {
        if !span.absorb(values[&id].clone()) {
            return Err(IdentityError::ValuesDependent);
        }
    }
    let base = evaluate_with_values(f, a, &values)?;
    let mut trace = CycScalar::zero();
    for k in 0..t {
        trace += &CycScalar::from_rational(t_matrix[k][k].clone());
    }
    let lhs: Vec<CycScalar> = base.iter().map(|c| &trace * c).collect();
    let mut rhs = vec![CycScalar::zero(); a.dim()];
    for k in 0..t {
        // Replace a_k by T a_k = sum_l T[l][k] a_l.
        let mut replaced = values.clone();
        let mut tak = vec![CycScalar::zero(); a.dim()];
        for l in 0..t {
            let coeff = CycScalar::from_rational(t_matrix[l][k].clone());
            if coeff.is_zero() {
                continue;
            }
            for (pos, c) in values[&t_ids[l]].iter().enumerate() {
                tak[pos] += &(&coeff * c);
            }
        }
        replaced.insert(t_ids[k], tak);
        let term = evaluate_with_values(f, a, &replaced)?;
        for (pos, c) in term.into_iter().enumerate() {
            rhs[pos] += &c;
        }
    }
    Ok(lhs == rhs)
}
