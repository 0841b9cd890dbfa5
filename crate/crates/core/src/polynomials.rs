//! Formal noncommutative polynomials over a graded variable alphabet:
//! Capelli families, alternation, the tilde/u-operator calculus, and bounded
//! T-ideal consequence generation.
//!
//! A polynomial is a finite sum of words in variable ids with exact scalar
//! coefficients.  Every variable carries a fixed homogeneous degree in a
//! finite group; the group itself is passed to the operations that need to
//! multiply degrees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{FiniteGroup, GroupElem};
use crate::scalars::CycScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable id {0} is not in the alphabet")]
    UnknownId(u32),
    #[error("duplicate variable id {0} in the alphabet")]
    DuplicateId(u32),
    #[error("the set mixes degrees; alternation requires a homogeneous set")]
    MixedDegrees,
    #[error("polynomial is not multilinear in variable {0}")]
    NotMultilinearIn(u32),
    #[error("polynomial is not alternating in the given set")]
    NotAlternating,
    #[error("index {j} out of range 0..={n}")]
    JOutOfRange { j: usize, n: usize },
    #[error("variable id {0} is already used; a fresh id is required")]
    NotFresh(u32),
}

/// A graded variable: an id together with its homogeneous degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarSpec {
    pub id: u32,
    pub degree: GroupElem,
}

/// A formal polynomial: an alphabet of graded variables and a map from words
/// (sequences of ids) to nonzero scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPolynomial {
    alphabet: Vec<VarSpec>,
    terms: BTreeMap<Vec<u32>, CycScalar>,
}

impl GradedPolynomial {
    /// The zero polynomial over the given alphabet.
    pub fn zero(alphabet: Vec<VarSpec>) -> Result<Self, PolyError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &alphabet {
            if !seen.insert(v.id) {
                return Err(PolyError::DuplicateId(v.id));
            }
        }
        let mut alphabet = alphabet;
        alphabet.sort();
        Ok(GradedPolynomial { alphabet, terms: BTreeMap::new() })
    }

    /// A single monomial `coeff * word`.
    pub fn monomial(
        alphabet: Vec<VarSpec>,
        word: Vec<u32>,
        coeff: CycScalar,
    ) -> Result<Self, PolyError> {
        let mut p = GradedPolynomial::zero(alphabet)?;
        p.add_term(word, coeff)?;
        Ok(p)
    }

    pub fn alphabet(&self) -> &[VarSpec] {
        &self.alphabet
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, CycScalar> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_of(&self, id: u32) -> Result<GroupElem, PolyError> {
        self.alphabet
            .iter()
            .find(|v| v.id == id)
            .map(|v| v.degree)
            .ok_or(PolyError::UnknownId(id))
    }

    /// Adds `coeff * word` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, word: Vec<u32>, coeff: CycScalar) -> Result<(), PolyError> {
        if coeff.is_zero() {
            return Ok(());
        }
        for &id in &word {
            self.degree_of(id)?;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    /// Adds another polynomial over the same alphabet (ids missing from ours
    /// are an error).
    pub fn add_assign(&mut self, other: &GradedPolynomial) -> Result<(), PolyError> {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone())?;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: &CycScalar) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for coeff in self.terms.values_mut() {
            *coeff *= c;
        }
    }

    pub fn negated(&self) -> GradedPolynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    /// True when every word uses every alphabet id exactly once.
    pub fn multilinear(&self) -> bool {
        self.terms.keys().all(|w| {
            w.len() == self.alphabet.len()
                && self.alphabet.iter().all(|v| w.iter().filter(|&&x| x == v.id).count() == 1)
        })
    }

    /// True when every word uses every id of `s` exactly once.
    pub fn multilinear_in(&self, s: &[u32]) -> bool {
        self.terms
            .keys()
            .all(|w| s.iter().all(|&id| w.iter().filter(|&&x| x == id).count() == 1))
    }

    /// G-degree of a word: the ordered product of its variable degrees.
    pub fn word_degree(&self, word: &[u32], group: &FiniteGroup) -> Result<GroupElem, PolyError> {
        let mut d = group.identity();
        for &id in word {
            d = group.mul(d, self.degree_of(id)?);
        }
        Ok(d)
    }

    /// True when all words share the same G-degree.
    pub fn strongly_homogeneous(&self, group: &FiniteGroup) -> Result<bool, PolyError> {
        let mut degree = None;
        for w in self.terms.keys() {
            let d = self.word_degree(w, group)?;
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    /// Splits the polynomial into its strongly homogeneous parts, keyed by
    /// G-degree, in group-element order.  The parts sum back to the input.
    pub fn homogeneous_components(
        &self,
        group: &FiniteGroup,
    ) -> Result<Vec<(GroupElem, GradedPolynomial)>, PolyError> {
        let mut parts: BTreeMap<GroupElem, GradedPolynomial> = BTreeMap::new();
        for (w, c) in &self.terms {
            let d = self.word_degree(w, group)?;
            parts
                .entry(d)
                .or_insert_with(|| GradedPolynomial {
                    alphabet: self.alphabet.clone(),
                    terms: BTreeMap::new(),
                })
                .add_term(w.clone(), c.clone())?;
        }
        Ok(parts.into_iter().collect())
    }

    /// Applies a variable renaming (a map on ids) to every word.  Used
    /// internally by alternation and the tilde transform; the map must be a
    /// permutation of a subset of the alphabet fixing degrees or the caller
    /// takes responsibility for the result's grading.
    fn rename(&self, map: &BTreeMap<u32, u32>) -> GradedPolynomial {
        let mut out = GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms: BTreeMap::new(),
        };
        for (w, c) in &self.terms {
            let new_word: Vec<u32> = w.iter().map(|id| *map.get(id).unwrap_or(id)).collect();
            out.add_term(new_word, c.clone()).expect("renaming stays inside the alphabet");
        }
        out
    }

    /// Antisymmetrizes over the id-set `s`:
    /// `sum_{sigma in Sym(s)} sgn(sigma) f^sigma`.
    ///
    /// Requires all ids of `s` to exist with one common degree and `f` to be
    /// multilinear in `s`.
    pub fn alternate(&self, s: &[u32]) -> Result<GradedPolynomial, PolyError> {
        check_homogeneous_set(self, s)?;
        if !self.multilinear_in(s) {
            return Err(PolyError::NotMultilinearIn(
                *s.iter()
                    .find(|&&id| {
                        self.terms.keys().any(|w| w.iter().filter(|&&x| x == id).count() != 1)
                    })
                    .unwrap_or(&s[0]),
            ));
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        let mut out = GradedPolynomial {
            alphabet: self.alphabet.clone(),
            terms: BTreeMap::new(),
        };
        for (perm, sign) in permutations_with_signs(sorted.len()) {
            let map: BTreeMap<u32, u32> =
                sorted.iter().enumerate().map(|(i, &id)| (id, sorted[perm[i]])).collect();
            let image = self.rename(&map);
            let image = if sign { image.negated() } else { image };
            out.add_assign(&image)?;
        }
        Ok(out)
    }

    /// True iff `f^tau = -f` for every adjacent transposition `tau` of `s`.
    pub fn is_alternating(&self, s: &[u32]) -> Result<bool, PolyError> {
        check_homogeneous_set(self, s)?;
        if !self.multilinear_in(s) {
            return Err(PolyError::NotMultilinearIn(s[0]));
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        for i in 0..sorted.len().saturating_sub(1) {
            let mut map = BTreeMap::new();
            map.insert(sorted[i], sorted[i + 1]);
            map.insert(sorted[i + 1], sorted[i]);
            if self.rename(&map) != self.negated() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Verifies ids exist and share one degree.
fn check_homogeneous_set(f: &GradedPolynomial, s: &[u32]) -> Result<(), PolyError> {
    if s.is_empty() {
        return Ok(());
    }
    let d0 = f.degree_of(s[0])?;
    for &id in &s[1..] {
        if f.degree_of(id)? != d0 {
            return Err(PolyError::MixedDegrees);
        }
    }
    let mut dedup = s.to_vec();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != s.len() {
        return Err(PolyError::DuplicateId(s[0]));
    }
    Ok(())
}

/// All permutations of `0..n` in lexicographic order, with their parity
/// (`true` = odd).
pub(crate) fn permutations_with_signs(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push((perm.clone(), permutation_parity(&perm)));
        // next_permutation in lex order
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    out
}

pub(crate) fn permutation_parity(perm: &[usize]) -> bool {
    let mut visited = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !visited[at] {
            visited[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Ids `1..=n` used for the alternating x-variables of [`capelli`].
pub fn capelli_x_ids(n: usize) -> Vec<u32> {
    (1..=n as u32).collect()
}

/// Ids `n+1..=2n` used for the interleaved y-variables of [`capelli`].
pub fn capelli_y_ids(n: usize) -> Vec<u32> {
    (n as u32 + 1..=2 * n as u32).collect()
}

/// The degree-`g` Capelli polynomial
/// `sum_{sigma} sgn(sigma) x_{sigma(1)} y_1 x_{sigma(2)} y_2 ... x_{sigma(n)} y_n`
/// with all `x_i` of degree `g` and `y_i` of the given degrees.  The x-set
/// gets ids `1..=n`, the y-set ids `n+1..=2n`.
pub fn capelli(n: usize, g: GroupElem, y_degrees: &[GroupElem]) -> GradedPolynomial {
    assert!(n >= 1, "capelli polynomials need at least one alternating variable");
    assert_eq!(y_degrees.len(), n, "one y-degree per alternating position");
    let mut alphabet = Vec::with_capacity(2 * n);
    for i in 1..=n as u32 {
        alphabet.push(VarSpec { id: i, degree: g });
    }
    for (i, &d) in y_degrees.iter().enumerate() {
        alphabet.push(VarSpec { id: n as u32 + 1 + i as u32, degree: d });
    }
    let mut f = GradedPolynomial::zero(alphabet).expect("fresh ids are distinct");
    for (perm, odd) in permutations_with_signs(n) {
        let mut word = Vec::with_capacity(2 * n);
        for (slot, &p) in perm.iter().enumerate() {
            word.push(p as u32 + 1);
            word.push(n as u32 + 1 + slot as u32);
        }
        let coeff = if odd { CycScalar::from_int(-1) } else { CycScalar::one() };
        f.add_term(word, coeff).expect("capelli words stay inside the alphabet");
    }
    f
}

/// The transform `f~ = f - sum_k f^{(x_k <-> extra)}` over the ordered
/// alternating set `x_ids`.  Requires `f` alternating in `x_ids` and
/// multilinear in `x_ids + {extra}`; the result is alternating in the full
/// set, which is checked before returning.
pub fn zr_tilde(
    f: &GradedPolynomial,
    x_ids: &[u32],
    extra: u32,
) -> Result<GradedPolynomial, PolyError> {
    let mut full = x_ids.to_vec();
    full.push(extra);
    check_homogeneous_set(f, &full)?;
    if !f.multilinear_in(&full) {
        return Err(PolyError::NotMultilinearIn(extra));
    }
    if !f.is_alternating(x_ids)? {
        return Err(PolyError::NotAlternating);
    }
    let mut out = f.clone();
    for &xk in x_ids {
        let mut map = BTreeMap::new();
        map.insert(xk, extra);
        map.insert(extra, xk);
        out.add_assign(&f.rename(&map).negated())?;
    }
    debug_assert!(out.is_alternating(&full)?);
    Ok(out)
}

/// `u_j` of `f` over the designated ids: the sum over all `j`-subsets of the
/// designated positions with `z` inserted immediately to the left of each
/// chosen variable.  Equals the degree-`j`-in-`z` component of
/// `f((z+1)x_1, ..., (z+1)x_n, ...)`.
pub fn u_operator(
    f: &GradedPolynomial,
    designated: &[u32],
    z: VarSpec,
    j: usize,
) -> Result<GradedPolynomial, PolyError> {
    let n = designated.len();
    if j > n {
        return Err(PolyError::JOutOfRange { j, n });
    }
    if f.alphabet.iter().any(|v| v.id == z.id) {
        return Err(PolyError::NotFresh(z.id));
    }
    for &id in designated {
        f.degree_of(id)?;
    }
    let mut alphabet = f.alphabet.clone();
    alphabet.push(z);
    let mut out = GradedPolynomial::zero(alphabet)?;
    for subset in k_subsets(n, j) {
        let chosen: std::collections::BTreeSet<u32> =
            subset.iter().map(|&i| designated[i]).collect();
        for (w, c) in &f.terms {
            let mut word = Vec::with_capacity(w.len() + j);
            for &id in w {
                if chosen.contains(&id) {
                    word.push(z.id);
                }
                word.push(id);
            }
            out.add_term(word, c.clone())?;
        }
    }
    Ok(out)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The obstruction combination
/// `sum_{j=0}^n (-1)^j u_j(f with extra replaced by z^{n-j} extra)`
/// over the alternating set `x_ids` with the fresh variable `z`.  Every term
/// of the result has exactly `n` occurrences of `z`.
pub fn zr_obstruction(
    f: &GradedPolynomial,
    x_ids: &[u32],
    extra: u32,
    z: VarSpec,
) -> Result<GradedPolynomial, PolyError> {
    let n = x_ids.len();
    let mut full = x_ids.to_vec();
    full.push(extra);
    check_homogeneous_set(f, &full)?;
    if !f.multilinear_in(&full) {
        return Err(PolyError::NotMultilinearIn(extra));
    }
    if !f.is_alternating(x_ids)? {
        return Err(PolyError::NotAlternating);
    }
    let mut alphabet = f.alphabet.clone();
    if alphabet.iter().any(|v| v.id == z.id) {
        return Err(PolyError::NotFresh(z.id));
    }
    alphabet.push(z);
    let mut out = GradedPolynomial::zero(alphabet)?;
    for j in 0..=n {
        // f with the extra variable prefixed by the word power z^{n-j}.
        let mut prefixed = GradedPolynomial::zero(out.alphabet.clone())?;
        for (w, c) in &f.terms {
            let mut word = Vec::with_capacity(w.len() + (n - j));
            for &id in w {
                if id == extra {
                    word.extend(std::iter::repeat(z.id).take(n - j));
                }
                word.push(id);
            }
            prefixed.add_term(word, c.clone())?;
        }
        // u_j inserts z before chosen designated x's; z already occurs in
        // `prefixed`, so insert by hand instead of going through u_operator's
        // freshness check.
        for subset in k_subsets(n, j) {
            let chosen: std::collections::BTreeSet<u32> =
                subset.iter().map(|&i| x_ids[i]).collect();
            for (w, c) in &prefixed.terms {
                let mut word = Vec::with_capacity(w.len() + j);
                for &id in w {
                    if chosen.contains(&id) {
                        word.push(z.id);
                    }
                    word.push(id);
                }
                let coeff = if j % 2 == 1 { -c } else { c.clone() };
                out.add_term(word, coeff)?;
            }
        }
    }
    debug_assert!(out
        .terms
        .keys()
        .all(|w| w.iter().filter(|&&id| id == z.id).count() == n));
    Ok(out)
}

/// The alternation structure of a candidate Kemer polynomial: per degree a
/// list of disjoint "small" sets, a list of "big" sets, and the remaining
/// border variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternationLayout {
    /// `small_sets[g]` lists the folds of degree-`g` alternating sets.
    pub small_sets: Vec<Vec<Vec<u32>>>,
    /// Big sets as `(degree, ids)`.
    pub big_sets: Vec<(GroupElem, Vec<u32>)>,
    /// Remaining ids with their degrees.
    pub border_vars: Vec<VarSpec>,
}

impl AlternationLayout {
    /// All alternating sets (small folds then big sets) in deterministic
    /// order.
    pub fn all_sets(&self) -> Vec<(GroupElem, &[u32])> {
        let mut out = Vec::new();
        for (g, folds) in self.small_sets.iter().enumerate() {
            for fold in folds {
                out.push((g, fold.as_slice()));
            }
        }
        for (g, ids) in &self.big_sets {
            out.push((*g, ids.as_slice()));
        }
        out
    }

    /// Checks disjointness and degree homogeneity against a polynomial's
    /// alphabet.
    pub fn validate(&self, f: &GradedPolynomial) -> Result<(), PolyError> {
        let mut seen = std::collections::BTreeSet::new();
        for (g, set) in self.all_sets() {
            for &id in set {
                if f.degree_of(id)? != g {
                    return Err(PolyError::MixedDegrees);
                }
                if !seen.insert(id) {
                    return Err(PolyError::DuplicateId(id));
                }
            }
        }
        for v in &self.border_vars {
            if f.degree_of(v.id)? != v.degree {
                return Err(PolyError::MixedDegrees);
            }
            if !seen.insert(v.id) {
                return Err(PolyError::DuplicateId(v.id));
            }
        }
        Ok(())
    }
}

/// Result of bounded T-ideal consequence generation.
#[derive(Clone, Debug)]
pub struct ConsequenceSet {
    pub polys: Vec<GradedPolynomial>,
    pub truncated: bool,
    /// Set when the list is empty because no substitution pattern can match
    /// the target profile.
    pub empty_reason: Option<String>,
}

/// Generates the multilinear consequences of a multilinear `f` at a target
/// variable profile: every polynomial `L * f(w_1, ..., w_t) * R` where the
/// target ids are distributed into an ordered left word `L`, one nonempty
/// ordered word `w_i` per variable of `f` whose G-degree matches that
/// variable, and an ordered right word `R`.  Enumeration is deterministic
/// (lexicographic in the assignment, then in the within-slot orders) and
/// capped by `budget`.
pub fn multilinear_consequences(
    f: &GradedPolynomial,
    group: &FiniteGroup,
    target_profile: &[VarSpec],
    budget: usize,
) -> Result<ConsequenceSet, PolyError> {
    if !f.multilinear() {
        return Err(PolyError::NotMultilinearIn(
            f.alphabet.first().map(|v| v.id).unwrap_or(0),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    for v in target_profile {
        if !seen.insert(v.id) {
            return Err(PolyError::DuplicateId(v.id));
        }
    }
    let t = f.alphabet.len();
    let m = target_profile.len();
    // Slot 0 = left border, slots 1..=t = the variables of f in alphabet
    // order, slot t+1 = right border.
    let mut polys = Vec::new();
    let mut truncated = false;
    let mut assignment = vec![0usize; m];
    let mut any_pattern = false;

    fn degree_of_word(group: &FiniteGroup, profile: &[VarSpec], word: &[usize]) -> GroupElem {
        word.iter().fold(group.identity(), |d, &i| group.mul(d, profile[i].degree))
    }

    // Enumerate slot assignments in lexicographic order.
    'outer: loop {
        // Build slot contents in target order.
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); t + 2];
        for (i, &s) in assignment.iter().enumerate() {
            slots[s].push(i);
        }
        let nonempty_ok = (1..=t).all(|s| !slots[s].is_empty());
        if nonempty_ok {
            // Each inner slot's word degree must match the variable degree;
            // enumerate all orders per slot that match.
            let orders: Vec<Vec<Vec<usize>>> = slots
                .iter()
                .enumerate()
                .map(|(s, content)| {
                    let perms = all_orders(content);
                    if s >= 1 && s <= t {
                        let want = f.alphabet[s - 1].degree;
                        perms
                            .into_iter()
                            .filter(|w| degree_of_word(group, target_profile, w) == want)
                            .collect()
                    } else {
                        perms
                    }
                })
                .collect();
            if orders.iter().all(|o| !o.is_empty()) {
                any_pattern = true;
                // Cartesian product over slots, lexicographic.
                let mut idx = vec![0usize; t + 2];
                loop {
                    if polys.len() >= budget {
                        truncated = true;
                        break 'outer;
                    }
                    let chosen: Vec<&Vec<usize>> =
                        idx.iter().enumerate().map(|(s, &k)| &orders[s][k]).collect();
                    polys.push(build_consequence(f, target_profile, &chosen)?);
                    // advance
                    let mut s = t + 1;
                    loop {
                        idx[s] += 1;
                        if idx[s] < orders[s].len() {
                            break;
                        }
                        idx[s] = 0;
                        if s == 0 {
                            break;
                        }
                        s -= 1;
                    }
                    if idx.iter().all(|&k| k == 0) {
                        break;
                    }
                }
            }
        }
        // Next assignment.
        let mut i = m;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < t + 2 {
                break;
            }
            assignment[i] = 0;
        }
    }
    let empty_reason = if polys.is_empty() && !any_pattern {
        Some("no substitution pattern matches the target degree profile".to_string())
    } else {
        None
    };
    Ok(ConsequenceSet { polys, truncated, empty_reason })
}

/// All orderings of the given elements (lexicographic over position
/// permutations).
fn all_orders(content: &[usize]) -> Vec<Vec<usize>> {
    permutations_with_signs(content.len())
        .into_iter()
        .map(|(perm, _)| perm.into_iter().map(|i| content[i]).collect())
        .collect()
}

/// Builds `L * f(w_1..w_t) * R` as a polynomial over the target profile.
fn build_consequence(
    f: &GradedPolynomial,
    target_profile: &[VarSpec],
    slots: &[&Vec<usize>],
) -> Result<GradedPolynomial, PolyError> {
    let t = f.alphabet.len();
    let mut out = GradedPolynomial::zero(target_profile.to_vec())?;
    let to_ids = |w: &[usize]| -> Vec<u32> { w.iter().map(|&i| target_profile[i].id).collect() };
    for (w, c) in &f.terms {
        let mut word: Vec<u32> = to_ids(slots[0]);
        for &id in w {
            let pos = f.alphabet.iter().position(|v| v.id == id).expect("alphabet id");
            word.extend(to_ids(slots[pos + 1]));
        }
        word.extend(to_ids(slots[t + 1]));
        out.add_term(word, c.clone())?;
    }
    Ok(out)
}

// ----- serialization ----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    word: Vec<u32>,
    coeff: CycScalar,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    alphabet: Vec<VarSpec>,
    terms: Vec<TermRepr>,
}

impl Serialize for GradedPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermRepr { word: w.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GradedPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyRepr::deserialize(deserializer)?;
        let mut p = GradedPolynomial::zero(raw.alphabet).map_err(D::Error::custom)?;
        for term in raw.terms {
            p.add_term(term.word, term.coeff).map_err(D::Error::custom)?;
        }
        Ok(p)
    }
}

impl std::fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let word = if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|id| format!("x{id}")).collect::<Vec<_>>().join("*")
            };
            write!(f, "({c})*{word}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(id: u32, degree: GroupElem) -> VarSpec {
        VarSpec { id, degree }
    }

    fn poly(alphabet: Vec<VarSpec>, terms: Vec<(Vec<u32>, i64)>) -> GradedPolynomial {
        let mut p = GradedPolynomial::zero(alphabet).unwrap();
        for (w, c) in terms {
            p.add_term(w, CycScalar::from_int(c)).unwrap();
        }
        p
    }

    #[test]
    fn capelli_smallest_cases() {
        let c1 = capelli(1, 0, &[0]);
        assert_eq!(c1.num_terms(), 1);
        assert_eq!(c1.terms().keys().next().unwrap(), &vec![1, 2]);

        let c2 = capelli(2, 1, &[0, 0]);
        let expected = poly(
            vec![var(1, 1), var(2, 1), var(3, 0), var(4, 0)],
            vec![(vec![1, 3, 2, 4], 1), (vec![2, 3, 1, 4], -1)],
        );
        assert_eq!(c2, expected);
        assert!(c2.multilinear());
        assert!(c2.is_alternating(&capelli_x_ids(2)).unwrap());
    }

    #[test]
    fn capelli_term_count_is_factorial() {
        let c4 = capelli(4, 0, &[0; 4]);
        assert_eq!(c4.num_terms(), 24);
        assert!(c4.multilinear());
        assert!(c4.is_alternating(&capelli_x_ids(4)).unwrap());
        // Every coefficient is +-1.
        assert!(c4.terms().values().all(|c| c.is_one() || (-c).is_one()));
    }

    #[test]
    fn alternate_commutator_and_symmetric_kill() {
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1)]);
        let alt = f.alternate(&[1, 2]).unwrap();
        let expected = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1), (vec![2, 1], -1)]);
        assert_eq!(alt, expected);

        // Double antisymmetrization multiplies by |S|!.
        let twice = alt.alternate(&[1, 2]).unwrap();
        let mut doubled = alt.clone();
        doubled.scale(&CycScalar::from_int(2));
        assert_eq!(twice, doubled);

        // Symmetric input dies.
        let sym = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1), (vec![2, 1], 1)]);
        assert!(sym.alternate(&[1, 2]).unwrap().is_zero());
    }

    #[test]
    fn alternate_rejects_mixed_degrees() {
        let f = poly(vec![var(1, 0), var(2, 1)], vec![(vec![1, 2], 1)]);
        assert_eq!(f.alternate(&[1, 2]).unwrap_err(), PolyError::MixedDegrees);
    }

    #[test]
    fn alternating_predicate_examples() {
        let c2 = capelli(2, 0, &[0, 0]);
        assert!(c2.is_alternating(&[1, 2]).unwrap());

        // x1 x2 y1 y2 - x2 x1 y2 y1: not alternating in the x's (the y's move
        // too), nor in the y's.
        let f = poly(
            vec![var(1, 0), var(2, 0), var(3, 0), var(4, 0)],
            vec![(vec![1, 2, 3, 4], 1), (vec![2, 1, 4, 3], -1)],
        );
        assert!(!f.is_alternating(&[1, 2]).unwrap());
        assert!(!f.is_alternating(&[3, 4]).unwrap());

        // Singleton sets are vacuously alternating.
        let g = poly(vec![var(1, 0)], vec![(vec![1], 1)]);
        assert!(g.is_alternating(&[1]).unwrap());
    }

    #[test]
    fn homogeneous_component_splitting() {
        let z2 = FiniteGroup::cyclic(2);
        // x_{1,e} x_{2,g} + x_{2,g} x_{1,e}: one component, of degree g.
        let f = poly(vec![var(1, 0), var(2, 1)], vec![(vec![1, 2], 1), (vec![2, 1], 1)]);
        let parts = f.homogeneous_components(&z2).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 1);
        assert_eq!(parts[0].1, f);

        // Non-multilinear: x1 + x1 x1 over degree e stays one component.
        let g = poly(vec![var(1, 0)], vec![(vec![1], 1), (vec![1, 1], 1)]);
        assert_eq!(g.homogeneous_components(&z2).unwrap().len(), 1);

        // Over Z/2: x_{1,g} + x_{1,g}x_{2,g}x_{3,g} both have degree g; adding
        // x_{2,g}x_{3,g} splits off an e-component.
        let h = poly(
            vec![var(1, 1), var(2, 1), var(3, 1)],
            vec![(vec![1], 1), (vec![1, 2, 3], 1)],
        );
        assert_eq!(h.homogeneous_components(&z2).unwrap().len(), 1);
        let mut h2 = h.clone();
        h2.add_term(vec![2, 3], CycScalar::one()).unwrap();
        let parts = h2.homogeneous_components(&z2).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 0);
        assert_eq!(parts[0].1.num_terms(), 1);
        assert_eq!(parts[1].0, 1);
        assert_eq!(parts[1].1.num_terms(), 2);
        // The parts sum back to the input.
        let mut sum = parts[0].1.clone();
        sum.add_assign(&parts[1].1).unwrap();
        assert_eq!(sum, h2);
    }

    #[test]
    fn tilde_on_a_single_variable_is_a_commutator_shape() {
        // n = 1, f = x1 x2 with x2 playing the extra variable.
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1)]);
        let t = zr_tilde(&f, &[1], 2).unwrap();
        let expected = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1), (vec![2, 1], -1)]);
        assert_eq!(t, expected);
        assert!(t.is_alternating(&[1, 2]).unwrap());
    }

    #[test]
    fn tilde_of_capelli_alternates_in_the_extended_set() {
        // c_{2,e} with a third x adjoined as the extra variable.
        let c2 = capelli(2, 0, &[0, 0]);
        let mut alphabet = c2.alphabet().to_vec();
        alphabet.push(var(9, 0));
        let mut f = GradedPolynomial::zero(alphabet).unwrap();
        for (w, c) in c2.terms() {
            let mut word = w.clone();
            word.push(9);
            f.add_term(word, c.clone()).unwrap();
        }
        let t = zr_tilde(&f, &[1, 2], 9).unwrap();
        assert!(t.is_alternating(&[1, 2, 9]).unwrap());
    }

    #[test]
    fn tilde_scales_an_already_alternating_polynomial() {
        // If f alternates in all n+1 ids, f~ = (n+1) f.  Check at n = 2.
        let base = poly(
            vec![var(1, 0), var(2, 0), var(3, 0)],
            vec![(vec![1, 2, 3], 1)],
        );
        let f = base.alternate(&[1, 2, 3]).unwrap();
        let t = zr_tilde(&f, &[1, 2], 3).unwrap();
        let mut tripled = f.clone();
        tripled.scale(&CycScalar::from_int(3));
        assert_eq!(t, tripled);
    }

    #[test]
    fn tilde_requires_alternating_input() {
        let f = poly(
            vec![var(1, 0), var(2, 0), var(3, 0)],
            vec![(vec![1, 2, 3], 1)],
        );
        assert_eq!(zr_tilde(&f, &[1, 2], 3).unwrap_err(), PolyError::NotAlternating);
    }

    #[test]
    fn u_operator_insertions() {
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1)]);
        let z = var(7, 0);

        let u0 = u_operator(&f, &[1, 2], z, 0).unwrap();
        assert_eq!(u0.terms().len(), 1);
        assert!(u0.terms().contains_key(&vec![1, 2]));

        let u1 = u_operator(&f, &[1, 2], z, 1).unwrap();
        let mut expected = GradedPolynomial::zero(vec![var(1, 0), var(2, 0), z]).unwrap();
        expected.add_term(vec![7, 1, 2], CycScalar::one()).unwrap();
        expected.add_term(vec![1, 7, 2], CycScalar::one()).unwrap();
        assert_eq!(u1, expected);

        let u2 = u_operator(&f, &[1, 2], z, 2).unwrap();
        assert_eq!(u2.terms().keys().collect::<Vec<_>>(), vec![&vec![7, 1, 7, 2]]);

        assert!(matches!(
            u_operator(&f, &[1, 2], z, 3).unwrap_err(),
            PolyError::JOutOfRange { j: 3, n: 2 }
        ));
        // z must be fresh.
        assert!(matches!(
            u_operator(&f, &[1, 2], var(1, 0), 1).unwrap_err(),
            PolyError::NotFresh(1)
        ));
    }

    #[test]
    fn obstruction_single_variable_hand_expansion() {
        // n = 1, f = x1 x2:
        //   j=0 term:  u_0(x1 z x2) = x1 z x2
        //   j=1 term: -u_1(x1 x2)   = -z x1 x2   (insertion at the alternated
        //                                         position only)
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1)]);
        let z = var(7, 0);
        let ob = zr_obstruction(&f, &[1], 2, z).unwrap();
        let mut expected = GradedPolynomial::zero(vec![var(1, 0), var(2, 0), z]).unwrap();
        expected.add_term(vec![1, 7, 2], CycScalar::one()).unwrap();
        expected.add_term(vec![7, 1, 2], CycScalar::from_int(-1)).unwrap();
        assert_eq!(ob, expected);
    }

    /// Erasing every occurrence of z (the formal image of z -> 1 on words)
    /// collapses the obstruction to `sum_j (-1)^j C(n, j) * f = 0`.
    #[test]
    fn obstruction_vanishes_when_z_is_erased() {
        for n in 1..=3usize {
            let alphabet: Vec<VarSpec> = (1..=n as u32 + 1).map(|i| var(i, 0)).collect();
            let word: Vec<u32> = (1..=n as u32 + 1).collect();
            let base = poly(alphabet.clone(), vec![(word, 1)]);
            let x_ids: Vec<u32> = (1..=n as u32).collect();
            let f = base.alternate(&x_ids).unwrap();
            let z = var(50, 0);
            let ob = zr_obstruction(&f, &x_ids, n as u32 + 1, z).unwrap();
            let mut erased = GradedPolynomial::zero(alphabet).unwrap();
            for (w, c) in ob.terms() {
                let stripped: Vec<u32> = w.iter().copied().filter(|&id| id != 50).collect();
                erased.add_term(stripped, c.clone()).unwrap();
            }
            assert!(erased.is_zero(), "erasure residue at n = {n}: {erased}");
        }
    }

    #[test]
    fn obstruction_z_degree_bookkeeping() {
        let c2 = capelli(2, 0, &[0, 0]);
        let mut alphabet = c2.alphabet().to_vec();
        alphabet.push(var(9, 0));
        let mut f = GradedPolynomial::zero(alphabet).unwrap();
        for (w, c) in c2.terms() {
            let mut word = w.clone();
            word.push(9);
            f.add_term(word, c.clone()).unwrap();
        }
        let z = var(11, 0);
        let ob = zr_obstruction(&f, &[1, 2], 9, z).unwrap();
        assert!(!ob.is_zero());
        for w in ob.terms().keys() {
            assert_eq!(w.iter().filter(|&&id| id == 11).count(), 2);
        }
    }

    #[test]
    fn consequences_of_the_commutator() {
        let triv = FiniteGroup::trivial();
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1), (vec![2, 1], -1)]);
        let profile = vec![var(10, 0), var(11, 0), var(12, 0)];
        let set = multilinear_consequences(&f, &triv, &profile, usize::MAX).unwrap();
        assert!(!set.truncated);
        assert!(set.empty_reason.is_none());

        // Independent count: arrangements of 3 ids into (L, B1, B2, R) with
        // B1, B2 nonempty, all slots ordered = sum over shapes of 3!.
        let mut shapes = 0usize;
        for l in 0..=3usize {
            for b1 in 1..=3usize {
                for b2 in 1..=3usize {
                    if l + b1 + b2 <= 3 {
                        shapes += 1; // r is forced
                    }
                }
            }
        }
        assert_eq!(set.polys.len(), shapes * 6);
        assert_eq!(set.polys.len(), 24);

        // Contains the substitution f(x10 x11, x12) = [x10 x11, x12].
        let target = poly(
            profile.clone(),
            vec![(vec![10, 11, 12], 1), (vec![12, 10, 11], -1)],
        );
        assert!(set.polys.contains(&target));
        // Every consequence is multilinear in the target profile.
        assert!(set.polys.iter().all(|p| p.multilinear()));
    }

    #[test]
    fn consequences_respect_budget_and_degrees() {
        let triv = FiniteGroup::trivial();
        let f = poly(vec![var(1, 0), var(2, 0)], vec![(vec![1, 2], 1), (vec![2, 1], -1)]);
        let profile = vec![var(10, 0), var(11, 0), var(12, 0)];
        let set = multilinear_consequences(&f, &triv, &profile, 5).unwrap();
        assert!(set.truncated);
        assert_eq!(set.polys.len(), 5);

        // Degree-incompatible profile: f needs a degree-g block but the
        // profile only offers e-variables.
        let z2 = FiniteGroup::cyclic(2);
        let g = poly(vec![var(1, 1), var(2, 0)], vec![(vec![1, 2], 1)]);
        let set = multilinear_consequences(&g, &z2, &profile, usize::MAX).unwrap();
        assert!(set.polys.is_empty());
        assert!(set.empty_reason.is_some());
    }

    #[test]
    fn layout_validation() {
        let f = poly(
            vec![var(1, 0), var(2, 0), var(3, 1), var(4, 1), var(5, 0)],
            vec![(vec![1, 2, 3, 4, 5], 1)],
        );
        let layout = AlternationLayout {
            small_sets: vec![vec![vec![1, 2]], vec![vec![3, 4]]],
            big_sets: vec![],
            border_vars: vec![var(5, 0)],
        };
        layout.validate(&f).unwrap();
        assert_eq!(layout.all_sets().len(), 2);

        let overlapping = AlternationLayout {
            small_sets: vec![vec![vec![1, 2]], vec![]],
            big_sets: vec![(0, vec![2, 5])],
            border_vars: vec![],
        };
        assert!(overlapping.validate(&f).is_err());

        let wrong_degree = AlternationLayout {
            small_sets: vec![vec![vec![1, 3]], vec![]],
            big_sets: vec![],
            border_vars: vec![],
        };
        assert_eq!(wrong_degree.validate(&f).unwrap_err(), PolyError::MixedDegrees);
    }

    #[test]
    fn polynomial_json_roundtrip() {
        let c2 = capelli(2, 1, &[0, 1]);
        let json = serde_json::to_string(&c2).unwrap();
        let back: GradedPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c2);
    }

    #[test]
    fn parity_oracle() {
        // Independent parity check against counting inversions.
        for (perm, odd) in permutations_with_signs(4) {
            let mut inversions = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            assert_eq!(odd, inversions % 2 == 1, "parity mismatch for {perm:?}");
        }
    }
}
