//! Exact structure theory and polynomial identities for finite-dimensional
//! algebras graded by a finite group.
//!
//! The crate works over exact arithmetic only: arbitrary-precision rationals
//! and elements of cyclotomic fields `Q(zeta_m)`.  On top of those it builds
//! structure-constant presentations of graded algebras (with Jacobson radical,
//! nilpotency index and graded semisimple dimensions), graded multilinear
//! polynomials (Capelli families, alternation operators, the tilde/obstruction
//! operators used for trace-identity arguments), identity oracles (exhaustive
//! and generic-element), and witness searches for alternation profiles
//! ("Kemer points") together with their certified refutations.
//!
//! The `parallel` feature (on by default) runs the evaluation sweeps and
//! witness searches on a rayon pool; without it the same code runs
//! sequentially.  Results are bitwise identical either way.

pub mod algebras;
pub mod groups;
pub mod identities;
pub mod kemer;
pub mod linalg;
pub(crate) mod par;
pub mod polynomials;
pub mod scalars;
