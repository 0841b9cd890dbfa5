//! Named object store loaded from JSON spec files.
//!
//! One file may define many named groups, cocycles, algebras, and
//! polynomials; later files extend the namespace and duplicate names are
//! rejected.  Groups and cocycles are small and built eagerly; algebras and
//! polynomials are built on first use, so a command pays only for the
//! objects it names.  Explicit structure-constant tables get the full
//! associativity and grading check when built; constructor-produced
//! algebras are correct by construction, and the `validate` subcommand
//! re-checks every object from scratch.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use gradedpi_core::algebras::GradedAlgebra;
use gradedpi_core::groups::{FiniteGroup, SubgroupEmbedding, TwoCocycle};
use gradedpi_core::polynomials::{capelli, GradedPolynomial, VarSpec};
use gradedpi_core::scalars::CycScalar;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}: {msg}")]
    Spec { file: String, msg: String },
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Message(String),
}

pub fn err(msg: impl std::fmt::Display) -> CliError {
    CliError::Message(msg.to_string())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize },
    Product { factors: Vec<String> },
    Table { table: Vec<Vec<usize>>, labels: Vec<String> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CocycleSpec {
    Trivial { group: String },
    Table { group: String, m: u64, exponents: Vec<Vec<u64>> },
    Coboundary { group: String, m: u64, delta: Vec<u64> },
}

impl CocycleSpec {
    fn group(&self) -> &str {
        match self {
            CocycleSpec::Trivial { group }
            | CocycleSpec::Table { group, .. }
            | CocycleSpec::Coboundary { group, .. } => group,
        }
    }
}

/// Subgroup of a graded-simple constructor: the trivial subgroup, the whole
/// grading group, or an explicit embedded group.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SubgroupSpec {
    Named(String),
    Explicit { group: String, images: Vec<usize> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// Twisted group algebra of an embedded subgroup, matrix-amplified by a
    /// degree tuple.
    Bsz {
        group: String,
        #[serde(default)]
        subgroup: Option<SubgroupSpec>,
        #[serde(default)]
        cocycle: Option<String>,
        tuple: Vec<usize>,
    },
    /// Graded upper triangular matrices.
    Ut { group: String, tuple: Vec<usize> },
    Grassmann { n: u32 },
    /// Grassmann envelope of an algebra graded by Z/2 x G.
    Envelope { base: String, n: u32 },
    /// Tensor with a group algebra, graded by the group factor.
    GroupAlgebra { base: String, group: String },
    Product { factors: Vec<String> },
    /// The same algebra with the grading forgotten (trivial group).
    Ungraded { base: String },
    /// Explicit structure-constant table.
    Table { data: GradedAlgebra },
}

#[derive(Clone, Debug, Deserialize)]
pub struct TermSpec {
    pub word: Vec<u32>,
    pub coeff: CycScalar,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolySpec {
    Terms { alphabet: Vec<VarSpec>, terms: Vec<TermSpec> },
    Capelli { n: usize, degree: usize, y_degrees: Vec<usize> },
    /// Alternation of a named polynomial over a variable set.
    Alternate { base: String, set: Vec<u32> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    cocycles: BTreeMap<String, CocycleSpec>,
    #[serde(default)]
    algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default)]
    polynomials: BTreeMap<String, PolySpec>,
}

pub struct Workspace {
    groups: BTreeMap<String, FiniteGroup>,
    /// Cocycles keep the name of the group they live on.
    cocycles: BTreeMap<String, (String, TwoCocycle)>,
    algebra_specs: BTreeMap<String, AlgebraSpec>,
    poly_specs: BTreeMap<String, PolySpec>,
    algebras: Mutex<BTreeMap<String, GradedAlgebra>>,
    polynomials: Mutex<BTreeMap<String, GradedPolynomial>>,
    /// `sha256:<hex>` over the concatenated spec files, in argument order.
    pub digest: String,
    /// Spec file paths as given on the command line.
    pub files: Vec<String>,
}

impl Workspace {
    pub fn algebra(&self, name: &str) -> Result<GradedAlgebra, CliError> {
        resolve_algebra(
            name,
            &self.algebra_specs,
            &self.groups,
            &self.cocycles,
            &mut self.algebras.lock().expect("cache lock"),
            &mut Vec::new(),
        )
    }

    pub fn polynomial(&self, name: &str) -> Result<(PolySpec, GradedPolynomial), CliError> {
        let poly = resolve_polynomial(
            name,
            &self.poly_specs,
            &mut self.polynomials.lock().expect("cache lock"),
            &mut Vec::new(),
        )?;
        let spec = self.poly_specs.get(name).expect("resolution checked the name").clone();
        Ok((spec, poly))
    }

    pub fn groups(&self) -> &BTreeMap<String, FiniteGroup> {
        &self.groups
    }

    pub fn cocycles(&self) -> &BTreeMap<String, (String, TwoCocycle)> {
        &self.cocycles
    }

    /// Builds every named algebra and polynomial, running the full structure
    /// checks (associativity, unit, grading) on each algebra regardless of
    /// how it was produced.  Returns the built objects sorted by name.
    pub fn build_all(
        &self,
    ) -> Result<(Vec<(String, GradedAlgebra)>, Vec<(String, GradedPolynomial)>), CliError> {
        let mut algebras = Vec::new();
        for name in self.algebra_specs.keys() {
            let a = self.algebra(name)?;
            a.validate().map_err(|e| err(format!("algebra {name:?}: {e}")))?;
            algebras.push((name.clone(), a));
        }
        let mut polynomials = Vec::new();
        for name in self.poly_specs.keys() {
            let (_, f) = self.polynomial(name)?;
            polynomials.push((name.clone(), f));
        }
        Ok((algebras, polynomials))
    }
}

pub fn load(paths: &[PathBuf]) -> Result<Workspace, CliError> {
    let mut hasher = Sha256::new();
    let mut files = Vec::new();
    let mut group_specs: BTreeMap<String, GroupSpec> = BTreeMap::new();
    let mut cocycle_specs: BTreeMap<String, CocycleSpec> = BTreeMap::new();
    let mut algebra_specs: BTreeMap<String, AlgebraSpec> = BTreeMap::new();
    let mut poly_specs: BTreeMap<String, PolySpec> = BTreeMap::new();

    for path in paths {
        let file = path.display().to_string();
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Spec { file: file.clone(), msg: e.to_string() })?;
        hasher.update(&bytes);
        let spec: SpecFile = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Spec { file: file.clone(), msg: e.to_string() })?;
        let dup = |kind: &str, name: &str| CliError::Spec {
            file: file.clone(),
            msg: format!("duplicate {kind} name {name:?}"),
        };
        for (name, s) in spec.groups {
            if group_specs.insert(name.clone(), s).is_some() {
                return Err(dup("group", &name));
            }
        }
        for (name, s) in spec.cocycles {
            if cocycle_specs.insert(name.clone(), s).is_some() {
                return Err(dup("cocycle", &name));
            }
        }
        for (name, s) in spec.algebras {
            if algebra_specs.insert(name.clone(), s).is_some() {
                return Err(dup("algebra", &name));
            }
        }
        for (name, s) in spec.polynomials {
            if poly_specs.insert(name.clone(), s).is_some() {
                return Err(dup("polynomial", &name));
            }
        }
        files.push(file);
    }
    let digest = format!("sha256:{:x}", hasher.finalize());

    // Groups, resolving product references recursively.
    let mut groups: BTreeMap<String, FiniteGroup> = BTreeMap::new();
    for name in group_specs.keys() {
        resolve_group(name, &group_specs, &mut groups, &mut Vec::new())?;
    }

    // Cocycles, validated against their groups.
    let mut cocycles: BTreeMap<String, (String, TwoCocycle)> = BTreeMap::new();
    for (name, spec) in &cocycle_specs {
        let gname = spec.group();
        let group = groups
            .get(gname)
            .ok_or_else(|| CliError::Unknown { kind: "group", name: gname.into() })?;
        let cocycle = match spec {
            CocycleSpec::Trivial { .. } => TwoCocycle::trivial(group.order()),
            CocycleSpec::Table { m, exponents, .. } => {
                TwoCocycle { m: *m, exponents: exponents.clone() }
            }
            CocycleSpec::Coboundary { m, delta, .. } => TwoCocycle::coboundary(group, *m, delta),
        };
        cocycle
            .validate(group)
            .map_err(|e| err(format!("cocycle {name:?}: {e}")))?;
        cocycles.insert(name.clone(), (gname.to_string(), cocycle));
    }

    Ok(Workspace {
        groups,
        cocycles,
        algebra_specs,
        poly_specs,
        algebras: Mutex::new(BTreeMap::new()),
        polynomials: Mutex::new(BTreeMap::new()),
        digest,
        files,
    })
}

fn cycle_guard(kind: &str, name: &str, visiting: &mut Vec<String>) -> Result<(), CliError> {
    if visiting.iter().any(|v| v == name) {
        return Err(err(format!("{kind} {name:?} is defined in terms of itself")));
    }
    visiting.push(name.to_string());
    Ok(())
}

fn resolve_group(
    name: &str,
    specs: &BTreeMap<String, GroupSpec>,
    built: &mut BTreeMap<String, FiniteGroup>,
    visiting: &mut Vec<String>,
) -> Result<FiniteGroup, CliError> {
    if let Some(g) = built.get(name) {
        return Ok(g.clone());
    }
    let spec = specs
        .get(name)
        .ok_or_else(|| CliError::Unknown { kind: "group", name: name.into() })?;
    cycle_guard("group", name, visiting)?;
    let group = match spec {
        GroupSpec::Cyclic { n } => {
            if *n == 0 {
                return Err(err(format!("group {name:?}: cyclic order must be positive")));
            }
            FiniteGroup::cyclic(*n)
        }
        GroupSpec::Product { factors } => {
            let mut parts = Vec::new();
            for f in factors {
                parts.push(resolve_group(f, specs, built, visiting)?);
            }
            let mut iter = parts.into_iter();
            let first = iter
                .next()
                .ok_or_else(|| err(format!("group {name:?}: a product needs factors")))?;
            iter.fold(first, |acc, g| FiniteGroup::direct_product(&acc, &g))
        }
        GroupSpec::Table { table, labels } => {
            FiniteGroup::from_table(table.clone(), labels.clone())
                .map_err(|e| err(format!("group {name:?}: {e}")))?
        }
    };
    visiting.pop();
    built.insert(name.to_string(), group.clone());
    Ok(group)
}

fn resolve_algebra(
    name: &str,
    specs: &BTreeMap<String, AlgebraSpec>,
    groups: &BTreeMap<String, FiniteGroup>,
    cocycles: &BTreeMap<String, (String, TwoCocycle)>,
    built: &mut BTreeMap<String, GradedAlgebra>,
    visiting: &mut Vec<String>,
) -> Result<GradedAlgebra, CliError> {
    if let Some(a) = built.get(name) {
        return Ok(a.clone());
    }
    let spec = specs
        .get(name)
        .ok_or_else(|| CliError::Unknown { kind: "algebra", name: name.into() })?;
    cycle_guard("algebra", name, visiting)?;
    let group_ref = |gname: &str| {
        groups
            .get(gname)
            .cloned()
            .ok_or_else(|| CliError::Unknown { kind: "group", name: gname.into() })
    };
    let ctx = |e: &dyn std::fmt::Display| err(format!("algebra {name:?}: {e}"));
    let algebra = match spec {
        AlgebraSpec::Bsz { group, subgroup, cocycle, tuple } => {
            let ambient = group_ref(group)?;
            let embedding = match subgroup {
                None => SubgroupEmbedding::trivial_into(&ambient),
                Some(SubgroupSpec::Named(which)) => match which.as_str() {
                    "trivial" => SubgroupEmbedding::trivial_into(&ambient),
                    "full" => SubgroupEmbedding::identity(&ambient),
                    other => {
                        return Err(err(format!(
                            "algebra {name:?}: subgroup must be \"trivial\", \"full\", or an explicit embedding, got {other:?}"
                        )))
                    }
                },
                Some(SubgroupSpec::Explicit { group: sub, images }) => {
                    let sub = group_ref(sub)?;
                    SubgroupEmbedding::new(sub, images.clone(), &ambient)
                        .map_err(|e| ctx(&e))?
                }
            };
            let cocycle = match cocycle {
                None => TwoCocycle::trivial(embedding.sub.order()),
                Some(cname) => {
                    cocycles
                        .get(cname)
                        .ok_or_else(|| CliError::Unknown { kind: "cocycle", name: cname.into() })?
                        .1
                        .clone()
                }
            };
            GradedAlgebra::bsz_simple(&ambient, &embedding, &cocycle, tuple)
                .map_err(|e| ctx(&e))?
        }
        AlgebraSpec::Ut { group, tuple } => {
            let group = group_ref(group)?;
            GradedAlgebra::upper_triangular(&group, tuple).map_err(|e| ctx(&e))?
        }
        AlgebraSpec::Grassmann { n } => GradedAlgebra::grassmann(*n),
        AlgebraSpec::Envelope { base, n } => {
            let base = resolve_algebra(base, specs, groups, cocycles, built, visiting)?;
            GradedAlgebra::grassmann_envelope(&base, *n).map_err(|e| ctx(&e))?
        }
        AlgebraSpec::GroupAlgebra { base, group } => {
            let base = resolve_algebra(base, specs, groups, cocycles, built, visiting)?;
            let group = group_ref(group)?;
            GradedAlgebra::group_algebra_grading(&base, &group)
        }
        AlgebraSpec::Product { factors } => {
            let mut parts = Vec::new();
            for f in factors {
                parts.push(resolve_algebra(f, specs, groups, cocycles, built, visiting)?);
            }
            let mut iter = parts.into_iter();
            let first = iter
                .next()
                .ok_or_else(|| err(format!("algebra {name:?}: a product needs factors")))?;
            let mut acc = first;
            for g in iter {
                acc = GradedAlgebra::direct_product(&acc, &g).map_err(|e| ctx(&e))?;
            }
            acc
        }
        AlgebraSpec::Ungraded { base } => {
            let base = resolve_algebra(base, specs, groups, cocycles, built, visiting)?;
            forget_grading(&base).map_err(|e| ctx(&e))?
        }
        AlgebraSpec::Table { data } => {
            // The one untrusted structure-constant table: run the full check.
            data.validate().map_err(|e| ctx(&e))?;
            data.clone()
        }
    };
    visiting.pop();
    built.insert(name.to_string(), algebra.clone());
    Ok(algebra)
}

/// The same structure constants over the trivial group.
fn forget_grading(a: &GradedAlgebra) -> Result<GradedAlgebra, gradedpi_core::algebras::AlgebraError> {
    let dim = a.dim();
    let mut sc = vec![vec![Vec::new(); dim]; dim];
    for (i, row) in sc.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a.sc_entry(i, j).to_vec();
        }
    }
    let labels = (0..dim).map(|i| a.label(i).to_string()).collect();
    GradedAlgebra::new(FiniteGroup::trivial(), vec![0; dim], sc, a.unit().cloned(), labels)
}

fn resolve_polynomial(
    name: &str,
    specs: &BTreeMap<String, PolySpec>,
    built: &mut BTreeMap<String, GradedPolynomial>,
    visiting: &mut Vec<String>,
) -> Result<GradedPolynomial, CliError> {
    if let Some(f) = built.get(name) {
        return Ok(f.clone());
    }
    let spec = specs
        .get(name)
        .ok_or_else(|| CliError::Unknown { kind: "polynomial", name: name.into() })?;
    cycle_guard("polynomial", name, visiting)?;
    let ctx = |e: &dyn std::fmt::Display| err(format!("polynomial {name:?}: {e}"));
    let poly = match spec {
        PolySpec::Terms { alphabet, terms } => {
            let mut f = GradedPolynomial::zero(alphabet.clone()).map_err(|e| ctx(&e))?;
            for t in terms {
                f.add_term(t.word.clone(), t.coeff.clone()).map_err(|e| ctx(&e))?;
            }
            f
        }
        PolySpec::Capelli { n, degree, y_degrees } => {
            if *n == 0 {
                return Err(err(format!(
                    "polynomial {name:?}: capelli needs at least one alternating variable"
                )));
            }
            if y_degrees.len() != *n {
                return Err(err(format!(
                    "polynomial {name:?}: capelli expects {n} y-degrees, got {}",
                    y_degrees.len()
                )));
            }
            capelli(*n, *degree, y_degrees)
        }
        PolySpec::Alternate { base, set } => {
            let base = resolve_polynomial(base, specs, built, visiting)?;
            base.alternate(set).map_err(|e| ctx(&e))?
        }
    };
    visiting.pop();
    built.insert(name.to_string(), poly.clone());
    Ok(poly)
}
