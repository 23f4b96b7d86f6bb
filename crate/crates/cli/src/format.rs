//! JSON exchange formats. Elements are referred to by name everywhere;
//! rationals are `"p/q"` strings.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use ditop::constructions::{Action, ActionLaw, ConstructionError};
use ditop::fintop::{validate_topology, OpenSetFamily};
use ditop::hm::{StepFunction, StepFunctionFile};
use ditop::unocore::{canonical_units, validate_uno};
use ditop::{FiniteSemigroup, FiniteTopology, PointSet, SemigroupError, TopologyError, UnoError, UnoStructure};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl FormatError {
    fn invariant(msg: impl Into<String>) -> Self {
        FormatError::Invariant(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub elements: Vec<String>,
    pub mul: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_nbhd: Option<IndexMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<Vec<String>>,
}

struct Names<'a> {
    names: &'a [String],
    index: HashMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(names: &'a [String]) -> Result<Self, FormatError> {
        if names.is_empty() {
            return Err(FormatError::invariant("no elements"));
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return Err(FormatError::invariant(format!("duplicate element {n:?}")));
            }
        }
        Ok(Self { names, index })
    }

    fn get(&self, name: &str, context: &str) -> Result<usize, FormatError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| FormatError::invariant(format!("unknown element {name:?} in {context}")))
    }

    fn map(&self, list: &[String], context: &str) -> Result<Vec<usize>, FormatError> {
        list.iter().map(|n| self.get(n, context)).collect()
    }

    fn unary(&self, list: &[String], context: &str) -> Result<Vec<usize>, FormatError> {
        if list.len() != self.names.len() {
            return Err(FormatError::invariant(format!(
                "{context} has {} entries for {} elements",
                list.len(),
                self.names.len()
            )));
        }
        self.map(list, context)
    }

    fn set(&self, list: &[String], context: &str) -> Result<PointSet, FormatError> {
        Ok(self.map(list, context)?.into_iter().collect())
    }

    fn n(&self, i: usize) -> &str {
        &self.names[i]
    }

    fn show(&self, s: &[usize]) -> String {
        let parts: Vec<&str> = s.iter().map(|&i| self.n(i)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn semigroup(&self, e: &SemigroupError) -> String {
        match e {
            SemigroupError::NotAssociative { a, b, c } => {
                let (a, b, c) = (self.n(*a), self.n(*b), self.n(*c));
                format!("not associative: ({a}·{b})·{c} != {a}·({b}·{c})")
            }
            SemigroupError::NotInverse { x, candidates } => {
                format!("not an inverse semigroup: {} has inverse candidates {}", self.n(*x), self.show(candidates))
            }
            e => e.to_string(),
        }
    }

    fn topology(&self, e: &TopologyError) -> String {
        match e {
            TopologyError::NotClosedUnderUnion { a, b } => {
                format!("union of {} and {} is not listed", self.show(a), self.show(b))
            }
            TopologyError::NotClosedUnderIntersection { a, b } => {
                format!("intersection of {} and {} is not listed", self.show(a), self.show(b))
            }
            TopologyError::InvalidMinNbhd { point } => {
                format!("min_nbhd of {} must contain it and every min_nbhd of its members", self.n(*point))
            }
            e => e.to_string(),
        }
    }

    pub(crate) fn uno(&self, e: &UnoError) -> String {
        match e {
            UnoError::UnitAxiomFails { side, x } => format!("{side} unit axiom fails at {}", self.n(*x)),
            UnoError::UnitNotContinuous { side, x, y } => format!(
                "{side} unit operation is not continuous: {} lies in min_nbhd of {} but the images do not",
                self.n(*y),
                self.n(*x)
            ),
            UnoError::MultiplicationNotContinuous { a, b } => {
                format!("multiplication is not continuous at ({}, {})", self.n(*a), self.n(*b))
            }
            UnoError::NotInverse(s) => self.semigroup(s),
            e => e.to_string(),
        }
    }
}

impl StructureFile {
    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text = fs::read_to_string(path).map_err(|err| FormatError::Io { path: path.into(), err })?;
        serde_json::from_str(&text).map_err(|e| FormatError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_structure(&self) -> Result<UnoStructure, FormatError> {
        let names = Names::new(&self.elements)?;
        let n = self.elements.len();
        if self.mul.len() != n {
            return Err(FormatError::invariant(format!("mul has {} rows for {n} elements", self.mul.len())));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in self.mul.iter().enumerate() {
            if row.len() != n {
                return Err(FormatError::invariant(format!("mul row {} has {} entries", names.n(i), row.len())));
            }
            table.extend(names.map(row, "mul")?);
        }
        let sg = FiniteSemigroup::from_flat(table, Some(self.elements.clone()))
            .map_err(|e| FormatError::invariant(names.semigroup(&e)))?;
        let top = match (&self.opens, &self.min_nbhd) {
            (Some(_), Some(_)) => return Err(FormatError::invariant("give either opens or min_nbhd, not both")),
            (None, None) => return Err(FormatError::invariant("missing opens or min_nbhd")),
            (Some(opens), None) => {
                let opens = opens.iter().map(|o| names.set(o, "opens")).collect::<Result<_, _>>()?;
                validate_topology(&OpenSetFamily { n, opens })
                    .map_err(|e| FormatError::invariant(names.topology(&e)))?
            }
            (None, Some(mins)) => {
                let mut sets = vec![None; n];
                for (k, v) in mins {
                    let x = names.get(k, "min_nbhd keys")?;
                    sets[x] = Some(names.set(v, "min_nbhd")?);
                }
                let sets = sets
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.ok_or_else(|| FormatError::invariant(format!("min_nbhd of {} missing", names.n(i))))
                    })
                    .collect::<Result<_, _>>()?;
                FiniteTopology::from_min_nbhds(sets).map_err(|e| FormatError::invariant(names.topology(&e)))?
            }
        };
        let mut lam = self.lambda.as_ref().map(|l| names.unary(l, "lambda")).transpose()?;
        let mut rho = self.rho.as_ref().map(|r| names.unary(r, "rho")).transpose()?;
        if let Some(inv) = &self.inv {
            let inv = names.unary(inv, "inv")?;
            let s = sg.inverse_structure().map_err(|e| FormatError::invariant(names.semigroup(&e)))?;
            if let Some(x) = (0..n).find(|&x| s.inv(x) != inv[x]) {
                return Err(FormatError::invariant(format!(
                    "inv maps {} to {}, but its inverse is {}",
                    names.n(x),
                    names.n(inv[x]),
                    names.n(s.inv(x))
                )));
            }
            if !ditop::fintop::is_continuous(&inv, &top, &top).unwrap_or(false) {
                return Err(FormatError::invariant("inversion is not continuous"));
            }
            let (cl, cr) = canonical_units(&sg, &s);
            lam.get_or_insert(cl);
            rho.get_or_insert(cr);
        }
        if lam.is_none() && rho.is_none() {
            return Err(FormatError::invariant("no lambda, rho or inv given"));
        }
        validate_uno(sg, top, lam, rho).map_err(|e| FormatError::invariant(names.uno(&e)))
    }

    /// Canonical form: `min_nbhd` topology, explicit unit operations.
    pub fn from_structure(u: &UnoStructure) -> Self {
        let labels = u.sg().labels();
        let name = |i: usize| labels[i].clone();
        let n = u.len();
        StructureFile {
            elements: labels.to_vec(),
            mul: (0..n).map(|a| (0..n).map(|b| name(u.sg().mul(a, b))).collect()).collect(),
            opens: None,
            min_nbhd: Some((0..n).map(|x| (name(x), u.top().min_nbhd(x).iter().map(name).collect())).collect()),
            lambda: u.lam().map(|l| l.iter().map(|&v| name(v)).collect()),
            rho: u.rho().map(|r| r.iter().map(|&v| name(v)).collect()),
            inv: None,
        }
    }

    /// Interprets `list` as a set of element names of `u`.
    pub fn subset(u: &UnoStructure, list: &[String]) -> Result<PointSet, FormatError> {
        Names::new(u.sg().labels())?.set(list, "subset")
    }
}

pub fn load_structure(path: &Path) -> Result<UnoStructure, FormatError> {
    StructureFile::read(path)?.to_structure()
}

pub fn write_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A structure given inline or as a path relative to the referring file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StructureRef {
    Path(PathBuf),
    Inline(Box<StructureFile>),
}

impl StructureRef {
    fn load(&self, base: &Path) -> Result<UnoStructure, FormatError> {
        match self {
            StructureRef::Path(p) => load_structure(&base.join(p)),
            StructureRef::Inline(f) => f.to_structure(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFile {
    #[serde(rename = "F")]
    pub f: StructureRef,
    #[serde(rename = "S")]
    pub s: StructureRef,
    /// Image of every element of `S`, in `S`'s element order, for each
    /// element of `F`.
    pub alpha: IndexMap<String, Vec<String>>,
}

pub struct LoadedAction {
    pub s: UnoStructure,
    pub f: UnoStructure,
    pub alpha: Action,
}

impl LoadedAction {
    pub fn describe(&self, e: &ConstructionError) -> String {
        let (sn, fn_) = (self.s.sg().labels(), self.f.sg().labels());
        match e {
            ConstructionError::ActionInvalid(ActionLaw::Endomorphism { f, a, b }) => {
                format!("alpha_{} is not an endomorphism at ({}, {})", fn_[*f], sn[*a], sn[*b])
            }
            ConstructionError::ActionInvalid(ActionLaw::Composition { f, g, s }) => {
                format!("alpha_{}·alpha_{} differs from alpha of their product at {}", fn_[*f], fn_[*g], sn[*s])
            }
            ConstructionError::ActionInvalid(ActionLaw::NotContinuous { f, s }) => {
                format!("action is not continuous at ({}, {})", fn_[*f], sn[*s])
            }
            ConstructionError::ActionDoesNotRespectUnit { side, f, s } => {
                format!("action does not respect the {side} unit of F at f={}, s={}", fn_[*f], sn[*s])
            }
            ConstructionError::NotInvertible { f } => {
                format!("alpha_{} is not a bijection of the right unit image", fn_[*f])
            }
            ConstructionError::AlphaMinusNotContinuous { f, s } => {
                format!("inverse action is not continuous at ({}, {})", fn_[*f], sn[*s])
            }
            e => e.to_string(),
        }
    }
}

impl ActionFile {
    pub fn load(path: &Path) -> Result<LoadedAction, FormatError> {
        let text = fs::read_to_string(path).map_err(|err| FormatError::Io { path: path.into(), err })?;
        let file: ActionFile =
            serde_json::from_str(&text).map_err(|e| FormatError::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let (s, f) = (file.s.load(base)?, file.f.load(base)?);
        let (sn, fn_) = (Names::new(s.sg().labels())?, Names::new(f.sg().labels())?);
        let mut rows = vec![None; f.len()];
        for (k, images) in &file.alpha {
            let fi = fn_.get(k, "alpha keys")?;
            rows[fi] = Some(sn.unary(images, &format!("alpha[{k}]"))?);
        }
        let mut table = Vec::with_capacity(f.len() * s.len());
        for (fi, r) in rows.into_iter().enumerate() {
            table.extend(r.ok_or_else(|| FormatError::invariant(format!("alpha[{}] missing", fn_.n(fi))))?);
        }
        let alpha = Action::new(f.len(), s.len(), table);
        Ok(LoadedAction { s, f, alpha })
    }
}

/// Step function with values given by element name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

impl StepFile {
    pub fn load(path: &Path, base: &UnoStructure) -> Result<StepFunction, FormatError> {
        let text = fs::read_to_string(path).map_err(|err| FormatError::Io { path: path.into(), err })?;
        let file: StepFile =
            serde_json::from_str(&text).map_err(|e| FormatError::Parse(format!("{}: {e}", path.display())))?;
        let names = Names::new(base.sg().labels())?;
        let values = names.map(&file.values, "values")?;
        StepFunction::from_file(&StepFunctionFile { breakpoints: file.breakpoints, values }, base.len())
            .map_err(|e| FormatError::invariant(e.to_string()))
    }
}
