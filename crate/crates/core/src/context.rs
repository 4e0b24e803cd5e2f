use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use hashbrown::HashMap;

use crate::error::Error;
use crate::logic::ast::FormulaArena;
use crate::logic::skeleton::Skeleton;
use crate::mtbdd::MtbddArena;

/// Whether the controller reacts to the current input letter (Mealy) or
/// commits to its outputs before reading it (Moore).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Mealy,
    Moore,
}

impl core::fmt::Display for Semantics {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Semantics::Mealy => write!(f, "mealy"),
            Semantics::Moore => write!(f, "moore"),
        }
    }
}

/// A propositional variable. The wrapped index is the variable's position
/// in the global decision-diagram order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Observable environment input.
    Input,
    /// Controller output.
    Output,
    /// Environment input the controller never sees.
    Unobservable,
}

struct VarInfo {
    name: String,
    kind: VarKind,
}

/// Names the parser refuses as variable identifiers.
const RESERVED: &[&str] = &["tt", "ff", "true", "false", "xor", "X", "N", "F", "G", "U", "R"];

/// Owns the variable alphabet and every interning table: formulas, the
/// propositional skeleton diagrams behind canonical representatives, and
/// the shared transition-diagram arena. All mutation happens behind
/// interior mutability, so the whole public API works through `&self`.
///
/// Variables are ordered in blocks. Under Mealy semantics inputs come
/// first, then outputs, then unobservable inputs; under Moore semantics
/// outputs come first. Within a block, declaration order is kept. Keeping
/// the unobservable block at the bottom lets universal quantification
/// over it collapse into terminal fusion.
pub struct Context {
    vars: Vec<VarInfo>,
    by_name: HashMap<String, VarId>,
    ins: Vec<VarId>,
    outs: Vec<VarId>,
    unobs: Vec<VarId>,
    obs: Vec<VarId>,
    semantics: Semantics,
    pub(crate) formulas: RefCell<FormulaArena>,
    pub(crate) skeleton: RefCell<Skeleton>,
    pub(crate) mtbdd: RefCell<MtbddArena>,
}

impl core::fmt::Debug for Context {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Context")
            .field("semantics", &self.semantics)
            .field("vars", &self.vars.iter().map(|v| &v.name).collect::<Vec<_>>())
            .finish_non_exhaustive()
    }
}

impl Context {
    /// Declares the alphabet and fixes the variable order. The three name
    /// lists must be pairwise disjoint and free of duplicates.
    pub fn new(
        ins: &[&str],
        outs: &[&str],
        unobservable_ins: &[&str],
        semantics: Semantics,
    ) -> Result<Self, Error> {
        let blocks: [&[&str]; 3] = match semantics {
            Semantics::Mealy => [ins, outs, unobservable_ins],
            Semantics::Moore => [outs, ins, unobservable_ins],
        };
        let mut vars = Vec::new();
        let mut by_name: HashMap<String, VarId> = HashMap::new();
        let mut ids: HashMap<&str, Vec<VarId>> = HashMap::new();
        for (block, names) in blocks.iter().enumerate() {
            let kind = match (semantics, block) {
                (Semantics::Mealy, 0) | (Semantics::Moore, 1) => VarKind::Input,
                (Semantics::Mealy, 1) | (Semantics::Moore, 0) => VarKind::Output,
                _ => VarKind::Unobservable,
            };
            for name in names.iter() {
                if RESERVED.contains(name) {
                    return Err(Error::ReservedName { name: name.to_string() });
                }
                if name.is_empty()
                    || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(Error::UnknownVariable { name: name.to_string() });
                }
                let id = VarId(vars.len() as u32);
                if by_name.insert(name.to_string(), id).is_some() {
                    return Err(Error::DuplicateVariable { name: name.to_string() });
                }
                vars.push(VarInfo { name: name.to_string(), kind });
                let key = match kind {
                    VarKind::Input => "ins",
                    VarKind::Output => "outs",
                    VarKind::Unobservable => "unobs",
                };
                ids.entry(key).or_default().push(id);
            }
        }
        let ins = ids.remove("ins").unwrap_or_default();
        let outs = ids.remove("outs").unwrap_or_default();
        let unobs = ids.remove("unobs").unwrap_or_default();
        let mut obs: Vec<VarId> = ins.iter().chain(outs.iter()).copied().collect();
        obs.sort();
        let n = vars.len();
        Ok(Context {
            vars,
            by_name,
            ins,
            outs,
            unobs,
            obs,
            semantics,
            formulas: RefCell::new(FormulaArena::new()),
            skeleton: RefCell::new(Skeleton::new(n)),
            mtbdd: RefCell::new(MtbddArena::new()),
        })
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn var_kind(&self, v: VarId) -> VarKind {
        self.vars[v.index()].kind
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    /// Observable environment inputs, in variable order.
    pub fn inputs(&self) -> &[VarId] {
        &self.ins
    }

    /// Controller outputs, in variable order.
    pub fn outputs(&self) -> &[VarId] {
        &self.outs
    }

    /// Unobservable environment inputs, in variable order. Always the
    /// bottom block of the diagram order.
    pub fn unobservables(&self) -> &[VarId] {
        &self.unobs
    }

    /// Inputs and outputs together, in variable order.
    pub fn observables(&self) -> &[VarId] {
        &self.obs
    }

    /// All variables, in variable order.
    pub fn all_vars(&self) -> Vec<VarId> {
        (0..self.vars.len() as u32).map(VarId).collect()
    }

    pub fn is_unobservable(&self, v: VarId) -> bool {
        self.vars[v.index()].kind == VarKind::Unobservable
    }
}
