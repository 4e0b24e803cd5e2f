use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::context::Context;
use crate::logic::ast::{BinOp, FormulaId, FormulaNode};

/// Identifies the propositional-equivalence class of a formula: two
/// formulas get equal keys exactly when replacing their maximal temporal
/// subformulas by fresh propositions yields equivalent Boolean functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PropKey(pub(crate) u32);

const BDD_FALSE: u32 = 0;
const BDD_TRUE: u32 = 1;

/// Reduced ordered binary decision diagrams over "skeleton variables":
/// one per declared atom (sharing the atom's index) followed by one per
/// maximal temporal subformula, allocated in first-encounter order.
/// Allocation order never changes, so keys and the representatives
/// rebuilt from them are stable for the lifetime of the context.
pub(crate) struct Skeleton {
    atom_vars: usize,
    /// Internal node `id` is stored at `nodes[id - 2]` as (var, low, high).
    nodes: Vec<(u32, u32, u32)>,
    unique: HashMap<(u32, u32, u32), u32>,
    apply_cache: HashMap<(u8, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
    temporal_vars: Vec<FormulaId>,
    var_of_temporal: HashMap<FormulaId, u32>,
    key_memo: HashMap<FormulaId, u32>,
    rebuild_memo: HashMap<u32, FormulaId>,
}

impl Skeleton {
    pub(crate) fn new(atom_vars: usize) -> Self {
        Skeleton {
            atom_vars,
            nodes: Vec::new(),
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
            temporal_vars: Vec::new(),
            var_of_temporal: HashMap::new(),
            key_memo: HashMap::new(),
            rebuild_memo: HashMap::new(),
        }
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        if let Some(&id) = self.unique.get(&(var, low, high)) {
            return id;
        }
        let id = self.nodes.len() as u32 + 2;
        self.nodes.push((var, low, high));
        self.unique.insert((var, low, high), id);
        id
    }

    fn var_node(&mut self, var: u32) -> u32 {
        self.mk(var, BDD_FALSE, BDD_TRUE)
    }

    fn split(&self, id: u32) -> Option<(u32, u32, u32)> {
        if id < 2 {
            None
        } else {
            Some(self.nodes[(id - 2) as usize])
        }
    }

    fn not(&mut self, a: u32) -> u32 {
        match a {
            BDD_FALSE => BDD_TRUE,
            BDD_TRUE => BDD_FALSE,
            _ => {
                if let Some(&r) = self.not_cache.get(&a) {
                    return r;
                }
                let (v, lo, hi) = self.split(a).unwrap();
                let nl = self.not(lo);
                let nh = self.not(hi);
                let r = self.mk(v, nl, nh);
                self.not_cache.insert(a, r);
                self.not_cache.insert(r, a);
                r
            }
        }
    }

    fn apply(&mut self, op: BinOp, a: u32, b: u32) -> u32 {
        if let (Some(ra), Some(rb)) = (term_value(a), term_value(b)) {
            return if op.eval(ra, rb) { BDD_TRUE } else { BDD_FALSE };
        }
        // Cheap short circuits that keep the diagrams small.
        match (op, a, b) {
            (BinOp::And, BDD_TRUE, x) | (BinOp::And, x, BDD_TRUE) => return x,
            (BinOp::And, BDD_FALSE, _) | (BinOp::And, _, BDD_FALSE) => return BDD_FALSE,
            (BinOp::Or, BDD_FALSE, x) | (BinOp::Or, x, BDD_FALSE) => return x,
            (BinOp::Or, BDD_TRUE, _) | (BinOp::Or, _, BDD_TRUE) => return BDD_TRUE,
            (BinOp::And, x, y) | (BinOp::Or, x, y) if x == y => return x,
            (BinOp::Implies, x, y) if x == y => return BDD_TRUE,
            (BinOp::Equiv, x, y) if x == y => return BDD_TRUE,
            (BinOp::Xor, x, y) if x == y => return BDD_FALSE,
            _ => {}
        }
        let tag = op_tag(op);
        if let Some(&r) = self.apply_cache.get(&(tag, a, b)) {
            return r;
        }
        let va = self.split(a).map(|(v, _, _)| v).unwrap_or(u32::MAX);
        let vb = self.split(b).map(|(v, _, _)| v).unwrap_or(u32::MAX);
        let v = va.min(vb);
        let (al, ah) = if va == v {
            let (_, lo, hi) = self.split(a).unwrap();
            (lo, hi)
        } else {
            (a, a)
        };
        let (bl, bh) = if vb == v {
            let (_, lo, hi) = self.split(b).unwrap();
            (lo, hi)
        } else {
            (b, b)
        };
        let rl = self.apply(op, al, bl);
        let rh = self.apply(op, ah, bh);
        let r = self.mk(v, rl, rh);
        self.apply_cache.insert((tag, a, b), r);
        r
    }

    fn temporal_var(&mut self, f: FormulaId) -> u32 {
        if let Some(&v) = self.var_of_temporal.get(&f) {
            return v;
        }
        let v = (self.atom_vars + self.temporal_vars.len()) as u32;
        self.temporal_vars.push(f);
        self.var_of_temporal.insert(f, v);
        v
    }
}

fn term_value(id: u32) -> Option<bool> {
    match id {
        BDD_FALSE => Some(false),
        BDD_TRUE => Some(true),
        _ => None,
    }
}

fn op_tag(op: BinOp) -> u8 {
    match op {
        BinOp::And => 0,
        BinOp::Or => 1,
        BinOp::Implies => 2,
        BinOp::Equiv => 3,
        BinOp::Xor => 4,
    }
}

impl Context {
    /// The propositional-equivalence key of `f`.
    pub fn prop_key(&self, f: FormulaId) -> PropKey {
        if let Some(&k) = self.skeleton.borrow().key_memo.get(&f) {
            return PropKey(k);
        }
        let node = self.node(f);
        let k = match node {
            FormulaNode::True => BDD_TRUE,
            FormulaNode::False => BDD_FALSE,
            FormulaNode::Atom(v) => {
                let mut sk = self.skeleton.borrow_mut();
                sk.var_node(v.0)
            }
            FormulaNode::Not(a) => {
                let ka = self.prop_key(a).0;
                self.skeleton.borrow_mut().not(ka)
            }
            FormulaNode::Bin(op, a, b) => {
                let ka = self.prop_key(a).0;
                let kb = self.prop_key(b).0;
                self.skeleton.borrow_mut().apply(op, ka, kb)
            }
            FormulaNode::WeakNext(_)
            | FormulaNode::StrongNext(_)
            | FormulaNode::Finally(_)
            | FormulaNode::Globally(_)
            | FormulaNode::Until(..)
            | FormulaNode::Release(..) => {
                let mut sk = self.skeleton.borrow_mut();
                let v = sk.temporal_var(f);
                sk.var_node(v)
            }
        };
        self.skeleton.borrow_mut().key_memo.insert(f, k);
        PropKey(k)
    }

    /// The canonical representative of `f`'s propositional-equivalence
    /// class. Deterministic for the lifetime of the context, and
    /// idempotent: `canonical(canonical(f)) == canonical(f)`.
    pub fn canonical(&self, f: FormulaId) -> FormulaId {
        let k = self.prop_key(f);
        self.rebuild(k.0)
    }

    /// Two formulas are propositionally equivalent iff their keys agree.
    pub fn prop_equiv(&self, a: FormulaId, b: FormulaId) -> bool {
        self.prop_key(a) == self.prop_key(b)
    }

    /// Reconstructs a formula from a skeleton diagram by Shannon
    /// expansion, simplifying the five shapes where a branch is constant.
    fn rebuild(&self, k: u32) -> FormulaId {
        if k == BDD_TRUE {
            return self.tt();
        }
        if k == BDD_FALSE {
            return self.ff();
        }
        if let Some(&f) = self.skeleton.borrow().rebuild_memo.get(&k) {
            return f;
        }
        let (var, lo, hi) = {
            let sk = self.skeleton.borrow();
            sk.split(k).unwrap()
        };
        let vf = if (var as usize) < self.var_count() {
            self.atom(crate::context::VarId(var))
        } else {
            let sk = self.skeleton.borrow();
            sk.temporal_vars[var as usize - sk.atom_vars]
        };
        let lf = self.rebuild(lo);
        let hf = self.rebuild(hi);
        let f = match (lo, hi) {
            (BDD_FALSE, BDD_TRUE) => vf,
            (BDD_TRUE, BDD_FALSE) => self.not(vf),
            (BDD_FALSE, _) => self.and(vf, hf),
            (BDD_TRUE, _) => self.or(self.not(vf), hf),
            (_, BDD_FALSE) => self.and(self.not(vf), lf),
            (_, BDD_TRUE) => self.or(vf, lf),
            _ => self.or(self.and(vf, hf), self.and(self.not(vf), lf)),
        };
        self.skeleton.borrow_mut().rebuild_memo.insert(k, f);
        f
    }
}
