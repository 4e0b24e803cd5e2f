//! Multi-terminal binary decision diagrams whose terminals are
//! (successor formula, accepting) pairs. One shared arena per context
//! hash-conses nodes and terminals, so diagram equality is pointer
//! equality and the apply cache is global.
//!
//! Internal nodes respect the context's global variable order, with the
//! unobservable block at the bottom. That layout makes universal
//! quantification over the unobservables a single bottom-up sweep whose
//! conjunctions happen entirely at the terminal level.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt::Write as _;
use hashbrown::{HashMap, HashSet};

use crate::context::{Context, VarId};
use crate::error::Error;
use crate::logic::ast::{BinOp, FormulaId};
use crate::logic::trace::Assignment;

/// Handle to an interned diagram node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

/// A terminal: jump to state `dest` (always a canonical representative),
/// accepting the word right here iff `accepting` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Terminal {
    pub dest: FormulaId,
    pub accepting: bool,
}

/// One diagram node, copied out of the arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtbddNode {
    Terminal(Terminal),
    Internal { var: VarId, low: NodeId, high: NodeId },
}

enum Node {
    Term(Terminal),
    Ite { var: VarId, low: NodeId, high: NodeId },
}

pub(crate) struct MtbddArena {
    nodes: Vec<Node>,
    term_table: HashMap<Terminal, NodeId>,
    ite_table: HashMap<(VarId, NodeId, NodeId), NodeId>,
    apply_cache: HashMap<(u8, NodeId, NodeId), NodeId>,
    negate_cache: HashMap<NodeId, NodeId>,
    /// Quantification memo, valid for one variable block at a time.
    forall_cache: HashMap<NodeId, NodeId>,
    forall_block: Vec<VarId>,
    apply_hits: Cell<u64>,
    pub(crate) tr_cache: HashMap<FormulaId, NodeId>,
    pub(crate) belief_cache: HashMap<FormulaId, NodeId>,
}

impl MtbddArena {
    pub(crate) fn new() -> Self {
        MtbddArena {
            nodes: Vec::new(),
            term_table: HashMap::new(),
            ite_table: HashMap::new(),
            apply_cache: HashMap::new(),
            negate_cache: HashMap::new(),
            forall_cache: HashMap::new(),
            forall_block: Vec::new(),
            apply_hits: Cell::new(0),
            tr_cache: HashMap::new(),
            belief_cache: HashMap::new(),
        }
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        id
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
    /// Interns the terminal `([dest], accepting)`; the destination is
    /// canonicalized first, so two propositionally equivalent successors
    /// share one terminal.
    pub fn terminal(&self, dest: FormulaId, accepting: bool) -> NodeId {
        let dest = self.canonical(dest);
        let term = Terminal { dest, accepting };
        if let Some(&id) = self.mtbdd.borrow().term_table.get(&term) {
            return id;
        }
        let mut arena = self.mtbdd.borrow_mut();
        let id = arena.push(Node::Term(term));
        arena.term_table.insert(term, id);
        id
    }

    /// Interns the decision node `(var, low, high)`, collapsing it when
    /// both branches coincide. `var` must sit above both children in the
    /// global variable order.
    pub fn ite_node(&self, var: VarId, low: NodeId, high: NodeId) -> NodeId {
        if low == high {
            return low;
        }
        debug_assert!(
            self.top_var(low).is_none_or(|v| var < v) && self.top_var(high).is_none_or(|v| var < v),
            "decision node for `{}` placed below one of its children",
            self.var_name(var)
        );
        if let Some(&id) = self.mtbdd.borrow().ite_table.get(&(var, low, high)) {
            return id;
        }
        let mut arena = self.mtbdd.borrow_mut();
        let id = arena.push(Node::Ite { var, low, high });
        arena.ite_table.insert((var, low, high), id);
        id
    }

    /// Copies out the node behind `id`.
    pub fn mtbdd_node(&self, id: NodeId) -> MtbddNode {
        match &self.mtbdd.borrow().nodes[id.0 as usize] {
            Node::Term(t) => MtbddNode::Terminal(*t),
            Node::Ite { var, low, high } => MtbddNode::Internal {
                var: *var,
                low: *low,
                high: *high,
            },
        }
    }

    /// The deciding variable of `id`, or `None` for terminals.
    pub fn top_var(&self, id: NodeId) -> Option<VarId> {
        match self.mtbdd_node(id) {
            MtbddNode::Terminal(_) => None,
            MtbddNode::Internal { var, .. } => Some(var),
        }
    }

    /// Total nodes interned in this context's arena.
    pub fn mtbdd_node_count(&self) -> usize {
        self.mtbdd.borrow().nodes.len()
    }

    /// Apply-cache hits accumulated over the context's lifetime.
    pub fn apply_cache_hits(&self) -> u64 {
        self.mtbdd.borrow().apply_hits.get()
    }

    /// Pointwise binary connective on two diagrams. Matching terminals
    /// fuse into `([a op b], flag_a op flag_b)`.
    pub fn apply(&self, op: BinOp, a: NodeId, b: NodeId) -> NodeId {
        let (na, nb) = (self.mtbdd_node(a), self.mtbdd_node(b));
        if let (MtbddNode::Terminal(ta), MtbddNode::Terminal(tb)) = (na, nb) {
            let dest = self.bin(op, ta.dest, tb.dest);
            return self.terminal(dest, op.eval(ta.accepting, tb.accepting));
        }
        {
            let arena = self.mtbdd.borrow();
            if let Some(&r) = arena.apply_cache.get(&(op_tag(op), a, b)) {
                arena.apply_hits.set(arena.apply_hits.get() + 1);
                return r;
            }
        }
        let va = self.top_var(a);
        let vb = self.top_var(b);
        let v = match (va, vb) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!("terminal pair handled above"),
        };
        let (al, ah) = self.cofactors(a, v);
        let (bl, bh) = self.cofactors(b, v);
        let rl = self.apply(op, al, bl);
        let rh = self.apply(op, ah, bh);
        let r = self.ite_node(v, rl, rh);
        self.mtbdd.borrow_mut().apply_cache.insert((op_tag(op), a, b), r);
        r
    }

    fn cofactors(&self, id: NodeId, v: VarId) -> (NodeId, NodeId) {
        match self.mtbdd_node(id) {
            MtbddNode::Internal { var, low, high } if var == v => (low, high),
            _ => (id, id),
        }
    }

    /// Pointwise negation: terminals become `([!dest], !flag)`.
    pub fn negate(&self, a: NodeId) -> NodeId {
        if let Some(&r) = self.mtbdd.borrow().negate_cache.get(&a) {
            return r;
        }
        let r = match self.mtbdd_node(a) {
            MtbddNode::Terminal(t) => self.terminal(self.not(t.dest), !t.accepting),
            MtbddNode::Internal { var, low, high } => {
                let nl = self.negate(low);
                let nh = self.negate(high);
                self.ite_node(var, nl, nh)
            }
        };
        let mut arena = self.mtbdd.borrow_mut();
        arena.negate_cache.insert(a, r);
        arena.negate_cache.insert(r, a);
        r
    }

    /// Universal quantification over the variable block `block`, which
    /// must be the bottom of the variable order: each `block` node is
    /// replaced by the conjunction of its children, which by the order
    /// precondition is a plain terminal fusion.
    pub fn forall_quantify(&self, a: NodeId, block: &[VarId]) -> NodeId {
        {
            let mut arena = self.mtbdd.borrow_mut();
            if arena.forall_block != block {
                arena.forall_cache.clear();
                arena.forall_block = block.to_vec();
            }
            if let Some(&r) = arena.forall_cache.get(&a) {
                return r;
            }
        }
        let r = match self.mtbdd_node(a) {
            MtbddNode::Terminal(_) => a,
            MtbddNode::Internal { var, low, high } => {
                let ql = self.forall_quantify(low, block);
                let qh = self.forall_quantify(high, block);
                if block.contains(&var) {
                    assert!(
                        self.top_var(ql).is_none() && self.top_var(qh).is_none(),
                        "quantified variable `{}` sits above an unquantified one",
                        self.var_name(var)
                    );
                    self.apply(BinOp::And, ql, qh)
                } else {
                    self.ite_node(var, ql, qh)
                }
            }
        };
        self.mtbdd.borrow_mut().forall_cache.insert(a, r);
        r
    }

    /// Follows the decision path selected by `w` down to a terminal.
    /// Every variable tested on the path must be bound by `w`.
    pub fn evaluate(&self, a: NodeId, w: &Assignment) -> Result<Terminal, Error> {
        let mut cur = a;
        loop {
            match self.mtbdd_node(cur) {
                MtbddNode::Terminal(t) => return Ok(t),
                MtbddNode::Internal { var, low, high } => {
                    let bit = w.get(var).ok_or_else(|| Error::UnassignedVariable {
                        name: self.var_name(var).to_string(),
                    })?;
                    cur = if bit { high } else { low };
                }
            }
        }
    }

    /// The distinct terminals reachable from `a`, in structural order
    /// (low branches before high branches).
    pub fn collect_terminals(&self, a: NodeId) -> Vec<Terminal> {
        let mut seen_nodes = HashSet::new();
        let mut seen_terms = HashSet::new();
        let mut out = Vec::new();
        let mut stack = alloc::vec![a];
        while let Some(id) = stack.pop() {
            if !seen_nodes.insert(id) {
                continue;
            }
            match self.mtbdd_node(id) {
                MtbddNode::Terminal(t) => {
                    if seen_terms.insert(t) {
                        out.push(t);
                    }
                }
                MtbddNode::Internal { low, high, .. } => {
                    stack.push(high);
                    stack.push(low);
                }
            }
        }
        out
    }

    /// Renders the diagrams under `roots` as one shared graph in DOT
    /// format. Dashed edges are low branches; accepting terminals are
    /// drawn with doubled borders.
    pub fn mtbdd_dot(&self, roots: &[(String, NodeId)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph mtbdd {{");
        let _ = writeln!(out, "  node [shape=circle];");
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut stack: Vec<NodeId> = roots.iter().rev().map(|&(_, r)| r).collect();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            order.push(id);
            if let MtbddNode::Internal { low, high, .. } = self.mtbdd_node(id) {
                stack.push(high);
                stack.push(low);
            }
        }
        for id in &order {
            match self.mtbdd_node(*id) {
                MtbddNode::Terminal(t) => {
                    let peripheries = if t.accepting { 2 } else { 1 };
                    let _ = writeln!(
                        out,
                        "  n{} [shape=box, peripheries={}, label=\"{}\"];",
                        id.0,
                        peripheries,
                        escape(&format!("{}", self.display(t.dest)))
                    );
                }
                MtbddNode::Internal { var, low, high } => {
                    let _ = writeln!(out, "  n{} [label=\"{}\"];", id.0, escape(self.var_name(var)));
                    let _ = writeln!(out, "  n{} -> n{} [style=dashed];", id.0, low.0);
                    let _ = writeln!(out, "  n{} -> n{};", id.0, high.0);
                }
            }
        }
        for (idx, (label, root)) in roots.iter().enumerate() {
            let _ = writeln!(out, "  r{} [shape=none, label=\"{}\"];", idx, escape(label));
            let _ = writeln!(out, "  r{} -> n{} [style=dotted];", idx, root.0);
        }
        let _ = writeln!(out, "}}");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Semantics;
    use crate::logic::trace::all_assignments;

    fn ctx() -> Context {
        Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap()
    }

    #[test]
    fn equivalent_destinations_share_a_terminal() {
        let c = ctx();
        let f = c.parse("F(i & o)").unwrap();
        let g = c.and(f, c.tt());
        assert_eq!(c.terminal(f, true), c.terminal(g, true));
        assert_ne!(c.terminal(f, true), c.terminal(f, false));
    }

    #[test]
    fn coinciding_branches_collapse() {
        let c = ctx();
        let t = c.terminal(c.tt(), true);
        assert_eq!(c.ite_node(c.var("i").unwrap(), t, t), t);
        let e = c.terminal(c.ff(), false);
        let n1 = c.ite_node(c.var("o").unwrap(), e, t);
        let n2 = c.ite_node(c.var("o").unwrap(), e, t);
        assert_eq!(n1, n2);
    }

    #[test]
    fn conjunction_of_two_diagrams_fuses_terminals() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let o = c.var("o").unwrap();
        let [a1, a2, a3] = ["F i", "G i", "F o"].map(|t| c.parse(t).unwrap());
        let [b1, b2, b3] = ["G o", "i U o", "o U i"].map(|t| c.parse(t).unwrap());
        // Left operand: over i then o, accepting everywhere except the
        // low-low corner.
        let left = c.ite_node(
            i,
            c.ite_node(o, c.terminal(a2, false), c.terminal(a1, true)),
            c.ite_node(o, c.terminal(a1, true), c.terminal(a3, true)),
        );
        let right = c.ite_node(
            i,
            c.ite_node(o, c.terminal(b3, true), c.terminal(b1, false)),
            c.ite_node(o, c.terminal(b1, false), c.terminal(b2, true)),
        );
        let conj = c.apply(BinOp::And, left, right);
        let expect = [
            ((false, false), c.and(a2, b3), false),
            ((false, true), c.and(a1, b1), false),
            ((true, false), c.and(a1, b1), false),
            ((true, true), c.and(a3, b2), true),
        ];
        for ((iv, ov), dest, acc) in expect {
            let w = Assignment::from_names(&c, &[("i", iv), ("o", ov)]).unwrap();
            let t = c.evaluate(conj, &w).unwrap();
            assert_eq!(t.dest, c.canonical(dest));
            assert_eq!(t.accepting, acc);
        }
        // The two mixed corners land on the same interned terminal.
        let w1 = Assignment::from_names(&c, &[("i", false), ("o", true)]).unwrap();
        let w2 = Assignment::from_names(&c, &[("i", true), ("o", false)]).unwrap();
        assert_eq!(c.evaluate(conj, &w1).unwrap(), c.evaluate(conj, &w2).unwrap());
    }

    #[test]
    fn apply_units_behave() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let x = c.ite_node(
            i,
            c.terminal(c.parse("F i").unwrap(), false),
            c.terminal(c.tt(), true),
        );
        let top = c.terminal(c.tt(), true);
        assert_eq!(c.apply(BinOp::And, x, top), x);
        assert_eq!(c.apply(BinOp::Or, x, x), x);
    }

    #[test]
    fn negation_is_an_involution() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let x = c.ite_node(
            i,
            c.terminal(c.parse("F i").unwrap(), false),
            c.terminal(c.parse("G o").unwrap(), true),
        );
        let n = c.negate(x);
        assert_eq!(c.negate(n), x);
        let w = Assignment::from_names(&c, &[("i", false)]).unwrap();
        let t = c.evaluate(n, &w).unwrap();
        assert_eq!(t.dest, c.canonical(c.parse("!F i").unwrap()));
        assert!(t.accepting);
    }

    #[test]
    fn quantification_fuses_bottom_blocks() {
        let c = ctx();
        let u = c.var("u").unwrap();
        let f = c.parse("F i").unwrap();
        let g = c.parse("G o").unwrap();
        let node = c.ite_node(u, c.terminal(f, true), c.terminal(g, false));
        let q = c.forall_quantify(node, c.unobservables());
        match c.mtbdd_node(q) {
            MtbddNode::Terminal(t) => {
                assert_eq!(t.dest, c.canonical(c.and(f, g)));
                assert!(!t.accepting);
            }
            other => panic!("expected a terminal, got {other:?}"),
        }
        // Terminals and diagrams without quantified variables are fixed
        // points.
        assert_eq!(c.forall_quantify(q, c.unobservables()), q);
        let i = c.var("i").unwrap();
        let mixed = c.ite_node(i, c.terminal(f, true), c.terminal(g, false));
        assert_eq!(c.forall_quantify(mixed, c.unobservables()), mixed);
    }

    #[test]
    fn quantification_keeps_observable_structure() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let u = c.var("u").unwrap();
        let f = c.parse("F i").unwrap();
        let g = c.parse("G o").unwrap();
        let below = c.ite_node(u, c.terminal(f, true), c.terminal(g, true));
        let top = c.ite_node(i, below, c.terminal(f, true));
        let q = c.forall_quantify(top, c.unobservables());
        let w0 = Assignment::from_names(&c, &[("i", false)]).unwrap();
        let w1 = Assignment::from_names(&c, &[("i", true)]).unwrap();
        assert_eq!(c.evaluate(q, &w0).unwrap().dest, c.canonical(c.and(f, g)));
        assert_eq!(c.evaluate(q, &w1).unwrap().dest, c.canonical(f));
        for w in all_assignments(c.observables()) {
            assert!(c.evaluate(q, &w).is_ok());
        }
    }

    #[test]
    fn evaluation_requires_bound_variables() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let x = c.ite_node(i, c.terminal(c.tt(), true), c.terminal(c.ff(), false));
        let err = c.evaluate(x, &Assignment::empty()).unwrap_err();
        assert_eq!(err, Error::UnassignedVariable { name: "i".into() });
    }

    #[test]
    fn terminal_collection_is_in_structural_order() {
        let c = ctx();
        let i = c.var("i").unwrap();
        let o = c.var("o").unwrap();
        let ta = c.terminal(c.parse("F i").unwrap(), false);
        let tb = c.terminal(c.tt(), true);
        let node = c.ite_node(i, c.ite_node(o, ta, tb), tb);
        let terms = c.collect_terminals(node);
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].dest, c.parse("F i").unwrap());
        assert_eq!(terms[1].dest, c.tt());
    }

    #[test]
    fn dot_output_mentions_every_root() {
        let c = ctx();
        let t = c.terminal(c.tt(), true);
        let dot = c.mtbdd_dot(&[("root".into(), t)]);
        assert!(dot.contains("digraph"));
        assert!(dot.contains("peripheries=2"));
        assert!(dot.contains("root"));
    }
}
