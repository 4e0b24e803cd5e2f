//! From formulas to transition diagrams and whole automata.
//!
//! `tr` compiles a formula into a diagram mapping each letter to a
//! (successor, accepting) terminal, one recursive rule per connective.
//! `belief_delta` universally quantifies the unobservable block out of
//! `tr`, yielding the transition function of the belief automaton: its
//! states summarize every obligation that some completion of the
//! observed prefix still imposes. `build_full` closes the initial state
//! under these transitions; the game solver instead walks them lazily.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use hashbrown::HashMap;

use crate::context::Context;
use crate::error::{Error, Limit};
use crate::logic::ast::{BinOp, FormulaId, FormulaNode};
use crate::logic::trace::Trace;
use crate::mtbdd::{MtbddNode, NodeId};

/// Cooperative resource budgets. `deadline` is polled between expansion
/// steps; returning `true` aborts the run with a time-limit error.
pub struct Limits<'a> {
    pub max_states: usize,
    pub max_nodes: usize,
    pub deadline: Option<&'a dyn Fn() -> bool>,
}

impl Default for Limits<'_> {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_nodes: 10_000_000,
            deadline: None,
        }
    }
}

impl Limits<'_> {
    pub(crate) fn check(&self, ctx: &Context, states: usize) -> Result<(), Error> {
        if states > self.max_states {
            return Err(Error::ResourceLimit { limit: Limit::States });
        }
        if ctx.mtbdd_node_count() > self.max_nodes {
            return Err(Error::ResourceLimit { limit: Limit::Nodes });
        }
        if let Some(deadline) = self.deadline {
            if deadline() {
                return Err(Error::ResourceLimit { limit: Limit::Time });
            }
        }
        Ok(())
    }
}

impl Context {
    /// Compiles `f` into its one-step transition diagram. Reading a
    /// letter `w` down the diagram lands on the terminal
    /// `(remainder after w, accept-if-the-word-ends-here)`.
    pub fn tr(&self, f: FormulaId) -> NodeId {
        if let Some(&id) = self.mtbdd.borrow().tr_cache.get(&f) {
            return id;
        }
        let id = match self.node(f) {
            FormulaNode::True => self.terminal(self.tt(), true),
            FormulaNode::False => self.terminal(self.ff(), false),
            FormulaNode::Atom(v) => {
                let t = self.terminal(self.tt(), true);
                let e = self.terminal(self.ff(), false);
                self.ite_node(v, e, t)
            }
            FormulaNode::Not(a) => self.negate(self.tr(a)),
            FormulaNode::Bin(op, a, b) => self.apply(op, self.tr(a), self.tr(b)),
            FormulaNode::WeakNext(a) => self.terminal(a, true),
            FormulaNode::StrongNext(a) => self.terminal(a, false),
            FormulaNode::Finally(a) => {
                self.apply(BinOp::Or, self.tr(a), self.terminal(f, false))
            }
            FormulaNode::Globally(a) => {
                self.apply(BinOp::And, self.tr(a), self.terminal(f, true))
            }
            FormulaNode::Until(a, b) => {
                let keep = self.apply(BinOp::And, self.tr(a), self.terminal(f, false));
                self.apply(BinOp::Or, self.tr(b), keep)
            }
            FormulaNode::Release(a, b) => {
                let release = self.apply(BinOp::Or, self.tr(a), self.terminal(f, true));
                self.apply(BinOp::And, self.tr(b), release)
            }
        };
        self.mtbdd.borrow_mut().tr_cache.insert(f, id);
        id
    }

    /// The belief transition function of state `s`: `tr(s)` with the
    /// unobservable block quantified away, so it maps each observable
    /// letter to the conjunction of the successors under every
    /// completion.
    pub fn belief_delta(&self, s: FormulaId) -> NodeId {
        if let Some(&id) = self.mtbdd.borrow().belief_cache.get(&s) {
            return id;
        }
        let id = self.forall_quantify(self.tr(s), self.unobservables());
        self.mtbdd.borrow_mut().belief_cache.insert(s, id);
        id
    }
}

/// A belief automaton: deterministic over observable letters, with
/// transition-based acceptance. `states` is in discovery order and
/// starts with the initial state; `delta` maps each state to its
/// transition diagram over the observable variables.
#[derive(Debug)]
pub struct Mtdfa {
    pub initial: FormulaId,
    pub states: Vec<FormulaId>,
    pub delta: HashMap<FormulaId, NodeId>,
}

/// Builds the complete belief automaton reachable from `[f]`, breadth
/// first, visiting successors in structural diagram order.
pub fn build_full(ctx: &Context, f: FormulaId, limits: &Limits) -> Result<Mtdfa, Error> {
    let initial = ctx.canonical(f);
    let mut states = alloc::vec![initial];
    let mut delta = HashMap::new();
    let mut queue = alloc::collections::VecDeque::from([initial]);
    let mut seen: hashbrown::HashSet<FormulaId> = hashbrown::HashSet::from([initial]);
    while let Some(s) = queue.pop_front() {
        limits.check(ctx, states.len())?;
        let d = ctx.belief_delta(s);
        delta.insert(s, d);
        for t in ctx.collect_terminals(d) {
            if seen.insert(t.dest) {
                states.push(t.dest);
                queue.push_back(t.dest);
            }
        }
    }
    Ok(Mtdfa { initial, states, delta })
}

/// Runs `m` on the observable trace `word` and reports acceptance: the
/// automaton accepts iff the transition taken on the last letter is
/// accepting.
pub fn accepts(ctx: &Context, m: &Mtdfa, word: &Trace) -> Result<bool, Error> {
    let mut state = m.initial;
    let mut accepted = false;
    for w in word.letters() {
        w.check_domain(ctx, ctx.observables())?;
        let d = m.delta.get(&state).ok_or_else(|| Error::MissingState {
            state: format!("{}", ctx.display(state)),
        })?;
        let t = ctx.evaluate(*d, w)?;
        state = t.dest;
        accepted = t.accepting;
    }
    Ok(accepted)
}

/// Lists `m`'s transitions explicitly, one line per diagram path:
/// `"state" <cube> <0|1> "successor"`, where the cube spells each
/// observable as `name`, `!name`, or `-` for variables the path skips.
/// States appear in discovery order, paths in structural order.
pub fn to_text(ctx: &Context, m: &Mtdfa) -> String {
    let mut out = String::new();
    let obs = ctx.observables();
    for &s in &m.states {
        let d = m.delta[&s];
        let mut path: Vec<(crate::context::VarId, bool)> = Vec::new();
        write_paths(ctx, &mut out, s, d, obs, &mut path);
    }
    out
}

fn write_paths(
    ctx: &Context,
    out: &mut String,
    state: FormulaId,
    node: NodeId,
    obs: &[crate::context::VarId],
    path: &mut Vec<(crate::context::VarId, bool)>,
) {
    match ctx.mtbdd_node(node) {
        MtbddNode::Terminal(t) => {
            let cube: Vec<String> = obs
                .iter()
                .map(|&v| match path.iter().find(|&&(w, _)| w == v) {
                    Some(&(_, true)) => format!("{}", ctx.var_name(v)),
                    Some(&(_, false)) => format!("!{}", ctx.var_name(v)),
                    None => "-".into(),
                })
                .collect();
            let _ = writeln!(
                out,
                "\"{}\" {} {} \"{}\"",
                ctx.display(state),
                cube.join(" "),
                if t.accepting { 1 } else { 0 },
                ctx.display(t.dest)
            );
        }
        MtbddNode::Internal { var, low, high } => {
            path.push((var, false));
            write_paths(ctx, out, state, low, obs, path);
            path.pop();
            path.push((var, true));
            write_paths(ctx, out, state, high, obs, path);
            path.pop();
        }
    }
}

/// Renders the automaton as one shared decision-diagram graph with a
/// labeled root stub per state.
pub fn to_dot(ctx: &Context, m: &Mtdfa) -> String {
    let roots: Vec<(String, NodeId)> = m
        .states
        .iter()
        .map(|&s| (format!("{}", ctx.display(s)), m.delta[&s]))
        .collect();
    ctx.mtbdd_dot(&roots)
}
