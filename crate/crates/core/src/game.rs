//! Reachability games on belief transition diagrams.
//!
//! A diagram doubles as a game graph: decision nodes on input variables
//! belong to the environment (three-valued AND), nodes on output
//! variables belong to the controller (three-valued OR), accepting
//! terminals are targets, and non-accepting terminals hand the play to
//! their successor state. The controller wins a state iff it can force
//! every play into an accepting terminal.
//!
//! `solve_full` runs a least-fixpoint pass over a prebuilt automaton.
//! `solve_otf` interleaves state discovery with solving: it walks the
//! graph depth first, resolves states early through pessimistic
//! (unknown-is-losing) and optimistic (unknown-is-winning) evaluations,
//! and propagates each resolution to recorded predecessors, so a verdict
//! on the initial state usually arrives long before the reachable state
//! space is exhausted.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::cell::RefCell;
use hashbrown::{HashMap, HashSet};

use crate::context::{Context, VarKind};
use crate::error::Error;
use crate::logic::ast::FormulaId;
use crate::mtbdd::{MtbddNode, NodeId, Terminal};
use crate::translate::{Limits, Mtdfa};

/// Three-valued verdict for a belief state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameStatus {
    Win,
    Lose,
    Unknown,
}

/// How terminal destinations with unknown status are valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Valuation {
    Exact,
    Optimistic,
    Pessimistic,
}

/// Mutable map from belief states to verdicts, with a version counter
/// that keys the evaluation memo.
pub struct StatusMap {
    map: HashMap<FormulaId, GameStatus>,
    version: u64,
    cache: RefCell<HashMap<(u64, NodeId, u8), GameStatus>>,
}

impl Default for StatusMap {
    fn default() -> Self {
        Self::new()
    }
}

impl StatusMap {
    pub fn new() -> Self {
        StatusMap {
            map: HashMap::new(),
            version: 0,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn get(&self, s: FormulaId) -> GameStatus {
        self.map.get(&s).copied().unwrap_or(GameStatus::Unknown)
    }

    pub fn set(&mut self, s: FormulaId, v: GameStatus) {
        self.map.insert(s, v);
        self.version += 1;
    }

    /// States currently mapped to `Win`.
    pub fn winners(&self) -> usize {
        self.map.values().filter(|&&v| v == GameStatus::Win).count()
    }
}

/// Evaluates a transition diagram as a three-valued game position under
/// the current statuses: accepting terminals are winning, other
/// terminals take their destination's status, input nodes conjoin and
/// output nodes disjoin.
pub fn eval3(ctx: &Context, node: NodeId, status: &StatusMap) -> GameStatus {
    eval3_with(ctx, node, status, Valuation::Exact)
}

fn eval3_with(ctx: &Context, node: NodeId, status: &StatusMap, val: Valuation) -> GameStatus {
    let key = (status.version, node, val as u8);
    if let Some(&v) = status.cache.borrow().get(&key) {
        return v;
    }
    let v = match ctx.mtbdd_node(node) {
        MtbddNode::Terminal(t) => {
            if t.accepting {
                GameStatus::Win
            } else {
                match (status.get(t.dest), val) {
                    (GameStatus::Unknown, Valuation::Optimistic) => GameStatus::Win,
                    (GameStatus::Unknown, Valuation::Pessimistic) => GameStatus::Lose,
                    (s, _) => s,
                }
            }
        }
        MtbddNode::Internal { var, low, high } => {
            let kind = ctx.var_kind(var);
            debug_assert!(
                kind != VarKind::Unobservable,
                "belief diagrams never test unobservable variables"
            );
            let l = eval3_with(ctx, low, status, val);
            if kind == VarKind::Input {
                // Environment chooses: worst case.
                if l == GameStatus::Lose {
                    GameStatus::Lose
                } else {
                    match eval3_with(ctx, high, status, val) {
                        GameStatus::Lose => GameStatus::Lose,
                        GameStatus::Unknown => GameStatus::Unknown,
                        GameStatus::Win => l,
                    }
                }
            } else {
                // Controller chooses: best case.
                if l == GameStatus::Win {
                    GameStatus::Win
                } else {
                    match eval3_with(ctx, high, status, val) {
                        GameStatus::Win => GameStatus::Win,
                        GameStatus::Unknown => GameStatus::Unknown,
                        GameStatus::Lose => l,
                    }
                }
            }
        }
    };
    status.cache.borrow_mut().insert(key, v);
    v
}

/// Counters reported with every solve. `wall_ms` is filled in by callers
/// that have a clock; the core never measures time itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Belief states seen (expanded or discovered as successors).
    pub state_count: usize,
    /// Belief transition functions actually computed.
    pub delta_count: usize,
    /// Diagram nodes interned in the context when the solve finished.
    pub node_count: usize,
    /// Apply-cache hits accumulated in the context.
    pub cache_hits: u64,
    pub wall_ms: u64,
}

/// Everything the solver learned, enough to extract a strategy or audit
/// the run.
pub struct GameAnalysis {
    pub initial: FormulaId,
    pub statuses: StatusMap,
    /// Fixpoint round in which each winning state was first derivable.
    pub ranks: HashMap<FormulaId, u32>,
    pub delta: HashMap<FormulaId, NodeId>,
    /// States whose transition function was computed, in that order.
    pub explored: Vec<FormulaId>,
}

/// A winning strategy: per reachable winning state, its transition
/// diagram restricted to one chosen branch at every output node.
pub struct Strategy {
    pub initial: FormulaId,
    /// Strategy states in discovery order, starting with `initial`.
    pub states: Vec<FormulaId>,
    map: HashMap<FormulaId, StratNode>,
}

impl Strategy {
    pub fn node(&self, s: FormulaId) -> &StratNode {
        &self.map[&s]
    }
}

/// A restricted transition diagram. Input branching survives; each
/// output variable is either fixed to one value or absent (the choice
/// did not matter).
pub enum StratNode {
    Leaf(Terminal),
    Branch { var: crate::context::VarId, low: Box<StratNode>, high: Box<StratNode> },
    Choice { var: crate::context::VarId, value: bool, child: Box<StratNode> },
}

/// Verdict plus supporting data for one synthesis game.
pub struct GameResult {
    pub realizable: bool,
    pub strategy: Option<Strategy>,
    pub stats: Stats,
    pub analysis: GameAnalysis,
}

fn filtered_successors(ctx: &Context, d: NodeId) -> Vec<FormulaId> {
    ctx.collect_terminals(d)
        .into_iter()
        .filter(|t| !t.accepting)
        .map(|t| t.dest)
        .collect()
}

/// Solves the reachability game on a fully built automaton by least
/// fixpoint: round after round, every state whose diagram now evaluates
/// to a win under the accumulated statuses is marked winning. Rounds use
/// the statuses of the previous round, so a state's rank strictly
/// dominates the ranks of the winning successors that justify it.
pub fn solve_full(ctx: &Context, m: &Mtdfa) -> GameResult {
    let mut status = StatusMap::new();
    let mut ranks = HashMap::new();
    let mut round = 0u32;
    loop {
        round += 1;
        let mut newly = Vec::new();
        for &s in &m.states {
            if status.get(s) == GameStatus::Win {
                continue;
            }
            if eval3(ctx, m.delta[&s], &status) == GameStatus::Win {
                newly.push(s);
            }
        }
        if newly.is_empty() {
            break;
        }
        for s in newly {
            status.set(s, GameStatus::Win);
            ranks.insert(s, round);
        }
    }
    for &s in &m.states {
        if status.get(s) == GameStatus::Unknown {
            status.set(s, GameStatus::Lose);
        }
    }
    let realizable = status.get(m.initial) == GameStatus::Win;
    let analysis = GameAnalysis {
        initial: m.initial,
        statuses: status,
        ranks,
        delta: m.delta.clone(),
        explored: m.states.clone(),
    };
    let strategy = realizable.then(|| {
        extract_strategy(ctx, &analysis).expect("winning initial state yields a strategy")
    });
    let stats = Stats {
        state_count: m.states.len(),
        delta_count: m.delta.len(),
        node_count: ctx.mtbdd_node_count(),
        cache_hits: ctx.apply_cache_hits(),
        wall_ms: 0,
    };
    GameResult { realizable, strategy, stats, analysis }
}

struct Frame {
    state: FormulaId,
    next: usize,
}

/// Solves the game for `f` while discovering belief states on demand.
/// Returns as soon as the initial state's verdict is certain; states
/// behind accepting terminals and branches the verdict never needed are
/// not expanded, so the number of transition-function computations never
/// exceeds the full automaton's state count.
pub fn solve_otf(ctx: &Context, f: FormulaId, limits: &Limits) -> Result<GameResult, Error> {
    let initial = ctx.canonical(f);
    let mut status = StatusMap::new();
    let mut delta: HashMap<FormulaId, NodeId> = HashMap::new();
    let mut succs: HashMap<FormulaId, Vec<FormulaId>> = HashMap::new();
    let mut preds: HashMap<FormulaId, Vec<FormulaId>> = HashMap::new();
    let mut explored: Vec<FormulaId> = Vec::new();
    let mut seen: HashSet<FormulaId> = HashSet::from([initial]);
    let mut frames: Vec<Frame> = Vec::new();

    let expand = |s: FormulaId,
                  delta: &mut HashMap<FormulaId, NodeId>,
                  succs: &mut HashMap<FormulaId, Vec<FormulaId>>,
                  explored: &mut Vec<FormulaId>,
                  seen: &mut HashSet<FormulaId>|
     -> Result<(), Error> {
        limits.check(ctx, explored.len() + 1)?;
        let d = ctx.belief_delta(s);
        let next = filtered_successors(ctx, d);
        for &t in &next {
            seen.insert(t);
        }
        delta.insert(s, d);
        succs.insert(s, next);
        explored.push(s);
        Ok(())
    };

    let try_resolve = |s: FormulaId, status: &mut StatusMap, delta: &HashMap<FormulaId, NodeId>| {
        if status.get(s) != GameStatus::Unknown {
            return true;
        }
        let d = delta[&s];
        if eval3_with(ctx, d, status, Valuation::Pessimistic) == GameStatus::Win {
            status.set(s, GameStatus::Win);
            return true;
        }
        if eval3_with(ctx, d, status, Valuation::Optimistic) == GameStatus::Lose {
            status.set(s, GameStatus::Lose);
            return true;
        }
        false
    };

    expand(initial, &mut delta, &mut succs, &mut explored, &mut seen)?;
    frames.push(Frame { state: initial, next: 0 });

    while let Some(top) = frames.last().map(|f| f.state) {
        if status.get(initial) != GameStatus::Unknown {
            break;
        }
        if limits.deadline.is_some_and(|d| d()) {
            return Err(Error::ResourceLimit { limit: crate::error::Limit::Time });
        }
        if status.get(top) != GameStatus::Unknown {
            frames.pop();
            continue;
        }
        let resolved_now = try_resolve(top, &mut status, &delta);
        if resolved_now {
            propagate(ctx, top, &preds, &mut status, &delta, &try_resolve);
            frames.pop();
            continue;
        }
        let mut pushed = false;
        loop {
            let frame = frames.last_mut().expect("frame present");
            let list = &succs[&top];
            if frame.next >= list.len() {
                break;
            }
            let t = list[frame.next];
            frame.next += 1;
            let entry = preds.entry(t).or_default();
            if !entry.contains(&top) {
                entry.push(top);
            }
            if status.get(t) == GameStatus::Unknown && !delta.contains_key(&t) {
                expand(t, &mut delta, &mut succs, &mut explored, &mut seen)?;
                frames.push(Frame { state: t, next: 0 });
                pushed = true;
                break;
            }
        }
        if pushed {
            continue;
        }
        // Every successor is recorded; one last look, then leave the
        // state to predecessor propagation or the final sweep.
        if try_resolve(top, &mut status, &delta) {
            propagate(ctx, top, &preds, &mut status, &delta, &try_resolve);
        }
        frames.pop();
    }

    // Exhaustion without a verdict means no winning derivation exists.
    for &s in &explored {
        if status.get(s) == GameStatus::Unknown {
            status.set(s, GameStatus::Lose);
        }
    }
    let realizable = status.get(initial) == GameStatus::Win;

    let (final_status, ranks) = if realizable {
        rank_explored(ctx, &explored, &delta)
    } else {
        (status, HashMap::new())
    };
    let analysis = GameAnalysis {
        initial,
        statuses: final_status,
        ranks,
        delta,
        explored,
    };
    let strategy = realizable.then(|| {
        extract_strategy(ctx, &analysis).expect("winning initial state yields a strategy")
    });
    let stats = Stats {
        state_count: seen.len(),
        delta_count: analysis.explored.len(),
        node_count: ctx.mtbdd_node_count(),
        cache_hits: ctx.apply_cache_hits(),
        wall_ms: 0,
    };
    Ok(GameResult { realizable, strategy, stats, analysis })
}

fn propagate(
    ctx: &Context,
    start: FormulaId,
    preds: &HashMap<FormulaId, Vec<FormulaId>>,
    status: &mut StatusMap,
    delta: &HashMap<FormulaId, NodeId>,
    try_resolve: &impl Fn(FormulaId, &mut StatusMap, &HashMap<FormulaId, NodeId>) -> bool,
) {
    let _ = ctx;
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        let Some(parents) = preds.get(&t) else { continue };
        for &p in parents {
            if status.get(p) == GameStatus::Unknown && try_resolve(p, status, delta) {
                queue.push_back(p);
            }
        }
    }
}

/// Recomputes the winning set of the explored subgraph by round-based
/// least fixpoint, yielding ranks that strictly decrease along every
/// strategy edge.
fn rank_explored(
    ctx: &Context,
    explored: &[FormulaId],
    delta: &HashMap<FormulaId, NodeId>,
) -> (StatusMap, HashMap<FormulaId, u32>) {
    let mut status = StatusMap::new();
    let mut ranks = HashMap::new();
    let mut round = 0u32;
    loop {
        round += 1;
        let mut newly = Vec::new();
        for &s in explored {
            if status.get(s) == GameStatus::Win {
                continue;
            }
            if eval3(ctx, delta[&s], &status) == GameStatus::Win {
                newly.push(s);
            }
        }
        if newly.is_empty() {
            break;
        }
        for s in newly {
            status.set(s, GameStatus::Win);
            ranks.insert(s, round);
        }
    }
    for &s in explored {
        if status.get(s) == GameStatus::Unknown {
            status.set(s, GameStatus::Lose);
        }
    }
    (status, ranks)
}

/// Restricts every winning state's diagram to a single choice per output
/// node, preferring branches that terminate immediately; ties between
/// two immediately terminating branches go high, ties between two
/// continuations go low. Continuation leaves must strictly decrease the
/// rank, which rules out stalling cycles.
pub fn extract_strategy(ctx: &Context, analysis: &GameAnalysis) -> Result<Strategy, Error> {
    if analysis.statuses.get(analysis.initial) != GameStatus::Win {
        return Err(Error::Unrealizable);
    }
    let mut states = alloc::vec![analysis.initial];
    let mut map = HashMap::new();
    let mut queue = VecDeque::from([analysis.initial]);
    let mut seen: HashSet<FormulaId> = HashSet::from([analysis.initial]);
    while let Some(s) = queue.pop_front() {
        let bound = analysis.ranks[&s];
        let (node, _) = restrict(ctx, analysis, analysis.delta[&s], bound)
            .expect("winning states admit a rank-decreasing restriction");
        let mut leaves = Vec::new();
        strat_leaves(&node, &mut leaves);
        for t in leaves {
            if !t.accepting && seen.insert(t.dest) {
                states.push(t.dest);
                queue.push_back(t.dest);
            }
        }
        map.insert(s, node);
    }
    Ok(Strategy { initial: analysis.initial, states, map })
}

fn strat_leaves(node: &StratNode, out: &mut Vec<Terminal>) {
    match node {
        StratNode::Leaf(t) => out.push(*t),
        StratNode::Branch { low, high, .. } => {
            strat_leaves(low, out);
            strat_leaves(high, out);
        }
        StratNode::Choice { child, .. } => strat_leaves(child, out),
    }
}

fn restrict(
    ctx: &Context,
    analysis: &GameAnalysis,
    node: NodeId,
    bound: u32,
) -> Option<(StratNode, bool)> {
    match ctx.mtbdd_node(node) {
        MtbddNode::Terminal(t) => {
            if t.accepting {
                Some((StratNode::Leaf(t), true))
            } else if analysis.statuses.get(t.dest) == GameStatus::Win
                && analysis.ranks.get(&t.dest).copied().unwrap_or(u32::MAX) < bound
            {
                Some((StratNode::Leaf(t), false))
            } else {
                None
            }
        }
        MtbddNode::Internal { var, low, high } => {
            if ctx.var_kind(var) == VarKind::Input {
                let (ln, li) = restrict(ctx, analysis, low, bound)?;
                let (hn, hi) = restrict(ctx, analysis, high, bound)?;
                Some((
                    StratNode::Branch { var, low: Box::new(ln), high: Box::new(hn) },
                    li && hi,
                ))
            } else {
                let l = restrict(ctx, analysis, low, bound);
                let h = restrict(ctx, analysis, high, bound);
                let (value, picked, imm) = match (l, h) {
                    (None, None) => return None,
                    (Some((n, i)), None) => (false, n, i),
                    (None, Some((n, i))) => (true, n, i),
                    (Some((ln, li)), Some((hn, hi))) => {
                        if hi {
                            (true, hn, true)
                        } else if li {
                            (false, ln, true)
                        } else {
                            (false, ln, false)
                        }
                    }
                };
                Some((
                    StratNode::Choice { var, value, child: Box::new(picked) },
                    imm,
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Semantics;
    use crate::translate::build_full;

    fn hidden_ctx() -> Context {
        Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap()
    }

    fn spec(ctx: &Context) -> FormulaId {
        ctx.parse("(G F u -> F(i <-> o)) & (G F !u -> F(i | o))").unwrap()
    }

    #[test]
    fn accepting_terminals_always_win() {
        let c = hidden_ctx();
        let t = c.terminal(c.parse("F i").unwrap(), true);
        assert_eq!(eval3(&c, t, &StatusMap::new()), GameStatus::Win);
        let t = c.terminal(c.parse("F i").unwrap(), false);
        assert_eq!(eval3(&c, t, &StatusMap::new()), GameStatus::Unknown);
        let mut status = StatusMap::new();
        status.set(c.canonical(c.parse("F i").unwrap()), GameStatus::Lose);
        assert_eq!(eval3(&c, t, &status), GameStatus::Lose);
    }

    #[test]
    fn inputs_conjoin_and_outputs_disjoin() {
        let c = hidden_ctx();
        let f = spec(&c);
        let d = c.belief_delta(f);
        // With no knowledge the initial diagram is undecided: the
        // all-true corner wins immediately, the rest is open.
        assert_eq!(eval3(&c, d, &StatusMap::new()), GameStatus::Unknown);
        let half2 = c.canonical(c.parse("G F !u -> F(i | o)").unwrap());
        let half1 = c.canonical(c.parse("G F u -> F(i <-> o)").unwrap());
        // Every input has an output leading into the winning half, so
        // the controller's disjunction rescues the whole diagram.
        let mut status = StatusMap::new();
        status.set(half1, GameStatus::Win);
        assert_eq!(eval3(&c, d, &status), GameStatus::Win);
        // With both continuation states lost, no output choice helps
        // under the low input and the environment's conjunction forces
        // the loss.
        let mut status = StatusMap::new();
        status.set(half1, GameStatus::Lose);
        status.set(half2, GameStatus::Lose);
        assert_eq!(eval3(&c, d, &status), GameStatus::Lose);
    }

    #[test]
    fn unsatisfiable_specifications_are_unrealizable() {
        let c = Context::new(&["p"], &["q"], &[], Semantics::Mealy).unwrap();
        let f = c.parse("G (X[!] tt)").unwrap();
        let m = build_full(&c, f, &Limits::default()).unwrap();
        let full = solve_full(&c, &m);
        assert!(!full.realizable);
        assert!(full.strategy.is_none());
        let otf = solve_otf(&c, f, &Limits::default()).unwrap();
        assert!(!otf.realizable);
    }

    #[test]
    fn hidden_fairness_spec_is_realizable_both_ways() {
        let c = hidden_ctx();
        let f = spec(&c);
        let m = build_full(&c, f, &Limits::default()).unwrap();
        let full = solve_full(&c, &m);
        assert!(full.realizable);
        assert_eq!(full.stats.state_count, 4);
        let c2 = hidden_ctx();
        let f2 = spec(&c2);
        let otf = solve_otf(&c2, f2, &Limits::default()).unwrap();
        assert!(otf.realizable);
        assert!(otf.stats.delta_count < full.stats.state_count);
        assert_eq!(otf.stats.delta_count, 2);
    }

    #[test]
    fn full_observability_resolves_in_one_expansion() {
        let c = Context::new(&["u", "i"], &["o"], &[], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let r = solve_otf(&c, f, &Limits::default()).unwrap();
        assert!(r.realizable);
        assert_eq!(r.stats.delta_count, 1);
        let strat = r.strategy.as_ref().unwrap();
        assert_eq!(strat.states.len(), 1);
    }

    #[test]
    fn ranks_strictly_decrease_along_strategies() {
        let c = hidden_ctx();
        let f = spec(&c);
        let m = build_full(&c, f, &Limits::default()).unwrap();
        let r = solve_full(&c, &m);
        let analysis = &r.analysis;
        let strat = r.strategy.as_ref().unwrap();
        for &s in &strat.states {
            let mut leaves = Vec::new();
            strat_leaves(strat.node(s), &mut leaves);
            for t in leaves {
                if !t.accepting {
                    assert!(analysis.ranks[&t.dest] < analysis.ranks[&s]);
                }
            }
        }
    }

    #[test]
    fn extraction_without_a_win_is_an_error() {
        let c = Context::new(&["p"], &[], &[], Semantics::Mealy).unwrap();
        let f = c.parse("G (X[!] tt)").unwrap();
        let r = solve_otf(&c, f, &Limits::default()).unwrap();
        assert!(matches!(
            extract_strategy(&c, &r.analysis),
            Err(Error::Unrealizable)
        ));
    }

    #[test]
    fn state_budget_aborts_lazy_solving() {
        let c = hidden_ctx();
        let f = spec(&c);
        let limits = Limits { max_states: 1, ..Limits::default() };
        assert!(matches!(
            solve_otf(&c, f, &limits),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn verdicts_agree_between_modes_on_small_specs() {
        let texts = [
            "F o",
            "G o",
            "F i",
            "o U i",
            "i U o",
            "G(i -> F o)",
            "F(i & o) | G(!i)",
            "X X o",
            "X[!] o",
            "F i -> F o",
            "G F o",
            "F G o",
        ];
        for text in texts {
            let c1 = hidden_ctx();
            let f1 = c1.parse(text).unwrap();
            let m = build_full(&c1, f1, &Limits::default()).unwrap();
            let full = solve_full(&c1, &m);
            let c2 = hidden_ctx();
            let f2 = c2.parse(text).unwrap();
            let otf = solve_otf(&c2, f2, &Limits::default()).unwrap();
            assert_eq!(full.realizable, otf.realizable, "modes disagree on {text}");
            assert!(
                otf.stats.delta_count <= full.stats.state_count,
                "lazy mode expanded more than the automaton has states on {text}"
            );
        }
    }
}
