//! Finite-state controllers extracted from winning strategies.
//!
//! A controller state remembers one belief formula; its transitions
//! partition the input assignments into cubes, fix a total output
//! assignment per cube, and either continue in a successor state or
//! terminate the interaction. `verify_controller` replays the machine
//! against the plain word semantics, so a verdict does not have to be
//! trusted on the strength of the game solver alone.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::context::{Context, Semantics, VarId, VarKind};
use crate::game::{StratNode, Strategy};
use crate::logic::ast::FormulaId;
use crate::logic::trace::{all_assignments, all_traces, Assignment, Trace};

/// Where a transition hands the play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    State(usize),
    Terminate,
}

/// One guarded move: if the current input matches `cube`, emit
/// `outputs` and continue at `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllerTransition {
    /// Input literals in variable order; empty means always.
    pub cube: Vec<(VarId, bool)>,
    /// A value for every declared output, in declaration order.
    pub outputs: Vec<(VarId, bool)>,
    pub target: Target,
}

/// A controller state labeled with the belief it was extracted from.
#[derive(Debug, Clone)]
pub struct ControllerState {
    pub belief: FormulaId,
    pub transitions: Vec<ControllerTransition>,
}

impl ControllerState {
    /// The unique transition whose cube matches the assignment.
    pub fn matching_row(&self, a: &Assignment) -> Option<&ControllerTransition> {
        self.transitions
            .iter()
            .find(|t| t.cube.iter().all(|&(v, b)| a.get(v) == Some(b)))
    }
}

/// A terminating transducer. State 0 is initial.
#[derive(Debug, Clone)]
pub struct Controller {
    pub semantics: Semantics,
    pub states: Vec<ControllerState>,
}

/// Flattens a strategy into explicit transitions: every root-to-leaf
/// path of a restricted diagram becomes one row, with unmentioned
/// outputs defaulting to true, then adjacent rows that differ in a
/// single input literal are merged until no merge applies.
pub fn build_controller(ctx: &Context, strat: &Strategy) -> Controller {
    let index: HashMap<FormulaId, usize> = strat
        .states
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    let mut states = Vec::new();
    for &s in &strat.states {
        let mut rows = Vec::new();
        let mut cube = Vec::new();
        let mut chosen = Vec::new();
        flatten(ctx, strat.node(s), &mut cube, &mut chosen, &index, &mut rows);
        merge_rows(&mut rows);
        states.push(ControllerState { belief: s, transitions: rows });
    }
    Controller { semantics: ctx.semantics(), states }
}

fn flatten(
    ctx: &Context,
    node: &StratNode,
    cube: &mut Vec<(VarId, bool)>,
    chosen: &mut Vec<(VarId, bool)>,
    index: &HashMap<FormulaId, usize>,
    rows: &mut Vec<ControllerTransition>,
) {
    match node {
        StratNode::Leaf(t) => {
            let outputs = ctx
                .outputs()
                .iter()
                .map(|&v| {
                    let value = chosen
                        .iter()
                        .find(|&&(cv, _)| cv == v)
                        .map_or(true, |&(_, b)| b);
                    (v, value)
                })
                .collect();
            let target = if t.accepting {
                Target::Terminate
            } else {
                Target::State(index[&t.dest])
            };
            rows.push(ControllerTransition { cube: cube.clone(), outputs, target });
        }
        StratNode::Branch { var, low, high } => {
            cube.push((*var, false));
            flatten(ctx, low, cube, chosen, index, rows);
            cube.pop();
            cube.push((*var, true));
            flatten(ctx, high, cube, chosen, index, rows);
            cube.pop();
        }
        StratNode::Choice { var, value, child } => {
            chosen.push((*var, *value));
            flatten(ctx, child, cube, chosen, index, rows);
            chosen.pop();
        }
    }
}

fn merge_rows(rows: &mut Vec<ControllerTransition>) {
    loop {
        let mut merged = None;
        'scan: for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if let Some(cube) = merge_cubes(&rows[i], &rows[j]) {
                    merged = Some((i, j, cube));
                    break 'scan;
                }
            }
        }
        let Some((i, j, cube)) = merged else { break };
        rows[i].cube = cube;
        rows.remove(j);
    }
}

/// Two rows with the same outputs and target merge when their cubes
/// name the same variables and disagree in exactly one polarity.
fn merge_cubes(a: &ControllerTransition, b: &ControllerTransition) -> Option<Vec<(VarId, bool)>> {
    if a.outputs != b.outputs || a.target != b.target || a.cube.len() != b.cube.len() {
        return None;
    }
    let mut diff = None;
    for (x, y) in a.cube.iter().zip(&b.cube) {
        if x.0 != y.0 {
            return None;
        }
        if x.1 != y.1 {
            if diff.is_some() {
                return None;
            }
            diff = Some(x.0);
        }
    }
    let drop = diff?;
    Some(a.cube.iter().copied().filter(|&(v, _)| v != drop).collect())
}

/// Renders the controller in a line-oriented text format: header lines
/// for the semantics and alphabet, then one `state: cube / outputs ->
/// target` line per transition. Empty cubes print as `1`.
pub fn export_controller(ctx: &Context, c: &Controller) -> String {
    let mut out = String::new();
    out.push_str(&format!("semantics: {}\n", c.semantics));
    out.push_str("ins:");
    for &v in ctx.inputs() {
        out.push_str(&format!(" {}", ctx.var_name(v)));
    }
    out.push('\n');
    out.push_str("outs:");
    for &v in ctx.outputs() {
        out.push_str(&format!(" {}", ctx.var_name(v)));
    }
    out.push('\n');
    out.push_str("init: S0\n");
    for (i, st) in c.states.iter().enumerate() {
        for t in &st.transitions {
            let target = match t.target {
                Target::Terminate => String::from("TERMINATE"),
                Target::State(j) => format!("S{j}"),
            };
            out.push_str(&format!(
                "S{i}: {} / {} -> {target}\n",
                cube_text(ctx, &t.cube),
                cube_text(ctx, &t.outputs)
            ));
        }
    }
    out
}

fn cube_text(ctx: &Context, lits: &[(VarId, bool)]) -> String {
    if lits.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (k, &(v, b)) in lits.iter().enumerate() {
        if k > 0 {
            s.push_str(" & ");
        }
        if !b {
            s.push('!');
        }
        s.push_str(ctx.var_name(v));
    }
    s
}

/// Renders the controller as a DOT digraph with a doubled terminate
/// node and the belief formula in each state tooltip.
pub fn controller_dot(ctx: &Context, c: &Controller) -> String {
    let mut out = String::from("digraph controller {\n  rankdir=LR;\n");
    out.push_str("  init [shape=point];\n");
    let mut used_term = false;
    for (i, st) in c.states.iter().enumerate() {
        let label = crate::mtbdd::escape(&format!("{}", ctx.display(st.belief)));
        out.push_str(&format!(
            "  S{i} [shape=circle, label=\"S{i}\", tooltip=\"{label}\"];\n"
        ));
    }
    out.push_str("  init -> S0;\n");
    for (i, st) in c.states.iter().enumerate() {
        for t in &st.transitions {
            let label = crate::mtbdd::escape(&format!(
                "{} / {}",
                cube_text(ctx, &t.cube),
                cube_text(ctx, &t.outputs)
            ));
            let target = match t.target {
                Target::Terminate => {
                    used_term = true;
                    String::from("TERM")
                }
                Target::State(j) => format!("S{j}"),
            };
            out.push_str(&format!("  S{i} -> {target} [label=\"{label}\"];\n"));
        }
    }
    if used_term {
        out.push_str("  TERM [shape=doublecircle, label=\"TERMINATE\"];\n");
    }
    out.push_str("}\n");
    out
}

/// Bounds on the replay effort `verify_controller` spends. When an
/// exhaustive sweep would exceed a cap, a seeded sample of the same kind
/// of object is checked instead, so verification stays deterministic
/// and fast on large alphabets.
#[derive(Debug, Clone, Copy)]
pub struct VerifyBudget {
    /// Exhaustive play enumeration is used while the play-tree bound
    /// stays under this.
    pub max_plays: u64,
    /// Exhaustive hidden-completion checks while 2^(|U| * len) stays
    /// under this.
    pub max_completions: u64,
    /// Sample size used past either cap.
    pub samples: u32,
    pub seed: u64,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        VerifyBudget { max_plays: 1 << 14, max_completions: 1 << 12, samples: 256, seed: 0x5eed }
    }
}

/// Checks a controller against the specification it was synthesized
/// for, without consulting the game solver: structural sanity (total,
/// disjoint, exhaustive, output-complete, Moore-constant), forced
/// termination (the continuation graph is acyclic), and semantic
/// soundness (every play, at its terminate step, has produced a word
/// that satisfies the formula under every completion of the
/// unobservable inputs).
pub fn verify_controller(
    ctx: &Context,
    c: &Controller,
    f: FormulaId,
    budget: &VerifyBudget,
) -> Result<(), String> {
    if c.states.is_empty() {
        return Err(String::from("controller has no states"));
    }
    let ins = ctx.inputs();
    let outs = ctx.outputs();
    if ins.len() > 20 {
        return Err(String::from("too many inputs to verify exhaustively"));
    }
    for (i, st) in c.states.iter().enumerate() {
        for t in &st.transitions {
            let declared: Vec<VarId> = t.outputs.iter().map(|&(v, _)| v).collect();
            if declared != *outs {
                return Err(format!("state S{i}: outputs are not total in declaration order"));
            }
            for &(v, _) in &t.cube {
                if ctx.var_kind(v) != VarKind::Input {
                    return Err(format!("state S{i}: cube tests non-input {}", ctx.var_name(v)));
                }
            }
            if let Target::State(j) = t.target {
                if j >= c.states.len() {
                    return Err(format!("state S{i}: transition to missing state S{j}"));
                }
            }
        }
        for a in all_assignments(ins) {
            let hits = st
                .transitions
                .iter()
                .filter(|t| t.cube.iter().all(|&(v, b)| a.get(v) == Some(b)))
                .count();
            if hits != 1 {
                return Err(format!(
                    "state S{i}: {hits} transitions match one input assignment"
                ));
            }
        }
        if c.semantics == Semantics::Moore {
            if let Some(first) = st.transitions.first() {
                if st.transitions.iter().any(|t| t.outputs != first.outputs) {
                    return Err(format!(
                        "state S{i}: Moore outputs vary with the current input"
                    ));
                }
            }
        }
    }

    if let Some(cycle_state) = find_cycle(c) {
        return Err(format!(
            "state S{cycle_state} lies on a continuation cycle; the environment can postpone termination forever"
        ));
    }

    // Play length is bounded by the state count because continuation
    // edges are acyclic.
    let depth = c.states.len() as u32;
    let fanout = 1u64 << ins.len();
    let exhaustive = fanout
        .checked_pow(depth)
        .is_some_and(|total| total <= budget.max_plays);
    let mut checker = Checker { ctx, c, f, budget, checked: 0 };
    if exhaustive {
        let mut word = Vec::new();
        checker.play_all(0, &mut word)?;
    } else {
        let mut rng = Rng(budget.seed);
        for _ in 0..budget.samples {
            checker.play_random(&mut rng)?;
        }
    }
    Ok(())
}

fn find_cycle(c: &Controller) -> Option<usize> {
    // 0 unvisited, 1 on stack, 2 done.
    let mut color = alloc::vec![0u8; c.states.len()];
    fn visit(c: &Controller, i: usize, color: &mut [u8]) -> bool {
        color[i] = 1;
        for t in &c.states[i].transitions {
            if let Target::State(j) = t.target {
                if color[j] == 1 || (color[j] == 0 && visit(c, j, color)) {
                    return true;
                }
            }
        }
        color[i] = 2;
        false
    }
    (0..c.states.len()).find(|&i| color[i] == 0 && visit(c, i, &mut color))
}

struct Checker<'a> {
    ctx: &'a Context,
    c: &'a Controller,
    f: FormulaId,
    budget: &'a VerifyBudget,
    checked: u64,
}

impl Checker<'_> {
    fn step(&self, state: usize, input: &Assignment) -> (Assignment, Target) {
        let row = self.c.states[state]
            .matching_row(input)
            .expect("structural pass guarantees a match");
        let out = Assignment::new(row.outputs.clone()).expect("outputs are distinct");
        (input.fuse(&out).expect("inputs and outputs are disjoint"), row.target)
    }

    fn play_all(&mut self, state: usize, word: &mut Vec<Assignment>) -> Result<(), String> {
        for input in all_assignments(self.ctx.inputs()) {
            let (letter, target) = self.step(state, &input);
            word.push(letter);
            match target {
                Target::Terminate => self.check_word(word)?,
                Target::State(j) => self.play_all(j, word)?,
            }
            word.pop();
        }
        Ok(())
    }

    fn play_random(&mut self, rng: &mut Rng) -> Result<(), String> {
        let ins = self.ctx.inputs();
        let mut state = 0usize;
        let mut word = Vec::new();
        loop {
            let input = Assignment::from_bits(ins, rng.next() & ((1 << ins.len()) - 1));
            let (letter, target) = self.step(state, &input);
            word.push(letter);
            match target {
                Target::Terminate => return self.check_word(&word),
                Target::State(j) => state = j,
            }
        }
    }

    /// The word the play produced must satisfy the formula under every
    /// assignment of the unobservable inputs.
    fn check_word(&mut self, word: &[Assignment]) -> Result<(), String> {
        let trace = Trace::new(word.to_vec()).expect("plays are nonempty and uniform");
        let unobs = self.ctx.unobservables();
        if unobs.is_empty() {
            return self.check_completion(&trace, None);
        }
        let combos = 1u64
            .checked_shl((unobs.len() * word.len()) as u32)
            .unwrap_or(u64::MAX);
        if combos <= self.budget.max_completions {
            for hidden in all_traces(unobs, word.len()) {
                self.check_completion(&trace, Some(&hidden))?;
            }
        } else {
            let mut rng = Rng(self.budget.seed ^ self.checked);
            for _ in 0..self.budget.samples {
                let letters = (0..word.len())
                    .map(|_| Assignment::from_bits(unobs, rng.next() & ((1 << unobs.len()) - 1)))
                    .collect();
                let hidden = Trace::new(letters).expect("nonempty by construction");
                self.check_completion(&trace, Some(&hidden))?;
            }
        }
        Ok(())
    }

    fn check_completion(&mut self, trace: &Trace, hidden: Option<&Trace>) -> Result<(), String> {
        self.checked += 1;
        let full = match hidden {
            Some(h) => trace.fuse(h).expect("hidden block is disjoint"),
            None => trace.clone(),
        };
        let ok = self
            .ctx
            .models(&full, 0, self.f)
            .map_err(|e| format!("evaluation failed: {e}"))?;
        if ok {
            Ok(())
        } else {
            Err(format!(
                "terminated after {} letters on a word that violates the specification",
                trace.len()
            ))
        }
    }
}

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::solve_otf;
    use crate::translate::Limits;

    fn spec(ctx: &Context) -> FormulaId {
        ctx.parse("(G F u -> F(i <-> o)) & (G F !u -> F(i | o))").unwrap()
    }

    fn synthesize(ctx: &Context, f: FormulaId) -> Controller {
        let r = solve_otf(ctx, f, &Limits::default()).unwrap();
        build_controller(ctx, r.strategy.as_ref().expect("realizable"))
    }

    #[test]
    fn hidden_spec_controller_matches_the_expected_machine() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let ctrl = synthesize(&c, f);
        assert_eq!(ctrl.states.len(), 2);
        let i = c.var("i").unwrap();
        let o = c.var("o").unwrap();
        let s0 = &ctrl.states[0].transitions;
        assert_eq!(s0.len(), 2);
        assert_eq!(s0[0].cube, alloc::vec![(i, false)]);
        assert_eq!(s0[0].outputs, alloc::vec![(o, false)]);
        assert_eq!(s0[0].target, Target::State(1));
        assert_eq!(s0[1].cube, alloc::vec![(i, true)]);
        assert_eq!(s0[1].outputs, alloc::vec![(o, true)]);
        assert_eq!(s0[1].target, Target::Terminate);
        let s1 = &ctrl.states[1].transitions;
        assert_eq!(s1.len(), 1);
        assert!(s1[0].cube.is_empty());
        assert_eq!(s1[0].outputs, alloc::vec![(o, true)]);
        assert_eq!(s1[0].target, Target::Terminate);
    }

    #[test]
    fn full_observability_controller_computes_i_or_not_u() {
        let c = Context::new(&["u", "i"], &["o"], &[], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let ctrl = synthesize(&c, f);
        assert_eq!(ctrl.states.len(), 1);
        let o = c.var("o").unwrap();
        // Every transition terminates immediately and the emitted o
        // equals i | !u on each input minterm.
        for a in all_assignments(c.inputs()) {
            let row = ctrl.states[0].matching_row(&a).unwrap();
            assert_eq!(row.target, Target::Terminate);
            let want = a.get(c.var("i").unwrap()).unwrap() || !a.get(c.var("u").unwrap()).unwrap();
            assert_eq!(row.outputs, alloc::vec![(o, want)]);
        }
        // Merging compresses the four minterms into three cubes.
        assert_eq!(ctrl.states[0].transitions.len(), 3);
    }

    #[test]
    fn controllers_survive_independent_verification() {
        let texts = ["F o", "G(i -> o) | F(i & o)", "i U o", "X X o", "F(i <-> o)"];
        for text in texts {
            let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
            let f = c.parse(text).unwrap();
            let r = solve_otf(&c, f, &Limits::default()).unwrap();
            if !r.realizable {
                continue;
            }
            let ctrl = build_controller(&c, r.strategy.as_ref().unwrap());
            verify_controller(&c, &ctrl, f, &VerifyBudget::default())
                .unwrap_or_else(|e| panic!("{text}: {e}"));
        }
    }

    #[test]
    fn verification_rejects_premature_termination() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let mut ctrl = synthesize(&c, f);
        // Force the continuation row to terminate instead: the !i / !o
        // word does not yet satisfy the specification.
        ctrl.states[0].transitions[0].target = Target::Terminate;
        let err = verify_controller(&c, &ctrl, f, &VerifyBudget::default()).unwrap_err();
        assert!(err.contains("violates"));
    }

    #[test]
    fn verification_rejects_continuation_cycles() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let mut ctrl = synthesize(&c, f);
        ctrl.states[1].transitions[0].target = Target::State(0);
        let err = verify_controller(&c, &ctrl, f, &VerifyBudget::default()).unwrap_err();
        assert!(err.contains("cycle"));
    }

    #[test]
    fn verification_rejects_overlapping_cubes() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let mut ctrl = synthesize(&c, f);
        ctrl.states[0].transitions[0].cube.clear();
        let err = verify_controller(&c, &ctrl, f, &VerifyBudget::default()).unwrap_err();
        assert!(err.contains("match"));
    }

    #[test]
    fn moore_outputs_cannot_react_to_the_current_input() {
        // Under Moore semantics outputs are chosen before the input is
        // seen, so echoing i within the same step is unrealizable even
        // with full observability.
        let c = Context::new(&["i"], &["o"], &[], Semantics::Moore).unwrap();
        let f = c.parse("i <-> o").unwrap();
        let r = solve_otf(&c, f, &Limits::default()).unwrap();
        assert!(!r.realizable);
        let c2 = Context::new(&["i"], &["o"], &[], Semantics::Mealy).unwrap();
        let f2 = c2.parse("i <-> o").unwrap();
        let r2 = solve_otf(&c2, f2, &Limits::default()).unwrap();
        assert!(r2.realizable);
        let ctrl = build_controller(&c2, r2.strategy.as_ref().unwrap());
        verify_controller(&c2, &ctrl, f2, &VerifyBudget::default()).unwrap();
    }

    #[test]
    fn moore_controllers_pass_the_constancy_check() {
        let c = Context::new(&["i"], &["o"], &[], Semantics::Moore).unwrap();
        let f = c.parse("F o").unwrap();
        let r = solve_otf(&c, f, &Limits::default()).unwrap();
        assert!(r.realizable);
        let ctrl = build_controller(&c, r.strategy.as_ref().unwrap());
        assert_eq!(ctrl.semantics, Semantics::Moore);
        verify_controller(&c, &ctrl, f, &VerifyBudget::default()).unwrap();
    }

    #[test]
    fn text_export_is_stable_and_complete() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let ctrl = synthesize(&c, f);
        let text = export_controller(&c, &ctrl);
        let expected = "semantics: mealy\n\
                        ins: i\n\
                        outs: o\n\
                        init: S0\n\
                        S0: !i / !o -> S1\n\
                        S0: i / o -> TERMINATE\n\
                        S1: 1 / o -> TERMINATE\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn dot_export_names_every_state_and_the_terminator() {
        let c = Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap();
        let f = spec(&c);
        let ctrl = synthesize(&c, f);
        let dot = controller_dot(&c, &ctrl);
        assert!(dot.contains("S0 ->"));
        assert!(dot.contains("S1 ->"));
        assert!(dot.contains("TERM [shape=doublecircle"));
        assert!(dot.contains("init -> S0"));
    }
}
