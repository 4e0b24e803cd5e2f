//! Independent oracles and randomized cross-checking sweeps.
//!
//! Everything in this module judges the pipeline from the outside,
//! using only the word semantics of `models`: a brute-force bounded
//! realizability search, a belief-language decision by enumeration of
//! hidden completions, and a deterministic corpus of small synthesis
//! instances over which the automaton construction, the two solving
//! modes, and the extracted controllers are replayed against those
//! oracles. A sweep returns how much evidence it gathered, or a
//! description of the first mismatch, which makes a mismatch a test
//! failure with a reproducible seed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::context::{Context, Semantics};
use crate::controller::{build_controller, verify_controller, VerifyBudget};
use crate::error::{Error, Limit};
use crate::game::{solve_full, solve_otf};
use crate::logic::ast::{BinOp, FormulaId};
use crate::logic::trace::{all_assignments, all_traces, Assignment, Trace};
use crate::translate::{accepts, build_full, Limits};

/// Cap on the number of word evaluations an oracle may spend.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub max_checks: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_checks: 10_000_000 }
    }
}

/// Decides whether an observable word is in the belief language: true
/// iff every completion of the unobservable inputs satisfies the
/// formula. Enumerates all completions, so it is exponential and only
/// fit for cross-checking.
pub fn oracle_belief_language(ctx: &Context, f: FormulaId, obs: &Trace) -> Result<bool, Error> {
    let unobs = ctx.unobservables();
    if unobs.is_empty() {
        return ctx.models(obs, 0, f);
    }
    for hidden in all_traces(unobs, obs.len()) {
        if !ctx.models(&obs.fuse(&hidden)?, 0, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force bounded realizability: searches the full strategy tree
/// over observable assignments up to `horizon` letters, terminating a
/// branch as soon as the produced word satisfies the formula under
/// every hidden completion. Mealy outputs may react to the current
/// input; Moore outputs are committed first.
pub fn oracle_realizable(
    ctx: &Context,
    f: FormulaId,
    horizon: usize,
    budget: &OracleBudget,
) -> Result<bool, Error> {
    let mut checks = 0u64;
    let mut prefix = Vec::new();
    oracle_win(ctx, f, horizon, &mut prefix, &mut checks, budget)
}

fn oracle_win(
    ctx: &Context,
    f: FormulaId,
    horizon: usize,
    prefix: &mut Vec<Assignment>,
    checks: &mut u64,
    budget: &OracleBudget,
) -> Result<bool, Error> {
    if !prefix.is_empty() {
        let word = Trace::new(prefix.clone()).expect("prefix is nonempty and uniform");
        *checks += 1;
        if *checks > budget.max_checks {
            return Err(Error::ResourceLimit { limit: Limit::Enumeration });
        }
        if oracle_belief_language(ctx, f, &word)? {
            return Ok(true);
        }
    }
    if prefix.len() >= horizon {
        return Ok(false);
    }
    match ctx.semantics() {
        Semantics::Mealy => {
            // Every input must admit some output that wins.
            for input in all_assignments(ctx.inputs()) {
                let mut found = false;
                for output in all_assignments(ctx.outputs()) {
                    prefix.push(input.fuse(&output)?);
                    let won = oracle_win(ctx, f, horizon, prefix, checks, budget)?;
                    prefix.pop();
                    if won {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Semantics::Moore => {
            // Some committed output must win against every input.
            'outer: for output in all_assignments(ctx.outputs()) {
                for input in all_assignments(ctx.inputs()) {
                    prefix.push(input.fuse(&output)?);
                    let won = oracle_win(ctx, f, horizon, prefix, checks, budget)?;
                    prefix.pop();
                    if !won {
                        continue 'outer;
                    }
                }
                return Ok(true);
            }
            Ok(false)
        }
    }
}

/// What a sweep did: instances validated, instances skipped for
/// exceeding the construction budget, and individual comparisons made.
#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOutcome {
    pub instances: usize,
    pub skipped: usize,
    pub checks: u64,
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

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

const LAYOUTS: [(usize, usize, usize); 7] =
    [(1, 1, 0), (2, 1, 0), (1, 2, 0), (1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2)];

/// Produces the k-th corpus instance: a small alphabet (at most four
/// variables, at most two unobservable), alternating Mealy and Moore
/// semantics, and a random formula of depth at most four. The same k
/// always yields the same instance.
pub fn corpus_instance(k: u64) -> (Context, FormulaId) {
    let mut rng = Rng(0x7eed_c0de_u64 ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let (ni, no, nu) = LAYOUTS[(k % LAYOUTS.len() as u64) as usize];
    let semantics = if (k / LAYOUTS.len() as u64) % 2 == 0 {
        Semantics::Mealy
    } else {
        Semantics::Moore
    };
    let ins = ["ia", "ib"];
    let outs = ["oa", "ob"];
    let unobs = ["ua", "ub"];
    let ctx = Context::new(&ins[..ni], &outs[..no], &unobs[..nu], semantics)
        .expect("corpus names are valid");
    let f = gen_formula(&ctx, &mut rng, 4);
    (ctx, f)
}

fn gen_formula(ctx: &Context, rng: &mut Rng, depth: u32) -> FormulaId {
    let vars = ctx.all_vars();
    if depth == 0 || rng.below(5) == 0 {
        return match rng.below(8) {
            0 => ctx.tt(),
            1 => ctx.ff(),
            n => ctx.atom(vars[((n - 2) % vars.len() as u64) as usize]),
        };
    }
    match rng.below(12) {
        0 => ctx.not(gen_formula(ctx, rng, depth - 1)),
        1 => ctx.weak_next(gen_formula(ctx, rng, depth - 1)),
        2 => ctx.strong_next(gen_formula(ctx, rng, depth - 1)),
        3 => ctx.finally(gen_formula(ctx, rng, depth - 1)),
        4 => ctx.globally(gen_formula(ctx, rng, depth - 1)),
        5 => ctx.until(gen_formula(ctx, rng, depth - 1), gen_formula(ctx, rng, depth - 1)),
        6 => ctx.release(gen_formula(ctx, rng, depth - 1), gen_formula(ctx, rng, depth - 1)),
        n => {
            let op = [BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Equiv, BinOp::Xor]
                [(n - 7) as usize];
            ctx.bin(op, gen_formula(ctx, rng, depth - 1), gen_formula(ctx, rng, depth - 1))
        }
    }
}

/// Corpus construction budget; instances needing more belief states
/// than this are skipped rather than validated.
fn corpus_limits() -> Limits<'static> {
    Limits { max_states: 2000, ..Limits::default() }
}

fn context_line(ctx: &Context, k: u64, f: FormulaId) -> String {
    format!("instance {k} ({}): {}", ctx.semantics(), ctx.display(f))
}

/// Runs `body` over corpus instances starting at index `start` until
/// `count` instances were validated, skipping instances whose full
/// automaton exceeds the construction budget.
fn sweep<F>(count: usize, start: u64, mut body: F) -> Result<SweepOutcome, String>
where
    F: FnMut(&Context, FormulaId, &crate::translate::Mtdfa, &mut u64) -> Result<(), String>,
{
    let mut outcome = SweepOutcome::default();
    let mut k = start;
    while outcome.instances < count {
        if outcome.skipped > 10 * count + 100 {
            return Err(String::from("corpus skip rate is implausibly high"));
        }
        let (ctx, f) = corpus_instance(k);
        k += 1;
        let m = match build_full(&ctx, f, &corpus_limits()) {
            Ok(m) => m,
            Err(Error::ResourceLimit { .. }) => {
                outcome.skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("{}: {e}", context_line(&ctx, k - 1, f))),
        };
        body(&ctx, f, &m, &mut outcome.checks)
            .map_err(|e| format!("{}: {e}", context_line(&ctx, k - 1, f)))?;
        outcome.instances += 1;
    }
    Ok(outcome)
}

/// For every constructed belief state and every observable assignment,
/// the transition diagram must agree with observable progression on
/// both the destination (as a canonical formula) and the acceptance
/// flag.
pub fn sweep_transition_oracle(count: usize, start: u64) -> Result<SweepOutcome, String> {
    sweep(count, start, |ctx, _f, m, checks| {
        for &s in &m.states {
            let d = m.delta[&s];
            for w in all_assignments(ctx.observables()) {
                let t = ctx.evaluate(d, &w).map_err(|e| format!("{e}"))?;
                let p = ctx.fp_obs(s, &w);
                *checks += 1;
                if t.dest != p.remainder || t.accepting != p.flag {
                    return Err(format!(
                        "state {} under {:?}: diagram gives ({}, {}), progression gives ({}, {})",
                        ctx.display(s),
                        w,
                        ctx.display(t.dest),
                        t.accepting,
                        ctx.display(p.remainder),
                        p.flag
                    ));
                }
            }
        }
        Ok(())
    })
}

/// The automaton's accepted language must match the belief-language
/// oracle on every observable word up to length three.
pub fn sweep_language_equivalence(count: usize, start: u64) -> Result<SweepOutcome, String> {
    sweep(count, start, |ctx, f, m, checks| {
        for len in 1..=3 {
            for word in all_traces(ctx.observables(), len) {
                let got = accepts(ctx, m, &word).map_err(|e| format!("{e}"))?;
                let want = oracle_belief_language(ctx, f, &word).map_err(|e| format!("{e}"))?;
                *checks += 1;
                if got != want {
                    return Err(format!(
                        "word of length {len}: automaton says {got}, oracle says {want}"
                    ));
                }
            }
        }
        Ok(())
    })
}

/// Both solving modes must return the same verdict, and the lazy mode
/// must never compute more transition functions than the full automaton
/// has states.
pub fn sweep_mode_agreement(count: usize, start: u64) -> Result<SweepOutcome, String> {
    sweep(count, start, |ctx, f, m, checks| {
        let full = solve_full(ctx, m);
        let otf = solve_otf(ctx, f, &corpus_limits()).map_err(|e| format!("{e}"))?;
        *checks += 1;
        if full.realizable != otf.realizable {
            return Err(format!(
                "full mode says {}, lazy mode says {}",
                full.realizable, otf.realizable
            ));
        }
        if otf.stats.delta_count > m.states.len() {
            return Err(format!(
                "lazy mode computed {} transition functions for a {}-state automaton",
                otf.stats.delta_count,
                m.states.len()
            ));
        }
        Ok(())
    })
}

/// Every realizable instance must yield a controller that passes
/// independent verification.
pub fn sweep_controller_soundness(count: usize, start: u64) -> Result<SweepOutcome, String> {
    let budget = VerifyBudget { max_plays: 1 << 20, max_completions: 1 << 16, ..VerifyBudget::default() };
    sweep(count, start, |ctx, f, _m, checks| {
        let r = solve_otf(ctx, f, &corpus_limits()).map_err(|e| format!("{e}"))?;
        if let Some(strat) = &r.strategy {
            let ctrl = build_controller(ctx, strat);
            *checks += 1;
            verify_controller(ctx, &ctrl, f, &budget)?;
        }
        Ok(())
    })
}

/// With no unobservable variables the accepted language must coincide
/// with direct evaluation of the formula, word for word up to length
/// four.
pub fn sweep_full_observability(count: usize, start: u64) -> Result<SweepOutcome, String> {
    let mut outcome = SweepOutcome::default();
    let mut k = start;
    while outcome.instances < count {
        if outcome.skipped > 10 * count + 100 {
            return Err(String::from("corpus skip rate is implausibly high"));
        }
        let (ctx, f) = corpus_instance(k);
        k += 1;
        if !ctx.unobservables().is_empty() {
            continue;
        }
        let m = match build_full(&ctx, f, &corpus_limits()) {
            Ok(m) => m,
            Err(Error::ResourceLimit { .. }) => {
                outcome.skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("{}: {e}", context_line(&ctx, k - 1, f))),
        };
        let max_len = if ctx.observables().len() >= 4 { 3 } else { 4 };
        for len in 1..=max_len {
            for word in all_traces(ctx.observables(), len) {
                let got = accepts(&ctx, &m, &word)
                    .map_err(|e| format!("{}: {e}", context_line(&ctx, k - 1, f)))?;
                let want = ctx
                    .models(&word, 0, f)
                    .map_err(|e| format!("{}: {e}", context_line(&ctx, k - 1, f)))?;
                outcome.checks += 1;
                if got != want {
                    return Err(format!(
                        "{}: word of length {len}: automaton says {got}, models says {want}",
                        context_line(&ctx, k - 1, f)
                    ));
                }
            }
        }
        outcome.instances += 1;
    }
    Ok(outcome)
}

/// Enumerates every formula over two atoms up to the given nesting
/// depth, in a deterministic order. Depth 0 is atoms and constants.
pub fn enumerate_formulas(ctx: &Context, depth: u32) -> Vec<FormulaId> {
    let vars = ctx.all_vars();
    let mut layers: Vec<Vec<FormulaId>> = Vec::new();
    let mut base: Vec<FormulaId> = alloc::vec![ctx.tt(), ctx.ff()];
    base.extend(vars.iter().map(|&v| ctx.atom(v)));
    layers.push(base);
    for _ in 1..=depth {
        let prev: Vec<FormulaId> = layers.iter().flatten().copied().collect();
        let mut layer = Vec::new();
        for &a in &prev {
            layer.push(ctx.not(a));
            layer.push(ctx.weak_next(a));
            layer.push(ctx.strong_next(a));
            layer.push(ctx.finally(a));
            layer.push(ctx.globally(a));
        }
        for &a in &prev {
            for &b in &prev {
                for op in [BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Equiv, BinOp::Xor] {
                    layer.push(ctx.bin(op, a, b));
                }
                layer.push(ctx.until(a, b));
                layer.push(ctx.release(a, b));
            }
        }
        layers.push(layer);
    }
    // Interning makes rebuilt shapes from earlier layers reappear under
    // the same id; keep the first occurrence only.
    let mut seen = hashbrown::HashSet::new();
    layers
        .into_iter()
        .flatten()
        .filter(|&f| seen.insert(f))
        .collect()
}

/// Progression soundness: on a one-letter word the flag must equal
/// direct evaluation, and on longer words evaluating the remainder on
/// the suffix must equal evaluating the formula on the whole word.
/// Exhaustive over all formulas up to `exhaustive_depth` and all traces
/// up to length three, plus `sampled` random formulas of depth three.
pub fn sweep_progression(
    exhaustive_depth: u32,
    sampled: usize,
    seed: u64,
) -> Result<SweepOutcome, String> {
    let ctx = Context::new(&["p"], &["q"], &[], Semantics::Mealy).expect("fixed names are valid");
    let mut formulas = enumerate_formulas(&ctx, exhaustive_depth);
    let mut rng = Rng(seed);
    for _ in 0..sampled {
        formulas.push(gen_formula(&ctx, &mut rng, 3));
    }
    let vars = ctx.all_vars();
    let traces: Vec<Trace> = (1..=3).flat_map(|len| all_traces(&vars, len)).collect();
    let mut outcome = SweepOutcome { instances: formulas.len(), ..SweepOutcome::default() };
    for f in formulas {
        for t in &traces {
            outcome.checks += 1;
            let p = ctx.fp(f, t.letter(0));
            if t.len() == 1 {
                let direct = ctx.models(t, 0, f).map_err(|e| format!("{e}"))?;
                if p.flag != direct {
                    return Err(format!(
                        "{}: flag {} but the one-letter word evaluates to {direct}",
                        ctx.display(f),
                        p.flag
                    ));
                }
            } else {
                let suffix = Trace::new(t.letters()[1..].to_vec()).expect("suffix is nonempty");
                let via_remainder =
                    ctx.models(&suffix, 0, p.remainder).map_err(|e| format!("{e}"))?;
                let direct = ctx.models(t, 0, f).map_err(|e| format!("{e}"))?;
                if via_remainder != direct {
                    return Err(format!(
                        "{}: remainder {} evaluates to {via_remainder} on the suffix but the word evaluates to {direct}",
                        ctx.display(f),
                        ctx.display(p.remainder)
                    ));
                }
            }
        }
    }
    Ok(outcome)
}
