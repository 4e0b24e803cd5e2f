//! Formula progression: what remains to be satisfied after reading a
//! letter, plus whether the word could stop right here.
//!
//! Progression returns a pair `(remainder, flag)`. The remainder is the
//! canonical representative of the obligation on the rest of the word;
//! the flag says whether the word read so far already satisfies the
//! formula if it ends now. Boolean connectives act on pairs
//! componentwise, canonicalizing the formula half.
//!
//! The observable variant progresses under every completion of a
//! partially observed letter and conjoins the results: its remainder is
//! satisfied by exactly the suffix behaviors that work for all hidden
//! histories, which is what makes belief states sound.

use crate::context::Context;
use crate::logic::ast::{BinOp, FormulaId, FormulaNode};
use crate::logic::trace::{Assignment, Trace};

/// Result of progressing a formula through one letter or a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgResult {
    /// Canonical obligation on the remaining suffix.
    pub remainder: FormulaId,
    /// Whether the consumed prefix alone satisfies the formula.
    pub flag: bool,
}

impl Context {
    fn lift_not(&self, a: ProgResult) -> ProgResult {
        ProgResult {
            remainder: self.canonical(self.not(a.remainder)),
            flag: !a.flag,
        }
    }

    fn lift_bin(&self, op: BinOp, a: ProgResult, b: ProgResult) -> ProgResult {
        ProgResult {
            remainder: self.canonical(self.bin(op, a.remainder, b.remainder)),
            flag: op.eval(a.flag, b.flag),
        }
    }

    /// Progresses `f` through the single letter `w`, which must assign
    /// every declared variable.
    pub fn fp(&self, f: FormulaId, w: &Assignment) -> ProgResult {
        debug_assert!(
            w.check_domain(self, &self.all_vars()).is_ok(),
            "progression letters must assign every declared variable"
        );
        self.fp_inner(f, w)
    }

    fn fp_inner(&self, f: FormulaId, w: &Assignment) -> ProgResult {
        let tt = |flag| ProgResult { remainder: self.tt(), flag };
        match self.node(f) {
            FormulaNode::True => tt(true),
            FormulaNode::False => ProgResult { remainder: self.ff(), flag: false },
            FormulaNode::Atom(v) => {
                if w.get(v).expect("domain checked above") {
                    tt(true)
                } else {
                    ProgResult { remainder: self.ff(), flag: false }
                }
            }
            FormulaNode::Not(a) => self.lift_not(self.fp_inner(a, w)),
            FormulaNode::Bin(op, a, b) => {
                self.lift_bin(op, self.fp_inner(a, w), self.fp_inner(b, w))
            }
            FormulaNode::WeakNext(a) => ProgResult { remainder: self.canonical(a), flag: true },
            FormulaNode::StrongNext(a) => {
                ProgResult { remainder: self.canonical(a), flag: false }
            }
            FormulaNode::Finally(a) => {
                let again = ProgResult { remainder: self.canonical(f), flag: false };
                self.lift_bin(BinOp::Or, self.fp_inner(a, w), again)
            }
            FormulaNode::Globally(a) => {
                let again = ProgResult { remainder: self.canonical(f), flag: true };
                self.lift_bin(BinOp::And, self.fp_inner(a, w), again)
            }
            FormulaNode::Until(a, b) => {
                let again = ProgResult { remainder: self.canonical(f), flag: false };
                let keep = self.lift_bin(BinOp::And, self.fp_inner(a, w), again);
                self.lift_bin(BinOp::Or, self.fp_inner(b, w), keep)
            }
            FormulaNode::Release(a, b) => {
                let again = ProgResult { remainder: self.canonical(f), flag: true };
                let release = self.lift_bin(BinOp::Or, self.fp_inner(a, w), again);
                self.lift_bin(BinOp::And, self.fp_inner(b, w), release)
            }
        }
    }

    /// Progresses `f` through a whole word, letter by letter.
    pub fn fp_word(&self, f: FormulaId, word: &Trace) -> ProgResult {
        let mut cur = ProgResult { remainder: self.canonical(f), flag: false };
        for w in word.letters() {
            cur = self.fp(cur.remainder, w);
        }
        cur
    }

    /// Progresses `f` through a partially observed letter: `w_obs` must
    /// assign exactly the observable variables, and the result conjoins
    /// the progressions under every assignment of the hidden ones.
    pub fn fp_obs(&self, f: FormulaId, w_obs: &Assignment) -> ProgResult {
        debug_assert!(
            w_obs.check_domain(self, self.observables()).is_ok(),
            "observable progression letters must assign exactly the observables"
        );
        let hidden = self.unobservables();
        let mut acc: Option<ProgResult> = None;
        for bits in 0..1u64 << hidden.len() {
            let completion = Assignment::from_bits(hidden, bits);
            let w = w_obs.fuse(&completion).expect("blocks are disjoint");
            let r = self.fp_inner(f, &w);
            acc = Some(match acc {
                None => r,
                Some(prev) => self.lift_bin(BinOp::And, prev, r),
            });
        }
        acc.expect("at least the empty completion exists")
    }

    /// Progresses `f` through a word of partially observed letters.
    pub fn fp_obs_word(&self, f: FormulaId, word: &Trace) -> ProgResult {
        let mut cur = ProgResult { remainder: self.canonical(f), flag: false };
        for w in word.letters() {
            cur = self.fp_obs(cur.remainder, w);
        }
        cur
    }
}
