use alloc::string::ToString;

use crate::context::Context;
use crate::error::Error;
use crate::logic::ast::{FormulaId, FormulaNode};
use crate::logic::trace::Trace;

impl Context {
    /// Finite-word satisfaction: does `trace` at position `i` satisfy
    /// `f`? This is the direct recursive semantics and serves as the
    /// ground truth every other evaluation path is tested against.
    ///
    /// The weak next holds vacuously on the last letter; the strong next
    /// fails there. `F`, `G`, `U` and `R` quantify over the remaining
    /// positions.
    pub fn models(&self, trace: &Trace, i: usize, f: FormulaId) -> Result<bool, Error> {
        let n = trace.len();
        if i >= n {
            return Err(Error::PositionOutOfRange { position: i, len: n });
        }
        self.models_at(trace, i, f)
    }

    fn models_at(&self, trace: &Trace, i: usize, f: FormulaId) -> Result<bool, Error> {
        let n = trace.len();
        Ok(match self.node(f) {
            FormulaNode::True => true,
            FormulaNode::False => false,
            FormulaNode::Atom(v) => {
                trace.letter(i).get(v).ok_or_else(|| Error::UnassignedVariable {
                    name: self.var_name(v).to_string(),
                })?
            }
            FormulaNode::Not(a) => !self.models_at(trace, i, a)?,
            FormulaNode::Bin(op, a, b) => {
                op.eval(self.models_at(trace, i, a)?, self.models_at(trace, i, b)?)
            }
            FormulaNode::WeakNext(a) => i + 1 >= n || self.models_at(trace, i + 1, a)?,
            FormulaNode::StrongNext(a) => i + 1 < n && self.models_at(trace, i + 1, a)?,
            FormulaNode::Finally(a) => {
                let mut holds = false;
                for j in i..n {
                    if self.models_at(trace, j, a)? {
                        holds = true;
                        break;
                    }
                }
                holds
            }
            FormulaNode::Globally(a) => {
                let mut holds = true;
                for j in i..n {
                    if !self.models_at(trace, j, a)? {
                        holds = false;
                        break;
                    }
                }
                holds
            }
            FormulaNode::Until(a, b) => {
                let mut holds = false;
                for j in i..n {
                    if self.models_at(trace, j, b)? {
                        let mut prefix = true;
                        for k in i..j {
                            if !self.models_at(trace, k, a)? {
                                prefix = false;
                                break;
                            }
                        }
                        if prefix {
                            holds = true;
                            break;
                        }
                    }
                }
                holds
            }
            FormulaNode::Release(a, b) => {
                let mut holds = true;
                for j in i..n {
                    if !self.models_at(trace, j, b)? {
                        let mut released = false;
                        for k in i..j {
                            if self.models_at(trace, k, a)? {
                                released = true;
                                break;
                            }
                        }
                        if !released {
                            holds = false;
                            break;
                        }
                    }
                }
                holds
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Semantics;
    use crate::logic::trace::{all_assignments, all_traces, Assignment, Trace};

    fn ctx() -> Context {
        Context::new(&["p", "q"], &[], &[], Semantics::Mealy).unwrap()
    }

    fn word(c: &Context, rows: &[(bool, bool)]) -> Trace {
        let letters = rows
            .iter()
            .map(|&(p, q)| Assignment::from_names(c, &[("p", p), ("q", q)]).unwrap())
            .collect();
        Trace::new(letters).unwrap()
    }

    #[test]
    fn weak_next_is_vacuous_on_the_last_letter() {
        let c = ctx();
        let t = word(&c, &[(false, false)]);
        assert!(c.models(&t, 0, c.parse("X p").unwrap()).unwrap());
        assert!(c.models(&t, 0, c.parse("X ff").unwrap()).unwrap());
        assert!(!c.models(&t, 0, c.parse("X[!] p").unwrap()).unwrap());
        assert!(!c.models(&t, 0, c.parse("X[!] tt").unwrap()).unwrap());
    }

    #[test]
    fn next_operators_agree_before_the_last_letter() {
        let c = ctx();
        let t = word(&c, &[(false, false), (true, false)]);
        assert!(c.models(&t, 0, c.parse("X p").unwrap()).unwrap());
        assert!(c.models(&t, 0, c.parse("X[!] p").unwrap()).unwrap());
        assert!(!c.models(&t, 0, c.parse("X q").unwrap()).unwrap());
    }

    #[test]
    fn eventually_scans_the_suffix() {
        let c = ctx();
        let t = word(&c, &[(false, false), (false, true), (true, false)]);
        let f = c.parse("F p").unwrap();
        assert!(c.models(&t, 0, f).unwrap());
        assert!(c.models(&t, 2, f).unwrap());
        assert!(!c.models(&t, 0, c.parse("G q").unwrap()).unwrap());
        assert!(c.models(&t, 1, c.parse("q U p").unwrap()).unwrap());
        assert!(!c.models(&t, 0, c.parse("q U p").unwrap()).unwrap());
    }

    #[test]
    fn positions_outside_the_trace_error() {
        let c = ctx();
        let t = word(&c, &[(true, true)]);
        assert_eq!(
            c.models(&t, 1, c.tt()).unwrap_err(),
            Error::PositionOutOfRange { position: 1, len: 1 }
        );
    }

    #[test]
    fn until_and_release_satisfy_their_expansions() {
        let c = ctx();
        let p = c.parse("p").unwrap();
        let q = c.parse("q").unwrap();
        let until = c.until(p, q);
        let until_expanded = c.or(q, c.and(p, c.strong_next(until)));
        let release = c.release(p, q);
        let release_expanded = c.and(q, c.or(p, c.weak_next(release)));
        let vars = [c.var("p").unwrap(), c.var("q").unwrap()];
        for len in 1..=3 {
            for t in all_traces(&vars, len) {
                for i in 0..len {
                    assert_eq!(
                        c.models(&t, i, until).unwrap(),
                        c.models(&t, i, until_expanded).unwrap()
                    );
                    assert_eq!(
                        c.models(&t, i, release).unwrap(),
                        c.models(&t, i, release_expanded).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn release_is_the_dual_of_until() {
        let c = ctx();
        let release = c.parse("p R q").unwrap();
        let dual = c.parse("!(!p U !q)").unwrap();
        let vars = [c.var("p").unwrap(), c.var("q").unwrap()];
        for len in 1..=3 {
            for t in all_traces(&vars, len) {
                assert_eq!(c.models(&t, 0, release).unwrap(), c.models(&t, 0, dual).unwrap());
            }
        }
    }

    #[test]
    fn propositionally_equivalent_formulas_have_equal_models() {
        let c = ctx();
        let pairs = [
            ("F p | !F p", "tt"),
            ("(p U q) & (p U q)", "p U q"),
            ("!(p & X q)", "!p | !(X q)"),
            ("G p & tt", "G p"),
        ];
        let vars = [c.var("p").unwrap(), c.var("q").unwrap()];
        for (a_text, b_text) in pairs {
            let a = c.parse(a_text).unwrap();
            let b = c.parse(b_text).unwrap();
            assert!(c.prop_equiv(a, b));
            for t in all_traces(&vars, 2) {
                assert_eq!(c.models(&t, 0, a).unwrap(), c.models(&t, 0, b).unwrap());
            }
        }
        let _ = all_assignments(&vars).count();
    }
}
