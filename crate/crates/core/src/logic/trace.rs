use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::context::{Context, VarId};
use crate::error::Error;

/// A truth assignment to a finite set of variables, kept sorted by
/// variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    entries: Vec<(VarId, bool)>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment { entries: Vec::new() }
    }

    /// Builds an assignment from (variable, value) pairs. Duplicate
    /// variables are rejected.
    pub fn new(mut pairs: Vec<(VarId, bool)>) -> Result<Self, Error> {
        pairs.sort_by_key(|&(v, _)| v);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::OverlappingAssignment { name: w[0].0 .0.to_string() });
            }
        }
        Ok(Assignment { entries: pairs })
    }

    /// Convenience constructor from variable names.
    pub fn from_names(ctx: &Context, pairs: &[(&str, bool)]) -> Result<Self, Error> {
        let mut entries = Vec::with_capacity(pairs.len());
        for &(name, value) in pairs {
            let v = ctx.var(name).ok_or_else(|| Error::UnknownVariable {
                name: name.to_string(),
            })?;
            entries.push((v, value));
        }
        Assignment::new(entries)
    }

    /// Assigns `vars` from the low bits of `bits`: the first variable in
    /// the slice takes the most significant of the used bits, so counting
    /// `bits` upward enumerates assignments lexicographically.
    pub fn from_bits(vars: &[VarId], bits: u64) -> Self {
        let n = vars.len();
        let entries = vars
            .iter()
            .enumerate()
            .map(|(j, &v)| (v, bits >> (n - 1 - j) & 1 == 1))
            .collect();
        Assignment::new(entries).expect("variable slices must not repeat")
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.entries
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|k| self.entries[k].1)
    }

    /// The variables this assignment binds, in variable order.
    pub fn domain(&self) -> impl Iterator<Item = VarId> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges two assignments with disjoint domains.
    pub fn fuse(&self, other: &Assignment) -> Result<Assignment, Error> {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().copied());
        Assignment::new(entries)
    }

    /// The sub-assignment over `vars` (missing variables are dropped).
    pub fn restrict(&self, vars: &[VarId]) -> Assignment {
        let entries = self
            .entries
            .iter()
            .filter(|(v, _)| vars.contains(v))
            .copied()
            .collect();
        Assignment { entries }
    }

    fn domain_names(&self, ctx: &Context) -> String {
        let names: Vec<&str> = self.entries.iter().map(|&(v, _)| ctx.var_name(v)).collect();
        names.join(",")
    }

    /// Checks that the domain is exactly `vars`.
    pub(crate) fn check_domain(&self, ctx: &Context, vars: &[VarId]) -> Result<(), Error> {
        if self.entries.len() == vars.len()
            && self.entries.iter().zip(vars).all(|(&(v, _), &w)| v == w)
        {
            return Ok(());
        }
        let names: Vec<&str> = vars.iter().map(|&v| ctx.var_name(v)).collect();
        Err(Error::DomainMismatch {
            expected: names.join(","),
            found: self.domain_names(ctx),
        })
    }
}

/// A nonempty finite word: a sequence of assignments over one shared
/// variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    letters: Vec<Assignment>,
}

impl Trace {
    pub fn new(letters: Vec<Assignment>) -> Result<Self, Error> {
        if letters.is_empty() {
            return Err(Error::EmptyTrace);
        }
        for w in letters.windows(2) {
            if !w[0].domain().eq(w[1].domain()) {
                return Err(Error::MixedTraceDomains);
            }
        }
        Ok(Trace { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, i: usize) -> &Assignment {
        &self.letters[i]
    }

    pub fn letters(&self) -> &[Assignment] {
        &self.letters
    }

    /// Pointwise fusion of two traces of equal length with disjoint
    /// letter domains.
    pub fn fuse(&self, other: &Trace) -> Result<Trace, Error> {
        if self.len() != other.len() {
            return Err(Error::MixedTraceDomains);
        }
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(a, b)| a.fuse(b))
            .collect::<Result<_, _>>()?;
        Trace::new(letters)
    }

    /// Pointwise restriction to `vars`.
    pub fn restrict(&self, vars: &[VarId]) -> Trace {
        Trace {
            letters: self.letters.iter().map(|a| a.restrict(vars)).collect(),
        }
    }
}

/// All assignments over `vars`, lexicographic in variable order with
/// false before true.
pub fn all_assignments(vars: &[VarId]) -> impl Iterator<Item = Assignment> + '_ {
    let n = vars.len();
    assert!(n < 63, "assignment enumeration over too many variables");
    (0..1u64 << n).map(move |bits| Assignment::from_bits(vars, bits))
}

/// All traces of exactly `len` letters over `vars`, lexicographic.
pub fn all_traces(vars: &[VarId], len: usize) -> Vec<Trace> {
    assert!(len >= 1);
    let letters: Vec<Assignment> = all_assignments(vars).collect();
    let mut words: Vec<Vec<Assignment>> = alloc::vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(words.len() * letters.len());
        for w in &words {
            for l in &letters {
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.push(w2);
            }
        }
        words = next;
    }
    words
        .into_iter()
        .map(|letters| Trace::new(letters).expect("letters share a domain"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Semantics;

    fn ctx() -> Context {
        Context::new(&["i"], &["o"], &["u"], Semantics::Mealy).unwrap()
    }

    #[test]
    fn duplicate_bindings_are_rejected() {
        let c = ctx();
        let i = c.var("i").unwrap();
        assert!(Assignment::new(alloc::vec![(i, true), (i, false)]).is_err());
    }

    #[test]
    fn fusion_requires_disjoint_domains() {
        let c = ctx();
        let a = Assignment::from_names(&c, &[("i", true)]).unwrap();
        let b = Assignment::from_names(&c, &[("i", false), ("o", true)]).unwrap();
        assert!(a.fuse(&b).is_err());
        let b = Assignment::from_names(&c, &[("o", true)]).unwrap();
        let ab = a.fuse(&b).unwrap();
        assert_eq!(ab.get(c.var("i").unwrap()), Some(true));
        assert_eq!(ab.get(c.var("o").unwrap()), Some(true));
    }

    #[test]
    fn traces_must_be_nonempty_and_uniform() {
        let c = ctx();
        assert_eq!(Trace::new(Vec::new()).unwrap_err(), Error::EmptyTrace);
        let a = Assignment::from_names(&c, &[("i", true)]).unwrap();
        let b = Assignment::from_names(&c, &[("o", true)]).unwrap();
        assert_eq!(
            Trace::new(alloc::vec![a.clone(), b]).unwrap_err(),
            Error::MixedTraceDomains
        );
        assert_eq!(Trace::new(alloc::vec![a.clone(), a]).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let c = ctx();
        let vars = [c.var("i").unwrap(), c.var("o").unwrap()];
        let all: Vec<Assignment> = all_assignments(&vars).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].get(vars[0]), Some(false));
        assert_eq!(all[0].get(vars[1]), Some(false));
        assert_eq!(all[1].get(vars[0]), Some(false));
        assert_eq!(all[1].get(vars[1]), Some(true));
        assert_eq!(all[3].get(vars[0]), Some(true));
        assert_eq!(all[2].get(vars[0]), Some(true));
        assert_eq!(all_traces(&vars, 2).len(), 16);
    }

    #[test]
    fn restriction_projects_letters() {
        let c = ctx();
        let full = Assignment::from_names(&c, &[("i", true), ("o", false), ("u", true)]).unwrap();
        let t = Trace::new(alloc::vec![full]).unwrap();
        let obs = t.restrict(c.observables());
        assert_eq!(obs.letter(0).len(), 2);
        assert_eq!(obs.letter(0).get(c.var("u").unwrap()), None);
    }
}
