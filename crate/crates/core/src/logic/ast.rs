use alloc::vec::Vec;
use core::fmt;
use hashbrown::{HashMap, HashSet};

use crate::context::{Context, VarId};

/// Handle to an interned formula. Two handles are equal exactly when the
/// formulas are structurally equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(pub(crate) u32);

/// Binary propositional connectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Equiv,
    Xor,
}

impl BinOp {
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BinOp::And => a && b,
            BinOp::Or => a || b,
            BinOp::Implies => !a || b,
            BinOp::Equiv => a == b,
            BinOp::Xor => a != b,
        }
    }
}

/// One interned formula node. Children are handles into the same arena.
///
/// `WeakNext` is vacuously true on the last letter of a word, `StrongNext`
/// is false there; the remaining temporal operators have their usual
/// finite-word readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaNode {
    True,
    False,
    Atom(VarId),
    Not(FormulaId),
    Bin(BinOp, FormulaId, FormulaId),
    WeakNext(FormulaId),
    StrongNext(FormulaId),
    Finally(FormulaId),
    Globally(FormulaId),
    Until(FormulaId, FormulaId),
    Release(FormulaId, FormulaId),
}

pub(crate) struct FormulaArena {
    nodes: Vec<FormulaNode>,
    table: HashMap<FormulaNode, FormulaId>,
}

impl FormulaArena {
    pub(crate) fn new() -> Self {
        let mut arena = FormulaArena { nodes: Vec::new(), table: HashMap::new() };
        arena.intern(FormulaNode::True);
        arena.intern(FormulaNode::False);
        arena
    }

    fn intern(&mut self, node: FormulaNode) -> FormulaId {
        if let Some(&id) = self.table.get(&node) {
            return id;
        }
        let id = FormulaId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.table.insert(node, id);
        id
    }

    pub(crate) fn node(&self, f: FormulaId) -> FormulaNode {
        self.nodes[f.0 as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }
}

impl Context {
    fn intern(&self, node: FormulaNode) -> FormulaId {
        self.formulas.borrow_mut().intern(node)
    }

    pub fn tt(&self) -> FormulaId {
        FormulaId(0)
    }

    pub fn ff(&self) -> FormulaId {
        FormulaId(1)
    }

    pub fn atom(&self, v: VarId) -> FormulaId {
        assert!(v.index() < self.var_count(), "atom over undeclared variable");
        self.intern(FormulaNode::Atom(v))
    }

    pub fn not(&self, f: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Not(f))
    }

    pub fn bin(&self, op: BinOp, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Bin(op, a, b))
    }

    pub fn and(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.bin(BinOp::And, a, b)
    }

    pub fn or(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.bin(BinOp::Or, a, b)
    }

    pub fn implies(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.bin(BinOp::Implies, a, b)
    }

    pub fn equiv(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.bin(BinOp::Equiv, a, b)
    }

    pub fn xor(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.bin(BinOp::Xor, a, b)
    }

    pub fn weak_next(&self, f: FormulaId) -> FormulaId {
        self.intern(FormulaNode::WeakNext(f))
    }

    pub fn strong_next(&self, f: FormulaId) -> FormulaId {
        self.intern(FormulaNode::StrongNext(f))
    }

    pub fn finally(&self, f: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Finally(f))
    }

    pub fn globally(&self, f: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Globally(f))
    }

    pub fn until(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Until(a, b))
    }

    pub fn release(&self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.intern(FormulaNode::Release(a, b))
    }

    /// Copies out the top node of `f`.
    pub fn node(&self, f: FormulaId) -> FormulaNode {
        self.formulas.borrow().node(f)
    }

    /// Number of distinct formulas interned so far.
    pub fn formula_count(&self) -> usize {
        self.formulas.borrow().len()
    }

    /// All subformulas of `f` including `f` itself, in first-visit order
    /// of a preorder walk.
    pub fn subformulas(&self, f: FormulaId) -> Vec<FormulaId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = alloc::vec![f];
        while let Some(g) = stack.pop() {
            if !seen.insert(g) {
                continue;
            }
            out.push(g);
            match self.node(g) {
                FormulaNode::True | FormulaNode::False | FormulaNode::Atom(_) => {}
                FormulaNode::Not(a)
                | FormulaNode::WeakNext(a)
                | FormulaNode::StrongNext(a)
                | FormulaNode::Finally(a)
                | FormulaNode::Globally(a) => stack.push(a),
                FormulaNode::Bin(_, a, b)
                | FormulaNode::Until(a, b)
                | FormulaNode::Release(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// The atoms occurring in `f`, in variable order.
    pub fn atoms_of(&self, f: FormulaId) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .subformulas(f)
            .into_iter()
            .filter_map(|g| match self.node(g) {
                FormulaNode::Atom(v) => Some(v),
                _ => None,
            })
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Render `f` with the context's variable names. The output parses
    /// back to the same handle.
    pub fn display(&self, f: FormulaId) -> FormulaText<'_> {
        FormulaText { ctx: self, f }
    }
}

/// Precedence levels for the printer; higher binds tighter.
fn prec(node: &FormulaNode) -> u8 {
    match node {
        FormulaNode::True | FormulaNode::False | FormulaNode::Atom(_) => 100,
        FormulaNode::Not(_)
        | FormulaNode::WeakNext(_)
        | FormulaNode::StrongNext(_)
        | FormulaNode::Finally(_)
        | FormulaNode::Globally(_) => 90,
        FormulaNode::Bin(BinOp::And, ..) => 80,
        FormulaNode::Bin(BinOp::Or, ..) => 70,
        FormulaNode::Bin(..) => 60,
        FormulaNode::Until(..) | FormulaNode::Release(..) => 50,
    }
}

/// `Display` adapter returned by [`Context::display`].
pub struct FormulaText<'a> {
    ctx: &'a Context,
    f: FormulaId,
}

impl fmt::Display for FormulaText<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.ctx, self.f, 0, out)
    }
}

fn write_formula(
    ctx: &Context,
    f: FormulaId,
    min_prec: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let node = ctx.node(f);
    let p = prec(&node);
    let parens = p < min_prec;
    if parens {
        write!(out, "(")?;
    }
    match node {
        FormulaNode::True => write!(out, "tt")?,
        FormulaNode::False => write!(out, "ff")?,
        FormulaNode::Atom(v) => write!(out, "{}", ctx.var_name(v))?,
        FormulaNode::Not(a) => {
            write!(out, "!")?;
            write_formula(ctx, a, p, out)?;
        }
        FormulaNode::WeakNext(a) => {
            write!(out, "X ")?;
            write_formula(ctx, a, p, out)?;
        }
        FormulaNode::StrongNext(a) => {
            write!(out, "X[!] ")?;
            write_formula(ctx, a, p, out)?;
        }
        FormulaNode::Finally(a) => {
            write!(out, "F ")?;
            write_formula(ctx, a, p, out)?;
        }
        FormulaNode::Globally(a) => {
            write!(out, "G ")?;
            write_formula(ctx, a, p, out)?;
        }
        FormulaNode::Bin(op, a, b) => {
            let tok = match op {
                BinOp::And => "&",
                BinOp::Or => "|",
                BinOp::Implies => "->",
                BinOp::Equiv => "<->",
                BinOp::Xor => "xor",
            };
            // Binary connectives associate to the right, so the right
            // child may share this level while the left may not.
            write_formula(ctx, a, p + 1, out)?;
            write!(out, " {tok} ")?;
            write_formula(ctx, b, p, out)?;
        }
        FormulaNode::Until(a, b) => {
            write_formula(ctx, a, p + 1, out)?;
            write!(out, " U ")?;
            write_formula(ctx, b, p, out)?;
        }
        FormulaNode::Release(a, b) => {
            write_formula(ctx, a, p + 1, out)?;
            write!(out, " R ")?;
            write_formula(ctx, b, p, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}
