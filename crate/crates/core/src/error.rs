use alloc::string::String;
use core::fmt;

/// Which resource budget a run exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    States,
    Nodes,
    Time,
    Enumeration,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::States => write!(f, "state budget"),
            Limit::Nodes => write!(f, "node budget"),
            Limit::Time => write!(f, "time budget"),
            Limit::Enumeration => write!(f, "enumeration budget"),
        }
    }
}

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A variable name appears twice in the declared alphabet.
    DuplicateVariable { name: String },
    /// A declared variable name collides with a formula keyword.
    ReservedName { name: String },
    /// A name was used that no declared set contains.
    UnknownVariable { name: String },
    /// The formula text is malformed; `offset` is a byte offset into it.
    Syntax { offset: usize, message: String },
    /// The formula mentions an atom outside the declared alphabet.
    UndeclaredAtom { offset: usize, name: String },
    /// A trace position outside `0..len` was queried.
    PositionOutOfRange { position: usize, len: usize },
    /// An assignment was queried for a variable it does not bind.
    UnassignedVariable { name: String },
    /// Two assignments that must bind disjoint variables overlap.
    OverlappingAssignment { name: String },
    /// The letters of a trace do not all bind the same variables.
    MixedTraceDomains,
    /// Traces must contain at least one letter.
    EmptyTrace,
    /// An assignment does not bind exactly the expected variable set.
    DomainMismatch { expected: String, found: String },
    /// A run exceeded one of its configured budgets.
    ResourceLimit { limit: Limit },
    /// A transition function was queried for a state it was never built for.
    MissingState { state: String },
    /// Strategy extraction was requested for a game the controller loses.
    Unrealizable,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateVariable { name } => {
                write!(f, "variable `{name}` is declared more than once")
            }
            Error::ReservedName { name } => {
                write!(f, "variable name `{name}` is reserved by the formula syntax")
            }
            Error::UnknownVariable { name } => {
                write!(f, "variable `{name}` is not declared")
            }
            Error::Syntax { offset, message } => {
                write!(f, "syntax error at offset {offset}: {message}")
            }
            Error::UndeclaredAtom { offset, name } => {
                write!(f, "undeclared atom `{name}` at offset {offset}")
            }
            Error::PositionOutOfRange { position, len } => {
                write!(f, "position {position} is out of range for a trace of length {len}")
            }
            Error::UnassignedVariable { name } => {
                write!(f, "assignment does not bind variable `{name}`")
            }
            Error::OverlappingAssignment { name } => {
                write!(f, "assignments overlap on variable `{name}`")
            }
            Error::MixedTraceDomains => {
                write!(f, "trace letters bind different variable sets")
            }
            Error::EmptyTrace => write!(f, "traces must be nonempty"),
            Error::DomainMismatch { expected, found } => {
                write!(f, "expected an assignment over {{{expected}}}, found {{{found}}}")
            }
            Error::ResourceLimit { limit } => write!(f, "{limit} exhausted"),
            Error::MissingState { state } => {
                write!(f, "automaton has no transition function for state `{state}`")
            }
            Error::Unrealizable => {
                write!(f, "no winning strategy exists to extract")
            }
        }
    }
}

impl core::error::Error for Error {}
