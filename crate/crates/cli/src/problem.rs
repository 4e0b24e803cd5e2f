//! Problem ingestion: variable lists from flags, or Syft-style
//! .ltlf/.part file pairs with a subset of the inputs hidden.

use std::fs;
use std::path::{Path, PathBuf};

use beliefsynt_core::{Context, Semantics};

use crate::args::{SemanticsArg, SolveArgs};

/// A fully resolved synthesis problem: alphabet, semantics, and the
/// formula text still to be parsed against the context.
pub struct Problem {
    pub context: Context,
    pub formula_text: String,
}

/// Splits a comma- or whitespace-separated name list. Empty input
/// yields no names.
pub fn split_names(list: &str) -> Vec<&str> {
    list.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

impl From<SemanticsArg> for Semantics {
    fn from(a: SemanticsArg) -> Semantics {
        match a {
            SemanticsArg::Mealy => Semantics::Mealy,
            SemanticsArg::Moore => Semantics::Moore,
        }
    }
}

/// Builds the problem from the solve arguments, reading the file pair
/// when one was given.
pub fn load(args: &SolveArgs) -> Result<Problem, String> {
    let semantics = Semantics::from(args.semantics);
    let unobservable = split_names(&args.unobservable_ins);
    if let Some(file) = &args.file {
        let part_path = match &args.part {
            Some(p) => p.clone(),
            None => default_part_path(file),
        };
        let formula_text = fs::read_to_string(file)
            .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
        let part = fs::read_to_string(&part_path)
            .map_err(|e| format!("cannot read {}: {e}", part_path.display()))?;
        let (ins, outs) = parse_part(&part)
            .map_err(|e| format!("{}: {e}", part_path.display()))?;
        let context = partition_with_hidden(&ins, &outs, &unobservable, semantics)?;
        Ok(Problem { context, formula_text: formula_text.trim().to_string() })
    } else {
        let Some(formula_text) = &args.formula else {
            return Err(String::from("no formula given; use --formula or --file"));
        };
        let ins = split_names(&args.ins);
        let outs = split_names(&args.outs);
        for h in &unobservable {
            if outs.contains(h) {
                return Err(format!(
                    "cannot hide {h}: outputs are observable by definition"
                ));
            }
        }
        let context = Context::new(&ins, &outs, &unobservable, semantics)
            .map_err(|e| format!("invalid variable partition: {e}"))?;
        Ok(Problem { context, formula_text: formula_text.clone() })
    }
}

pub fn default_part_path(ltlf: &Path) -> PathBuf {
    ltlf.with_extension("part")
}

/// Reads `.inputs:` and `.outputs:` lines; names are whitespace
/// separated. Both lines must be present exactly once.
pub fn parse_part(text: &str) -> Result<(Vec<String>, Vec<String>), String> {
    let mut ins: Option<Vec<String>> = None;
    let mut outs: Option<Vec<String>> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(".inputs:") {
            if ins.is_some() {
                return Err(String::from("duplicate .inputs: line"));
            }
            ins = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some(rest) = line.strip_prefix(".outputs:") {
            if outs.is_some() {
                return Err(String::from("duplicate .outputs: line"));
            }
            outs = Some(rest.split_whitespace().map(str::to_string).collect());
        } else {
            return Err(format!("unrecognized partition line: {line}"));
        }
    }
    match (ins, outs) {
        (Some(i), Some(o)) => Ok((i, o)),
        (None, _) => Err(String::from("missing .inputs: line")),
        (_, None) => Err(String::from("missing .outputs: line")),
    }
}

/// Moves the named inputs into the unobservable block. Every hidden
/// name must be a declared input; outputs are observable by definition.
pub fn partition_with_hidden(
    ins: &[String],
    outs: &[String],
    hidden: &[&str],
    semantics: Semantics,
) -> Result<Context, String> {
    for h in hidden {
        if !ins.iter().any(|i| i == h) {
            return Err(if outs.iter().any(|o| o == h) {
                format!("cannot hide {h}: outputs are observable by definition")
            } else {
                format!("cannot hide {h}: not a declared input")
            });
        }
    }
    let visible: Vec<&str> = ins
        .iter()
        .map(String::as_str)
        .filter(|i| !hidden.contains(i))
        .collect();
    let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
    Context::new(&visible, &outs, hidden, semantics)
        .map_err(|e| format!("invalid variable partition: {e}"))
}
