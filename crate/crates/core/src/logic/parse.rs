use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::context::Context;
use crate::error::Error;
use crate::logic::ast::{BinOp, FormulaId};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    LPar,
    RPar,
    Not,
    And,
    Or,
    Implies,
    Equiv,
    Xor,
    WeakNext,
    StrongNext,
    Finally,
    Globally,
    Until,
    Release,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::True => "`tt`".into(),
            Tok::False => "`ff`".into(),
            Tok::LPar => "`(`".into(),
            Tok::RPar => "`)`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Equiv => "`<->`".into(),
            Tok::Xor => "`xor`".into(),
            Tok::WeakNext => "`X`".into(),
            Tok::StrongNext => "`X[!]`".into(),
            Tok::Finally => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "`R`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '(' => {
                toks.push((start, Tok::LPar));
                i += 1;
            }
            ')' => {
                toks.push((start, Tok::RPar));
                i += 1;
            }
            '!' => {
                toks.push((start, Tok::Not));
                i += 1;
            }
            '^' => {
                toks.push((start, Tok::Xor));
                i += 1;
            }
            '&' => {
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
                toks.push((start, Tok::And));
            }
            '|' => {
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
                toks.push((start, Tok::Or));
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((start, Tok::Implies));
                    i += 2;
                } else {
                    return Err(Error::Syntax {
                        offset: start,
                        message: "expected `->`".into(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((start, Tok::Equiv));
                    i += 3;
                } else {
                    return Err(Error::Syntax {
                        offset: start,
                        message: "expected `<->`".into(),
                    });
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_ascii_alphanumeric() || d == '_' {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[i..j];
                let tok = match word {
                    "tt" | "true" => Tok::True,
                    "ff" | "false" => Tok::False,
                    "xor" => Tok::Xor,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "N" => Tok::StrongNext,
                    "X" => {
                        if bytes.get(j) == Some(&b'[')
                            && bytes.get(j + 1) == Some(&b'!')
                            && bytes.get(j + 2) == Some(&b']')
                        {
                            j += 3;
                            Tok::StrongNext
                        } else {
                            Tok::WeakNext
                        }
                    }
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start, tok));
                i = j;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    toks.push((text.len(), Tok::End));
    Ok(toks)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    /// Temporal binaries bind loosest and associate to the right.
    fn formula(&mut self) -> Result<FormulaId, Error> {
        let lhs = self.arrow()?;
        match self.peek() {
            Tok::Until => {
                self.advance();
                let rhs = self.formula()?;
                Ok(self.ctx.until(lhs, rhs))
            }
            Tok::Release => {
                self.advance();
                let rhs = self.formula()?;
                Ok(self.ctx.release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn arrow(&mut self) -> Result<FormulaId, Error> {
        let lhs = self.disjunction()?;
        let op = match self.peek() {
            Tok::Implies => BinOp::Implies,
            Tok::Equiv => BinOp::Equiv,
            Tok::Xor => BinOp::Xor,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.arrow()?;
        Ok(self.ctx.bin(op, lhs, rhs))
    }

    fn disjunction(&mut self) -> Result<FormulaId, Error> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.conjunction()?;
            lhs = self.ctx.or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<FormulaId, Error> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            let rhs = self.unary()?;
            lhs = self.ctx.and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FormulaId, Error> {
        match self.peek() {
            Tok::Not => {
                self.advance();
                let f = self.unary()?;
                Ok(self.ctx.not(f))
            }
            Tok::WeakNext => {
                self.advance();
                let f = self.unary()?;
                Ok(self.ctx.weak_next(f))
            }
            Tok::StrongNext => {
                self.advance();
                let f = self.unary()?;
                Ok(self.ctx.strong_next(f))
            }
            Tok::Finally => {
                self.advance();
                let f = self.unary()?;
                Ok(self.ctx.finally(f))
            }
            Tok::Globally => {
                self.advance();
                let f = self.unary()?;
                Ok(self.ctx.globally(f))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<FormulaId, Error> {
        let offset = self.offset();
        match self.advance() {
            Tok::True => Ok(self.ctx.tt()),
            Tok::False => Ok(self.ctx.ff()),
            Tok::Ident(name) => match self.ctx.var(&name) {
                Some(v) => Ok(self.ctx.atom(v)),
                None => Err(Error::UndeclaredAtom { offset, name }),
            },
            Tok::LPar => {
                let f = self.formula()?;
                if *self.peek() != Tok::RPar {
                    return Err(Error::Syntax {
                        offset: self.offset(),
                        message: format!("expected `)`, found {}", self.peek().describe()),
                    });
                }
                self.advance();
                Ok(f)
            }
            other => Err(Error::Syntax {
                offset,
                message: format!("expected a formula, found {}", other.describe()),
            }),
        }
    }
}

impl Context {
    /// Parses `text` into an interned formula. Every atom must be a
    /// declared variable. Precedence, tightest first: `!`/unary temporal,
    /// `&`, `|`, `->`/`<->`/`xor`, then `U`/`R`; binaries associate to
    /// the right. `X` is the weak next; `X[!]` and `N` both spell the
    /// strong next.
    pub fn parse(&self, text: &str) -> Result<FormulaId, Error> {
        let toks = lex(text)?;
        let mut parser = Parser { ctx: self, toks, pos: 0 };
        let f = parser.formula()?;
        if *parser.peek() != Tok::End {
            return Err(Error::Syntax {
                offset: parser.offset(),
                message: format!("unexpected {}", parser.peek().describe()),
            });
        }
        Ok(f)
    }
}
