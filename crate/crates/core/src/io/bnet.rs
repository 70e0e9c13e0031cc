//! BoolNet-style `targets, factors` files.
//!
//! Each line holds a variable name and its update formula separated by a
//! comma. Formulas use `!`, `&`, `|`, parentheses and the constants `0`,
//! `1`, `true`, `false`. An optional `targets, factors` header and `#`
//! comments are accepted.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result, SourceSpan};
use crate::formula::{BoolExpr, Dnf, Literal, Term};
use crate::model::{BooleanNetwork, Mode, SupportMap};

fn err(message: impl Into<String>, line: usize, col: usize, len: usize) -> Error {
    Error::Parse(ParseError {
        message: message.into(),
        span: SourceSpan::new(line, col, line, col + len.max(1) - 1),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    And,
    Or,
    Not,
    LParen,
    RParen,
}

struct FormulaParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    index: &'a HashMap<&'a str, usize>,
}

impl FormulaParser<'_> {
    fn lex(text: &str, line: usize, offset: usize) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = offset + i;
            match c {
                c if c.is_whitespace() => i += 1,
                '&' => {
                    out.push((Tok::And, col));
                    i += 1;
                }
                '|' => {
                    out.push((Tok::Or, col));
                    i += 1;
                }
                '!' => {
                    out.push((Tok::Not, col));
                    i += 1;
                }
                '(' => {
                    out.push((Tok::LParen, col));
                    i += 1;
                }
                ')' => {
                    out.push((Tok::RParen, col));
                    i += 1;
                }
                c if c.is_alphanumeric() || c == '_' || c == '.' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                    {
                        i += 1;
                    }
                    out.push((Tok::Name(chars[start..i].iter().collect()), col));
                }
                _ => return Err(err(format!("unexpected character `{c}`"), line, col, 1)),
            }
        }
        Ok(out)
    }

    fn fail(&self, what: &str) -> Error {
        match self.toks.get(self.pos) {
            Some((tok, col)) => err(
                format!("expected {what}, found {tok:?}"),
                self.line,
                *col,
                1,
            ),
            None => err(
                format!("expected {what}, found end of line"),
                self.line,
                self.end_col,
                1,
            ),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.toks.get(self.pos).map(|t| &t.0) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<BoolExpr> {
        let mut parts = vec![self.and()?];
        while self.eat(&Tok::Or) {
            parts.push(self.and()?);
        }
        Ok(BoolExpr::or(parts))
    }

    fn and(&mut self) -> Result<BoolExpr> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(BoolExpr::and(parts))
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        if self.eat(&Tok::Not) {
            return Ok(BoolExpr::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let e = self.or()?;
            if !self.eat(&Tok::RParen) {
                return Err(self.fail("`)`"));
            }
            return Ok(e);
        }
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Name(name), col)) => {
                self.pos += 1;
                match name.as_str() {
                    "0" | "false" | "FALSE" => Ok(BoolExpr::Const(false)),
                    "1" | "true" | "TRUE" => Ok(BoolExpr::Const(true)),
                    _ => self
                        .index
                        .get(name.as_str())
                        .map(|&v| BoolExpr::Var(v))
                        .ok_or_else(|| {
                            err(
                                format!("unknown variable `{name}`"),
                                self.line,
                                col,
                                name.chars().count(),
                            )
                        }),
                }
            }
            _ => Err(self.fail("a variable or constant")),
        }
    }
}

struct Line<'a> {
    number: usize,
    target: &'a str,
    target_col: usize,
    factor: &'a str,
    factor_col: usize,
}

fn split_lines(text: &str) -> Result<Vec<Line<'_>>> {
    let mut out = Vec::new();
    let mut header_allowed = true;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((target, factor)) = content.split_once(',') else {
            return Err(err(
                "expected `<target>, <factor>`",
                number,
                1,
                content.chars().count(),
            ));
        };
        if header_allowed
            && target.trim().eq_ignore_ascii_case("targets")
            && factor.trim().eq_ignore_ascii_case("factors")
        {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        let target_col = 1 + target.chars().take_while(|c| c.is_whitespace()).count();
        let factor_col = target.chars().count() + 2;
        out.push(Line {
            number,
            target: target.trim(),
            target_col,
            factor,
            factor_col,
        });
    }
    Ok(out)
}

/// Parses a `.bnet` file. Supports are inferred from `<var>_<k>` names and
/// the mode is asynchronous.
pub fn parse_bnet(text: &str) -> Result<BooleanNetwork> {
    let lines = split_lines(text)?;
    let names: Vec<String> = lines.iter().map(|l| l.target.to_string()).collect();
    for (l, name) in lines.iter().zip(&names) {
        let valid = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '.');
        if !valid {
            return Err(err(
                format!("invalid target name `{name}`"),
                l.number,
                l.target_col,
                name.len(),
            ));
        }
        if names.iter().filter(|n| *n == name).count() > 1 {
            return Err(err(
                format!("duplicate target `{name}`"),
                l.number,
                l.target_col,
                name.len(),
            ));
        }
    }
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let formulas = lines
        .iter()
        .map(|l| {
            let toks = FormulaParser::lex(l.factor, l.number, l.factor_col)?;
            let mut p = FormulaParser {
                toks,
                pos: 0,
                line: l.number,
                end_col: l.factor_col + l.factor.chars().count(),
                index: &index,
            };
            let e = p.or()?;
            if p.pos < p.toks.len() {
                return Err(p.fail("`&`, `|` or end of line"));
            }
            Ok(Dnf::from_expr(&e))
        })
        .collect::<Result<Vec<_>>>()?;
    let supports = SupportMap::infer(&names)?;
    let mode = Mode::asynchronous(names.len());
    BooleanNetwork::new(supports, formulas, mode)
}

/// Reorders and renames the variables of `bn` to match `supports`, matching
/// Boolean variables by name. The mode becomes asynchronous.
pub fn align_to(bn: &BooleanNetwork, supports: &SupportMap) -> Result<BooleanNetwork> {
    let old = bn.names();
    if old.len() != supports.num_bool() {
        return Err(Error::spec(format!(
            "network has {} Boolean variables, the supports cover {}",
            old.len(),
            supports.num_bool()
        )));
    }
    let perm: Vec<usize> = old
        .iter()
        .map(|n| {
            supports
                .bool_names()
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::spec(format!("Boolean variable `{n}` is not in any support")))
        })
        .collect::<Result<_>>()?;
    let mut formulas = vec![Dnf::falsum(); old.len()];
    for (b, f) in bn.formulas().iter().enumerate() {
        formulas[perm[b]] = Dnf::new(f.terms().iter().map(|t| {
            Term::new(t.literals().iter().map(|l| Literal {
                var: perm[l.var],
                positive: l.positive,
            }))
            .expect("renaming keeps terms consistent")
        }));
    }
    BooleanNetwork::new(supports.clone(), formulas, Mode::asynchronous(old.len()))
}

/// Renders a network as `targets, factors` text, one line per Boolean
/// variable in index order.
pub fn emit_boolnet(bn: &BooleanNetwork) -> String {
    let mut out = String::from("targets, factors\n");
    for (name, f) in bn.names().iter().zip(bn.formulas()) {
        writeln!(out, "{name}, {}", f.render(bn.names())).unwrap();
    }
    out
}
