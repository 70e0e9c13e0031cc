//! The `.mvnet` language.
//!
//! ```text
//! network <id>;
//! var <id> : 0..<L>;
//! rules <id>: <level> <- <guard>;
//! ```
//!
//! Guards combine comparisons `<id> <op> <int>` (`= != < <= > >=`) and the
//! constants `true`/`false` with `!`, `&`, `|` and parentheses. `&` binds
//! tighter than `|`. `#` starts a comment running to the end of the line.
//! Declarations may appear in any order; rules are kept in textual order.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result, SourceSpan};
use crate::model::{CmpOp, Guard, Level, MvNetwork, Rule, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Semi,
    Colon,
    DotDot,
    Arrow,
    And,
    Or,
    Not,
    LParen,
    RParen,
    Cmp(CmpOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Not => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    span: SourceSpan,
}

fn err(message: impl Into<String>, span: SourceSpan) -> Error {
    Error::Parse(ParseError {
        message: message.into(),
        span,
    })
}

fn lex(text: &str) -> Result<(Vec<Spanned>, SourceSpan)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        let single = |tok: Tok, len: usize| Spanned {
            tok,
            span: SourceSpan::new(start.0, start.1, start.0, start.1 + len - 1),
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut col);
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                out.push(single(Tok::Ident(word), j - i));
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let span = SourceSpan::new(line, col, line, col + (j - i) - 1);
                let n = digits
                    .parse::<u64>()
                    .map_err(|_| err(format!("integer `{digits}` is too large"), span.clone()))?;
                out.push(Spanned {
                    tok: Tok::Int(n),
                    span,
                });
                advance(j - i, &mut i, &mut col);
            }
            _ => {
                let next = chars.get(i + 1).copied();
                let (tok, len) = match (c, next) {
                    ('.', Some('.')) => (Tok::DotDot, 2),
                    ('<', Some('-')) => (Tok::Arrow, 2),
                    ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
                    ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
                    ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
                    ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                    ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                    ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
                    ('!', _) => (Tok::Not, 1),
                    ('&', _) => (Tok::And, 1),
                    ('|', _) => (Tok::Or, 1),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    (';', _) => (Tok::Semi, 1),
                    (':', _) => (Tok::Colon, 1),
                    _ => {
                        return Err(err(
                            format!("unexpected character `{c}`"),
                            SourceSpan::new(line, col, line, col),
                        ))
                    }
                };
                out.push(single(tok, len));
                advance(len, &mut i, &mut col);
            }
        }
    }
    Ok((out, SourceSpan::new(line, col, line, col)))
}

/// Guard with unresolved variable names.
#[derive(Debug)]
enum RawGuard {
    Const(bool),
    Atom {
        var: String,
        op: CmpOp,
        value: u64,
        var_span: SourceSpan,
        value_span: SourceSpan,
    },
    Not(Box<RawGuard>),
    And(Vec<RawGuard>),
    Or(Vec<RawGuard>),
}

struct RawVar {
    name: String,
    max: u64,
    span: SourceSpan,
}

struct RawRule {
    var: String,
    var_span: SourceSpan,
    level: u64,
    level_span: SourceSpan,
    guard: RawGuard,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: SourceSpan,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self, expected: &str) -> Result<Spanned> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(err(
                format!("expected {expected}, found end of input"),
                self.eof.clone(),
            )),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan> {
        let what = tok.describe();
        let t = self.next(&what)?;
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(err(
                format!("expected {what}, found {}", t.tok.describe()),
                t.span,
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan)> {
        let t = self.next("an identifier")?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(err(
                format!("expected an identifier, found {}", other.describe()),
                t.span,
            )),
        }
    }

    fn int(&mut self) -> Result<(u64, SourceSpan)> {
        let t = self.next("an integer")?;
        match t.tok {
            Tok::Int(n) => Ok((n, t.span)),
            other => Err(err(
                format!("expected an integer, found {}", other.describe()),
                t.span,
            )),
        }
    }

    fn guard(&mut self) -> Result<RawGuard> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            RawGuard::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<RawGuard> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            RawGuard::And(parts)
        })
    }

    fn unary(&mut self) -> Result<RawGuard> {
        let t = self.next("a guard")?;
        match t.tok {
            Tok::Not => Ok(RawGuard::Not(Box::new(self.unary()?))),
            Tok::LParen => {
                let g = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            Tok::Ident(s) if s == "true" => Ok(RawGuard::Const(true)),
            Tok::Ident(s) if s == "false" => Ok(RawGuard::Const(false)),
            Tok::Ident(var) => {
                let c = self.next("a comparison operator")?;
                let Tok::Cmp(op) = c.tok else {
                    return Err(err(
                        format!("expected a comparison operator, found {}", c.tok.describe()),
                        c.span,
                    ));
                };
                let (value, value_span) = self.int()?;
                Ok(RawGuard::Atom {
                    var,
                    op,
                    value,
                    var_span: t.span,
                    value_span,
                })
            }
            other => Err(err(
                format!("expected a guard, found {}", other.describe()),
                t.span,
            )),
        }
    }
}

/// Parses a network. Errors carry the source location of the offending
/// token.
pub fn parse_mvnet(text: &str) -> Result<MvNetwork> {
    let (toks, eof) = lex(text)?;
    let mut p = Parser { toks, pos: 0, eof };
    let mut name: Option<String> = None;
    let mut vars: Vec<RawVar> = Vec::new();
    let mut rules: Vec<RawRule> = Vec::new();

    // First pass: syntax and declarations.
    while p.peek().is_some() {
        let (kw, kw_span) = p.ident()?;
        match kw.as_str() {
            "network" => {
                let (id, span) = p.ident()?;
                if name.is_some() {
                    return Err(err("duplicate `network` declaration", span));
                }
                name = Some(id);
                p.expect(Tok::Semi)?;
            }
            "var" => {
                let (id, span) = p.ident()?;
                p.expect(Tok::Colon)?;
                let (lo, lo_span) = p.int()?;
                if lo != 0 {
                    return Err(err("level ranges must start at 0", lo_span));
                }
                p.expect(Tok::DotDot)?;
                let (max, max_span) = p.int()?;
                if max < 1 {
                    return Err(err(
                        format!("variable `{id}` needs a maximal level of at least 1"),
                        max_span,
                    ));
                }
                if max > u64::from(u16::MAX) {
                    return Err(err(format!("maximal level {max} is too large"), max_span));
                }
                if vars.iter().any(|v| v.name == id) {
                    return Err(err(format!("duplicate variable `{id}`"), span));
                }
                p.expect(Tok::Semi)?;
                vars.push(RawVar {
                    name: id,
                    max,
                    span,
                });
            }
            "rules" => {
                let (var, var_span) = p.ident()?;
                p.expect(Tok::Colon)?;
                let (level, level_span) = p.int()?;
                if level == 0 {
                    return Err(err(
                        "level-0 rule head: level 0 is the implicit default and cannot be a rule target",
                        level_span,
                    ));
                }
                p.expect(Tok::Arrow)?;
                let guard = p.guard()?;
                p.expect(Tok::Semi)?;
                rules.push(RawRule {
                    var,
                    var_span,
                    level,
                    level_span,
                    guard,
                });
            }
            _ => {
                return Err(err(
                    format!("expected `network`, `var` or `rules`, found `{kw}`"),
                    kw_span,
                ))
            }
        }
    }

    // Second pass: name resolution and range checks.
    let index: HashMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let mut resolved: Vec<Vec<Rule>> = vec![Vec::new(); vars.len()];
    for r in &rules {
        let &i = index.get(r.var.as_str()).ok_or_else(|| {
            err(
                format!("undeclared variable `{}`", r.var),
                r.var_span.clone(),
            )
        })?;
        if r.level > vars[i].max {
            return Err(err(
                format!(
                    "level {} is outside the range 0..{} of `{}`",
                    r.level, vars[i].max, r.var
                ),
                r.level_span.clone(),
            ));
        }
        let guard = resolve(&r.guard, &vars, &index)?;
        resolved[i].push(Rule::new(r.level as Level, guard));
    }
    let variables = vars
        .iter()
        .map(|v| Variable::new(&v.name, v.max as Level))
        .collect();
    MvNetwork::new(
        name.unwrap_or_else(|| "network".into()),
        variables,
        resolved,
    )
    .map_err(|e| match e {
        Error::Spec(msg) => err(
            msg,
            vars.first()
                .map_or(SourceSpan::new(1, 1, 1, 1), |v| v.span.clone()),
        ),
        other => other,
    })
}

fn resolve(g: &RawGuard, vars: &[RawVar], index: &HashMap<&str, usize>) -> Result<Guard> {
    Ok(match g {
        RawGuard::Const(b) => Guard::Const(*b),
        RawGuard::Atom {
            var,
            op,
            value,
            var_span,
            value_span,
        } => {
            let &i = index
                .get(var.as_str())
                .ok_or_else(|| err(format!("undeclared variable `{var}`"), var_span.clone()))?;
            if *value > vars[i].max {
                return Err(err(
                    format!(
                        "constant {value} is outside the range 0..{} of `{var}`",
                        vars[i].max
                    ),
                    value_span.clone(),
                ));
            }
            Guard::atom(i, *op, *value as Level)
        }
        RawGuard::Not(inner) => Guard::not(resolve(inner, vars, index)?),
        RawGuard::And(parts) => Guard::And(
            parts
                .iter()
                .map(|p| resolve(p, vars, index))
                .collect::<Result<_>>()?,
        ),
        RawGuard::Or(parts) => Guard::Or(
            parts
                .iter()
                .map(|p| resolve(p, vars, index))
                .collect::<Result<_>>()?,
        ),
    })
}

/// Renders a network in the `.mvnet` language. The output parses back to
/// an identical network.
pub fn print_mvnet(net: &MvNetwork) -> String {
    let names = net.names();
    let mut out = String::new();
    writeln!(out, "network {};", net.name()).unwrap();
    out.push('\n');
    for v in net.variables() {
        writeln!(out, "var {} : 0..{};", v.name, v.max_level).unwrap();
    }
    for (i, v) in net.variables().iter().enumerate() {
        if net.rules(i).is_empty() {
            continue;
        }
        out.push('\n');
        for r in net.rules(i) {
            writeln!(
                out,
                "rules {}: {} <- {};",
                v.name,
                r.target,
                print_guard(&r.guard, &names)
            )
            .unwrap();
        }
    }
    out
}

/// Renders a guard. Nested conjunctions and disjunctions are parenthesized
/// so that parsing preserves the tree shape.
pub fn print_guard(g: &Guard, names: &[String]) -> String {
    match g {
        Guard::Const(b) => b.to_string(),
        Guard::Atom { var, op, value } => format!("{} {} {}", names[*var], op.symbol(), value),
        Guard::Not(inner) => match **inner {
            Guard::And(_) | Guard::Or(_) => format!("!({})", print_guard(inner, names)),
            _ => format!("!{}", print_guard(inner, names)),
        },
        Guard::And(parts) => join(parts, " & ", names),
        Guard::Or(parts) => join(parts, " | ", names),
    }
}

fn join(parts: &[Guard], sep: &str, names: &[String]) -> String {
    if parts.len() < 2 {
        // Degenerate n-ary nodes have no surface syntax of their own.
        return match parts.first() {
            Some(p) => format!("({})", print_guard(p, names)),
            None => (sep == " & ").to_string(),
        };
    }
    parts
        .iter()
        .map(|p| match p {
            Guard::And(_) | Guard::Or(_) => format!("({})", print_guard(p, names)),
            _ => print_guard(p, names),
        })
        .collect::<Vec<_>>()
        .join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FIG1;

    #[test]
    fn parses_running_example() {
        let net = parse_mvnet(FIG1).unwrap();
        assert_eq!(net.name(), "fig1");
        assert_eq!(net.names(), ["x", "y"]);
        assert_eq!(net.max_levels(), [1, 3]);
        assert_eq!(net.rules(0).len(), 1);
        assert_eq!(net.rules(1).len(), 3);
        assert_eq!(
            net.rules(1).iter().map(|r| r.target).collect::<Vec<_>>(),
            [3, 2, 1]
        );
    }

    #[test]
    fn variable_without_rules() {
        let net = parse_mvnet("var y : 0..1;").unwrap();
        assert!(net.rules(0).is_empty());
        assert_eq!(net.step_level(0, &[1]), 0);
    }

    #[test]
    fn level_zero_head_is_rejected() {
        let e = parse_mvnet("var y : 0..1;\nrules y: 0 <- y=1;").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("level-0 rule head"), "{msg}");
        assert!(msg.starts_with("2:10"), "{msg}");
    }

    #[test]
    fn diagnostics_carry_locations() {
        let e = parse_mvnet("var y : 0..1;\nrules z: 1 <- y = 1;").unwrap_err();
        assert_eq!(e.to_string(), "2:7: undeclared variable `z`");
        let e = parse_mvnet("var y : 0..1;\nrules y: 1 <- y = 2;").unwrap_err();
        assert!(e.to_string().starts_with("2:19: constant 2"), "{e}");
        let e = parse_mvnet("var y : 0..1; rules y: 1 <- y = ;").unwrap_err();
        assert!(e.to_string().contains("expected an integer"), "{e}");
        let e = parse_mvnet("var y : 0..1 rules").unwrap_err();
        assert!(e.to_string().contains("expected `;`"), "{e}");
        let e = parse_mvnet("var y : 0..1; rules y: 2 <- true;").unwrap_err();
        assert!(e.to_string().contains("outside the range"), "{e}");
    }

    #[test]
    fn rules_may_precede_declarations() {
        let net = parse_mvnet("rules a: 1 <- b = 0; var a : 0..1; var b : 0..1;").unwrap();
        assert_eq!(net.rules(0)[0].guard, Guard::atom(1, CmpOp::Eq, 0));
    }

    #[test]
    fn precedence_and_negation() {
        let net = parse_mvnet("var a : 0..1; var b : 0..2; rules a: 1 <- !a = 1 & b >= 1 | b = 0;")
            .unwrap();
        let g = &net.rules(0)[0].guard;
        let expected = Guard::Or(vec![
            Guard::And(vec![
                Guard::not(Guard::atom(0, CmpOp::Eq, 1)),
                Guard::atom(1, CmpOp::Ge, 1),
            ]),
            Guard::atom(1, CmpOp::Eq, 0),
        ]);
        assert_eq!(g, &expected);
    }

    #[test]
    fn print_round_trips_running_example() {
        let net = parse_mvnet(FIG1).unwrap();
        let text = print_mvnet(&net);
        assert_eq!(parse_mvnet(&text).unwrap(), net);
        assert!(text.contains("rules y: 3 <- x = 1 & y >= 2;"));
    }
}
