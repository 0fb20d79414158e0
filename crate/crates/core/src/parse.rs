//! Parser for the network description language.
//!
//! ```text
//! k = 5
//! system X:
//!   x1' = !x3 & add(z1, #2)
//! system Z:
//!   z1' = conf(2, x1) | rot(z1)
//! ```
//!
//! `!` binds tightest, then `&`, then `|`; `add`, `conf`, `rot` are the
//! modular sum, confirmor and rotator; `#i` is the constant level i.
//! `#` followed by anything but a digit starts a comment (line start or
//! after whitespace).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Const(usize),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Comma,
    Prime,
    Eq,
    Colon,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

/// Tokenize one line (1-based `line` number); comments are stripped here.
fn lex_line(text: &str, line: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut prev_ws = true; // line start counts as whitespace
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            prev_ws = true;
            i += 1;
            continue;
        }
        let was_ws = prev_ws;
        prev_ws = false;
        match c {
            '#' => {
                if i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let level: usize = chars[i + 1..j]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| syntax(line, col, "constant level out of range"))?;
                    out.push(Spanned { tok: Tok::Const(level), line, col });
                    i = j;
                } else if was_ws {
                    break; // comment to end of line
                } else {
                    return Err(syntax(line, col, "unexpected '#'"));
                }
            }
            '!' => {
                out.push(Spanned { tok: Tok::Not, line, col });
                i += 1;
            }
            '&' => {
                out.push(Spanned { tok: Tok::And, line, col });
                i += 1;
            }
            '|' => {
                out.push(Spanned { tok: Tok::Or, line, col });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line, col });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line, col });
                i += 1;
            }
            '\'' => {
                out.push(Spanned { tok: Tok::Prime, line, col });
                i += 1;
            }
            '=' => {
                out.push(Spanned { tok: Tok::Eq, line, col });
                i += 1;
            }
            ':' => {
                out.push(Spanned { tok: Tok::Colon, line, col });
                i += 1;
            }
            _ if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let v: usize = chars[i..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| syntax(line, col, "integer out of range"))?;
                out.push(Spanned { tok: Tok::Int(v), line, col });
                i = j;
            }
            _ if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[i..j].iter().collect()),
                    line,
                    col,
                });
                i = j;
            }
            _ => return Err(syntax(line, col, format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.line, self.end_col),
        }
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let s = self.toks.get(self.pos);
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let (line, col) = self.here();
        match self.bump() {
            Some(s) if s.tok == tok => Ok(()),
            _ => Err(syntax(line, col, format!("expected {what}"))),
        }
    }

    fn or_expr(&mut self) -> Result<Expr> {
        let mut e = self.and_expr()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.and_expr()?;
            e = Expr::Or(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            e = Expr::And(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Not) {
            self.bump();
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let (line, col) = self.here();
        let tok = match self.bump() {
            Some(s) => s.tok.clone(),
            None => return Err(syntax(line, col, "expected expression")),
        };
        match tok {
            Tok::LParen => {
                let e = self.or_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Const(level) => Ok(Expr::Const(level)),
            Tok::Ident(name) => match name.as_str() {
                "add" => {
                    self.expect(Tok::LParen, "'(' after add")?;
                    let a = self.or_expr()?;
                    self.expect(Tok::Comma, "',' in add")?;
                    let b = self.or_expr()?;
                    self.expect(Tok::RParen, "')' after add arguments")?;
                    Ok(Expr::ModAdd(Box::new(a), Box::new(b)))
                }
                "conf" => {
                    self.expect(Tok::LParen, "'(' after conf")?;
                    let (iline, icol) = self.here();
                    let idx = match self.bump().map(|s| s.tok.clone()) {
                        Some(Tok::Int(v)) => v,
                        _ => return Err(syntax(iline, icol, "expected confirmor index")),
                    };
                    self.expect(Tok::Comma, "',' in conf")?;
                    let a = self.or_expr()?;
                    self.expect(Tok::RParen, "')' after conf arguments")?;
                    Ok(Expr::Confirmor(idx, Box::new(a)))
                }
                "rot" => {
                    self.expect(Tok::LParen, "'(' after rot")?;
                    let a = self.or_expr()?;
                    self.expect(Tok::RParen, "')' after rot argument")?;
                    Ok(Expr::Rotator(Box::new(a)))
                }
                _ => {
                    if !is_var_name(&name) {
                        return Err(syntax(line, col, format!("unknown identifier '{name}'")));
                    }
                    Ok(Expr::Var(name))
                }
            },
            other => Err(syntax(line, col, format!("unexpected token {other:?}"))),
        }
    }
}

fn is_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('x') | Some('z'))
        && name.len() > 1
        && chars.all(|c| c.is_ascii_digit())
}

fn var_index(name: &str) -> Option<usize> {
    if is_var_name(name) {
        name[1..].parse().ok().filter(|&i| i >= 1)
    } else {
        None
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Preamble,
    X,
    Z,
}

/// Validate confirmor indices and constant levels against k.
fn check_ranges(e: &Expr, k: usize) -> Result<()> {
    match e {
        Expr::Var(_) => Ok(()),
        Expr::Const(level) => {
            if *level < 1 || *level > k {
                Err(Error::LevelRange { level: *level, k })
            } else {
                Ok(())
            }
        }
        Expr::Confirmor(i, a) => {
            if *i < 1 || *i > k {
                return Err(Error::ConfirmorIndex { index: *i, k });
            }
            check_ranges(a, k)
        }
        Expr::Not(a) | Expr::Rotator(a) => check_ranges(a, k),
        Expr::And(a, b) | Expr::Or(a, b) | Expr::ModAdd(a, b) => {
            check_ranges(a, k)?;
            check_ranges(b, k)
        }
    }
}

pub fn parse_network(text: &str) -> Result<Network> {
    let mut k: Option<usize> = None;
    let mut section = Section::Preamble;
    let mut x_map: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut z_map: BTreeMap<usize, Expr> = BTreeMap::new();
    let mut last_line = 0;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        last_line = line;
        let toks = lex_line(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        // `k = <int>`
        if let Tok::Ident(name) = &toks[0].tok {
            if name == "k" {
                if toks.len() != 3 || toks[1].tok != Tok::Eq {
                    return Err(syntax(line, toks[0].col, "expected `k = <int>`"));
                }
                let v = match toks[2].tok {
                    Tok::Int(v) => v,
                    _ => return Err(syntax(line, toks[2].col, "expected integer after `k =`")),
                };
                if v < 2 {
                    return Err(syntax(line, toks[2].col, format!("k must be at least 2, got {v}")));
                }
                if k.replace(v).is_some() {
                    return Err(syntax(line, toks[0].col, "duplicate `k =` line"));
                }
                continue;
            }
            if name == "system" {
                let which = match toks.get(1).map(|s| &s.tok) {
                    Some(Tok::Ident(s)) if s == "X" => Section::X,
                    Some(Tok::Ident(s)) if s == "Z" => Section::Z,
                    _ => {
                        let (l, c) = toks.get(1).map(|s| (s.line, s.col)).unwrap_or((line, raw.len() + 1));
                        return Err(syntax(l, c, "expected `X` or `Z` after `system`"));
                    }
                };
                if toks.len() != 3 || toks[2].tok != Tok::Colon {
                    return Err(syntax(line, raw.len() + 1, "expected ':' after system header"));
                }
                section = which;
                continue;
            }
        }
        // rule line: name' = expr
        let (name, name_col) = match &toks[0].tok {
            Tok::Ident(n) => (n.clone(), toks[0].col),
            _ => return Err(syntax(line, toks[0].col, "expected a rule `name' = expr`")),
        };
        if toks.len() < 3 || toks[1].tok != Tok::Prime || toks[2].tok != Tok::Eq {
            return Err(syntax(line, toks[0].col, "expected `name' = expr`"));
        }
        let idx = var_index(&name)
            .ok_or_else(|| syntax(line, name_col, format!("invalid node name '{name}'")))?;
        let target = match (section, name.as_bytes()[0]) {
            (Section::Preamble, _) => {
                return Err(syntax(line, name_col, "rule before any `system` header"))
            }
            (Section::X, b'x') => &mut x_map,
            (Section::Z, b'z') => &mut z_map,
            (Section::X, _) => {
                return Err(syntax(line, name_col, format!("'{name}' does not belong in system X")))
            }
            (Section::Z, _) => {
                return Err(syntax(line, name_col, format!("'{name}' does not belong in system Z")))
            }
        };
        let mut parser = ExprParser { toks: &toks[3..], pos: 0, line, end_col: raw.len() + 1 };
        let expr = parser.or_expr()?;
        if parser.pos != parser.toks.len() {
            let (l, c) = parser.here();
            return Err(syntax(l, c, "trailing input after expression"));
        }
        if target.insert(idx, expr).is_some() {
            return Err(syntax(line, name_col, format!("duplicate rule for '{name}'")));
        }
    }

    let k = k.ok_or_else(|| syntax(last_line.max(1), 1, "missing `k = <int>` line"))?;
    if x_map.is_empty() {
        return Err(syntax(last_line.max(1), 1, "system X has no rules"));
    }
    let n = *x_map.keys().max().unwrap();
    for (label, map) in [("x", &x_map), ("z", &z_map)] {
        if map.len() != n || map.keys().max() != Some(&n) {
            let have: Vec<String> = map.keys().map(|i| format!("{label}{i}")).collect();
            return Err(syntax(
                last_line.max(1),
                1,
                format!(
                    "systems must both define nodes 1..{n}; system {} defines [{}]",
                    label.to_uppercase(),
                    have.join(", ")
                ),
            ));
        }
    }

    let x_rules: Vec<Expr> = x_map.into_values().collect();
    let z_rules: Vec<Expr> = z_map.into_values().collect();
    for rule in x_rules.iter().chain(&z_rules) {
        check_ranges(rule, k)?;
        for v in rule.free_vars() {
            match var_index(v) {
                Some(i) if i <= n => {}
                _ => return Err(Error::UnboundVariable(v.to_string())),
            }
        }
    }
    Ok(Network { k, n, x_rules, z_rules })
}
