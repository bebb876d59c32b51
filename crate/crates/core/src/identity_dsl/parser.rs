use thiserror::Error;

use super::{DslError, IdentityChain, Monomial, Node, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: DslError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Var(String),
    Label(String),
    LBrace,
    RBrace,
    Comma,
    Under,
    Plus,
    Minus,
    Star,
    Eq,
    Semi,
    Eof,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |p: Pos, msg: String| ParseError { line: p.line, col: p.col, kind: DslError::Syntax(msg) };
    while i < chars.len() {
        let c = chars[i];
        let here = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '_' => Some(Tok::Under),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, here));
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| err(here, format!("integer {text} too large")))?;
            col += i - start;
            out.push((Tok::Int(n), here));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' || chars[i] == '_') {
                i += 1;
            }
            // A trailing `_` belongs to a subscript, never to a name.
            while i > start + 1 && chars[i - 1] == '_' {
                i -= 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let mut j = i;
            while j < chars.len() && chars[j].is_whitespace() && chars[j] != '\n' {
                j += 1;
            }
            if j < chars.len() && chars[j] == ':' {
                col += j + 1 - i;
                i = j + 1;
                out.push((Tok::Label(text), here));
                continue;
            }
            let valid = text.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && text.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
            if !valid {
                return Err(err(here, format!("invalid variable name {text:?}")));
            }
            out.push((Tok::Var(text), here));
            continue;
        }
        return Err(err(here, format!("unexpected character {c:?}")));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Surface expression before multilinear expansion.
enum Expr {
    Var(String),
    Bracket { args: Vec<Vec<(i64, Expr)>>, sub: Option<u32> },
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let p = self.pos();
        Err(ParseError { line: p.line, col: p.col, kind: DslError::Syntax(msg.into()) })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn file(&mut self) -> Result<Vec<IdentityChain>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            let start = self.pos();
            let (label, members) = self.identity()?;
            let name = label.unwrap_or_else(|| format!("#{}", out.len() + 1));
            let chain = IdentityChain::new(name, members)
                .map_err(|kind| ParseError { line: start.line, col: start.col, kind })?;
            out.push(chain);
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::Eof => {}
                t => return self.fail(format!("expected ';' or end of input, found {}", describe(t))),
            }
        }
        Ok(out)
    }

    fn identity(&mut self) -> Result<(Option<String>, Vec<Polynomial>), ParseError> {
        let label = if let Tok::Label(l) = self.peek() {
            let l = l.clone();
            self.bump();
            Some(l)
        } else {
            None
        };
        let mut members = vec![self.polynomial()?];
        if *self.peek() != Tok::Eq {
            return self.fail(format!("expected '=', found {}", describe(self.peek())));
        }
        while *self.peek() == Tok::Eq {
            self.bump();
            members.push(self.polynomial()?);
        }
        Ok((label, members))
    }

    fn polynomial(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.pos();
        let sum = self.sum()?;
        let at = |kind| ParseError { line: start.line, col: start.col, kind };
        let mut p = Polynomial::zero();
        for (c, e) in &sum {
            for (k, node) in expand(e).map_err(at)? {
                let coeff = c.checked_mul(k).ok_or(DslError::Overflow).map_err(at)?;
                p.add_term(coeff, Monomial::new(node).map_err(at)?).map_err(at)?;
            }
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Vec<(i64, Expr)>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        loop {
            if let Some(t) = self.term()? {
                terms.push((sign * t.0, t.1));
            }
            sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.bump();
        }
        Ok(terms)
    }

    /// A term, or `None` for the literal `0`.
    fn term(&mut self) -> Result<Option<(i64, Expr)>, ParseError> {
        let mut coeff = 1;
        if let Tok::Int(n) = *self.peek() {
            self.bump();
            if *self.peek() == Tok::Star {
                self.bump();
                coeff = n;
            } else if n == 0 {
                return Ok(None);
            } else {
                return self.fail("a bare integer term must be 0");
            }
        }
        Ok(Some((coeff, self.atom()?)))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Tok::Var(v) => Ok(Expr::Var(v)),
            Tok::LBrace => {
                let mut args = vec![self.sum()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.sum()?);
                }
                self.expect(Tok::RBrace, "'}'")?;
                let sub = if *self.peek() == Tok::Under {
                    self.bump();
                    match self.bump() {
                        Tok::Int(n) => Some(u32::try_from(n).unwrap_or(u32::MAX)),
                        _ => {
                            self.at -= 1;
                            return self.fail("expected subscript after '_'");
                        }
                    }
                } else {
                    None
                };
                Ok(Expr::Bracket { args, sub })
            }
            t => {
                self.at -= 1;
                self.fail(format!("expected variable or '{{', found {}", describe(&t)))
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Var(v) => format!("variable {v}"),
        Tok::Label(l) => format!("label {l}"),
        Tok::Eof => "end of input".into(),
        Tok::LBrace => "'{'".into(),
        Tok::RBrace => "'}'".into(),
        Tok::Comma => "','".into(),
        Tok::Under => "'_'".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Eq => "'='".into(),
        Tok::Semi => "';'".into(),
    }
}

/// Distributes brackets over sums in their arguments.
fn expand(e: &Expr) -> Result<Vec<(i64, Node)>, DslError> {
    match e {
        Expr::Var(v) => Ok(vec![(1, Node::Var(v.clone()))]),
        Expr::Bracket { args, sub } => {
            let mut acc: Vec<(i64, Vec<Node>)> = vec![(1, Vec::new())];
            for arg in args {
                let mut options = Vec::new();
                for (c, sub_e) in arg {
                    for (k, n) in expand(sub_e)? {
                        options.push((c.checked_mul(k).ok_or(DslError::Overflow)?, n));
                    }
                }
                let mut next = Vec::with_capacity(acc.len() * options.len());
                for (c, prefix) in &acc {
                    for (k, n) in &options {
                        let mut p = prefix.clone();
                        p.push(n.clone());
                        next.push((c.checked_mul(*k).ok_or(DslError::Overflow)?, p));
                    }
                }
                acc = next;
            }
            Ok(acc.into_iter().map(|(c, a)| (c, Node::Op { sub: *sub, args: a })).collect())
        }
    }
}

/// Parses a file of `;`-separated identity chains.
pub fn parse(text: &str) -> Result<Vec<IdentityChain>, ParseError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.file()
}

/// Parses exactly one chain.
pub fn parse_one(text: &str) -> Result<IdentityChain, ParseError> {
    let mut chains = parse(text)?;
    if chains.len() != 1 {
        return Err(ParseError {
            line: 1,
            col: 1,
            kind: DslError::Syntax(format!("expected one identity, found {}", chains.len())),
        });
    }
    Ok(chains.remove(0))
}
