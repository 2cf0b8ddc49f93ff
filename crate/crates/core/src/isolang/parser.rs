//! Concrete syntax for iso files.
//!
//! ```text
//! # comments run to end of line
//! iso notb : bool <-> bool {
//!   | ff <-> tt
//!   | tt <-> ff
//! }
//!
//! iso had : bool <-> bool {
//!   | ff <-> 0.7071067811865476 * ff + 0.7071067811865476 * tt
//!   | tt <-> 0.7071067811865476 * ff + -0.7071067811865476 * tt
//! }
//!
//! iso map (g : a <-> b) : [a] <-> [b] = fix f {
//!   | nil <-> nil
//!   | cons (h, t) <-> cons (g h, f t)
//! }
//!
//! iso mapnot : [bool] <-> [bool] = map notb
//! ```
//!
//! Scalars are floats with an optional trailing `i`, `sqrt(x)`, or a
//! parenthesized `(a + bi)`; `*` binds a scalar to a value; summands are
//! joined with `+`/`-`. `bool`, `tt`, `ff`, `[...]`, `nil` and `cons` are
//! sugar for the sum/unit/mu encodings.

use num_complex::Complex64;

use super::ast::{Clause, Expr, Iso, IsoRef, IsoType, Pattern};
use super::IsoError;
use crate::qnum::Amplitude;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Imag(f64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Iso, // '<->'
    Star,
    Plus,
    Minus,
    Bar,
    Equals,
    Dot,
    Slash,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, IsoError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            '\n' => {
                chars.next();
                line += 1;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                toks.push((Tok::LParen, line));
            }
            ')' => {
                chars.next();
                toks.push((Tok::RParen, line));
            }
            '{' => {
                chars.next();
                toks.push((Tok::LBrace, line));
            }
            '}' => {
                chars.next();
                toks.push((Tok::RBrace, line));
            }
            '[' => {
                chars.next();
                toks.push((Tok::LBracket, line));
            }
            ']' => {
                chars.next();
                toks.push((Tok::RBracket, line));
            }
            ',' => {
                chars.next();
                toks.push((Tok::Comma, line));
            }
            ':' => {
                chars.next();
                toks.push((Tok::Colon, line));
            }
            '*' => {
                chars.next();
                toks.push((Tok::Star, line));
            }
            '+' => {
                chars.next();
                toks.push((Tok::Plus, line));
            }
            '|' => {
                chars.next();
                toks.push((Tok::Bar, line));
            }
            '=' => {
                chars.next();
                toks.push((Tok::Equals, line));
            }
            '.' => {
                chars.next();
                toks.push((Tok::Dot, line));
            }
            '/' => {
                chars.next();
                toks.push((Tok::Slash, line));
            }
            '<' => {
                chars.next();
                if chars.next() == Some('-') && chars.next() == Some('>') {
                    toks.push((Tok::Iso, line));
                } else {
                    return Err(IsoError::Parse {
                        line,
                        msg: "expected `<->`".into(),
                    });
                }
            }
            '-' => {
                chars.next();
                toks.push((Tok::Minus, line));
            }
            c if c.is_ascii_digit() => {
                let mut num = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' {
                        num.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let value: f64 = num.parse().map_err(|_| IsoError::Parse {
                    line,
                    msg: format!("bad number `{num}`"),
                })?;
                if chars.peek() == Some(&'i') {
                    chars.next();
                    toks.push((Tok::Imag(value), line));
                } else {
                    toks.push((Tok::Number(value), line));
                }
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(word), line));
            }
            other => {
                return Err(IsoError::Parse {
                    line,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// iso-parameter names in scope (resolve as `IsoRef::Param`)
    params: Vec<String>,
    /// fixpoint binder in scope (resolves as `IsoRef::SelfRec`)
    fix: Option<String>,
}

const KEYWORDS: &[&str] = &[
    "iso", "fix", "mu", "inl", "inr", "fold", "tt", "ff", "nil", "cons", "bool", "sqrt",
];

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, IsoError> {
        Err(IsoError::Parse {
            line: self.line(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<(), IsoError> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            got => self.err(format!("expected {what}, got {got:?}")),
        }
    }

    fn ident(&mut self) -> Result<String, IsoError> {
        match self.next() {
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => Ok(w),
            got => self.err(format!("expected an identifier, got {got:?}")),
        }
    }

    // ---- types ---------------------------------------------------------

    fn ty(&mut self) -> Result<IsoType, IsoError> {
        // sums are the loosest level
        let mut left = self.ty_tensor()?;
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.next();
            let right = self.ty_tensor()?;
            left = IsoType::sum(left, right);
        }
        Ok(left)
    }

    fn ty_tensor(&mut self) -> Result<IsoType, IsoError> {
        let mut left = self.ty_atom()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.next();
            let right = self.ty_atom()?;
            left = IsoType::tensor(left, right);
        }
        Ok(left)
    }

    fn ty_atom(&mut self) -> Result<IsoType, IsoError> {
        match self.next() {
            Some(Tok::Number(n)) if n == 1.0 => Ok(IsoType::One),
            Some(Tok::LParen) => {
                let t = self.ty()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::LBracket) => {
                let t = self.ty()?;
                self.eat(Tok::RBracket, "`]`")?;
                Ok(IsoType::list_of(t))
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "bool" => Ok(IsoType::bool_type()),
                "mu" => {
                    let x = self.ident()?;
                    self.eat(Tok::Dot, "`.`")?;
                    let body = self.ty()?;
                    Ok(IsoType::Mu(x, Box::new(body)))
                }
                _ if KEYWORDS.contains(&w.as_str()) => {
                    self.pos -= 1;
                    self.err(format!("`{w}` is not a type"))
                }
                _ => Ok(IsoType::Var(w)),
            },
            got => self.err(format!("expected a type, got {got:?}")),
        }
    }

    // ---- patterns ------------------------------------------------------

    fn pattern(&mut self) -> Result<Pattern, IsoError> {
        match self.next() {
            Some(Tok::LParen) => {
                if matches!(self.peek(), Some(Tok::RParen)) {
                    self.next();
                    return Ok(Pattern::Unit);
                }
                let first = self.pattern()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(first),
                    Some(Tok::Comma) => {
                        let second = self.pattern()?;
                        self.eat(Tok::RParen, "`)`")?;
                        Ok(Pattern::pair(first, second))
                    }
                    got => self.err(format!("expected `)` or `,`, got {got:?}")),
                }
            }
            Some(Tok::LBracket) => {
                let mut items = Vec::new();
                if matches!(self.peek(), Some(Tok::RBracket)) {
                    self.next();
                    return Ok(Pattern::list(items));
                }
                loop {
                    items.push(self.pattern()?);
                    match self.next() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::RBracket) => break,
                        got => return self.err(format!("expected `,` or `]`, got {got:?}")),
                    }
                }
                Ok(Pattern::list(items))
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "inl" => Ok(Pattern::inl(self.pattern()?)),
                "inr" => Ok(Pattern::inr(self.pattern()?)),
                "fold" => Ok(Pattern::fold(self.pattern()?)),
                "cons" => {
                    let arg = self.pattern()?;
                    match arg {
                        Pattern::Pair(h, t) => Ok(Pattern::cons(*h, *t)),
                        other => Ok(Pattern::fold(Pattern::inr(other))),
                    }
                }
                "nil" => Ok(Pattern::nil()),
                "tt" => Ok(Pattern::bool_value(true)),
                "ff" => Ok(Pattern::bool_value(false)),
                _ if KEYWORDS.contains(&w.as_str()) => {
                    self.err(format!("keyword `{w}` is not a pattern"))
                }
                _ => Ok(Pattern::Var(w)),
            },
            got => self.err(format!("expected a pattern, got {got:?}")),
        }
    }

    // ---- rhs expressions -----------------------------------------------

    fn iso_ref(&self, name: &str) -> IsoRef {
        if self.fix.as_deref() == Some(name) {
            IsoRef::SelfRec
        } else if self.params.iter().any(|p| p == name) {
            IsoRef::Param(name.to_string())
        } else {
            IsoRef::Named(name.to_string())
        }
    }

    fn expr(&mut self) -> Result<Expr, IsoError> {
        match self.next() {
            Some(Tok::LParen) => {
                if matches!(self.peek(), Some(Tok::RParen)) {
                    self.next();
                    return Ok(Expr::Unit);
                }
                let first = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(first),
                    Some(Tok::Comma) => {
                        let second = self.expr()?;
                        self.eat(Tok::RParen, "`)`")?;
                        Ok(Expr::Pair(Box::new(first), Box::new(second)))
                    }
                    got => self.err(format!("expected `)` or `,`, got {got:?}")),
                }
            }
            Some(Tok::LBracket) => {
                let mut items = Vec::new();
                if matches!(self.peek(), Some(Tok::RBracket)) {
                    self.next();
                } else {
                    loop {
                        items.push(self.expr()?);
                        match self.next() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RBracket) => break,
                            got => {
                                return self.err(format!("expected `,` or `]`, got {got:?}"))
                            }
                        }
                    }
                }
                let mut out = Expr::from_pattern(&Pattern::nil());
                for item in items.into_iter().rev() {
                    out = Expr::Fold(Box::new(Expr::InR(Box::new(Expr::Pair(
                        Box::new(item),
                        Box::new(out),
                    )))));
                }
                Ok(out)
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "inl" => Ok(Expr::InL(Box::new(self.expr()?))),
                "inr" => Ok(Expr::InR(Box::new(self.expr()?))),
                "fold" => Ok(Expr::Fold(Box::new(self.expr()?))),
                "nil" => Ok(Expr::from_pattern(&Pattern::nil())),
                "tt" => Ok(Expr::from_pattern(&Pattern::bool_value(true))),
                "ff" => Ok(Expr::from_pattern(&Pattern::bool_value(false))),
                "cons" => {
                    let arg = self.expr()?;
                    Ok(Expr::Fold(Box::new(Expr::InR(Box::new(arg)))))
                }
                _ if KEYWORDS.contains(&w.as_str()) => {
                    self.err(format!("keyword `{w}` is not an expression"))
                }
                name => {
                    // an identifier followed by an atom is an application
                    if self.starts_expr_atom() {
                        let arg = self.expr_atom()?;
                        Ok(Expr::App(self.iso_ref(name), Box::new(arg)))
                    } else {
                        Ok(Expr::Var(name.to_string()))
                    }
                }
            },
            got => self.err(format!("expected an expression, got {got:?}")),
        }
    }

    fn starts_expr_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::LParen | Tok::LBracket)
                | Some(Tok::Ident(_))
        )
    }

    fn expr_atom(&mut self) -> Result<Expr, IsoError> {
        self.expr()
    }

    // ---- scalars ---------------------------------------------------------

    fn scalar_atom(&mut self) -> Result<Amplitude, IsoError> {
        match self.next() {
            Some(Tok::Number(x)) => {
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    match self.next() {
                        Some(Tok::Number(d)) if d != 0.0 => {
                            Ok(Complex64::new(x / d, 0.0))
                        }
                        got => self.err(format!("expected a divisor, got {got:?}")),
                    }
                } else {
                    Ok(Complex64::new(x, 0.0))
                }
            }
            Some(Tok::Imag(x)) => Ok(Complex64::new(0.0, x)),
            Some(Tok::Minus) => Ok(-self.scalar_atom()?),
            Some(Tok::Ident(w)) if w == "sqrt" => {
                self.eat(Tok::LParen, "`(`")?;
                let inner = match self.next() {
                    Some(Tok::Number(x)) if x >= 0.0 => x,
                    got => return self.err(format!("expected a number, got {got:?}")),
                };
                self.eat(Tok::RParen, "`)`")?;
                let mut value = inner.sqrt();
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    match self.next() {
                        Some(Tok::Number(d)) if d != 0.0 => value /= d,
                        got => return self.err(format!("expected a divisor, got {got:?}")),
                    }
                }
                Ok(Complex64::new(value, 0.0))
            }
            Some(Tok::LParen) => {
                // (a + bi) or (a - bi)
                let first = self.scalar_atom()?;
                let total = match self.next() {
                    Some(Tok::RParen) => first,
                    Some(Tok::Plus) => {
                        let second = self.scalar_atom()?;
                        self.eat(Tok::RParen, "`)`")?;
                        first + second
                    }
                    Some(Tok::Minus) => {
                        let second = self.scalar_atom()?;
                        self.eat(Tok::RParen, "`)`")?;
                        first - second
                    }
                    got => return self.err(format!("expected `)`, `+` or `-`, got {got:?}")),
                };
                Ok(total)
            }
            got => self.err(format!("expected a scalar, got {got:?}")),
        }
    }

    /// One clause right-hand side: summands of `scalar * expr` or bare exprs.
    fn rhs(&mut self) -> Result<Vec<(Amplitude, Expr)>, IsoError> {
        let mut terms = Vec::new();
        let mut negate = false;
        loop {
            let scalar_ahead = matches!(
                self.peek(),
                Some(Tok::Number(_) | Tok::Imag(_) | Tok::Minus)
            ) || (matches!(self.peek(), Some(Tok::Ident(w)) if w == "sqrt"))
                || (matches!(self.peek(), Some(Tok::LParen))
                    && matches!(self.peek2(), Some(Tok::Number(_) | Tok::Imag(_))));
            let (amp, expr) = if scalar_ahead {
                let amp = self.scalar_atom()?;
                self.eat(Tok::Star, "`*`")?;
                (amp, self.expr()?)
            } else {
                (Complex64::new(1.0, 0.0), self.expr()?)
            };
            terms.push((if negate { -amp } else { amp }, expr));
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    negate = false;
                }
                Some(Tok::Minus) => {
                    self.next();
                    negate = true;
                }
                _ => break,
            }
        }
        Ok(terms)
    }

    // ---- iso definitions -------------------------------------------------

    fn clauses(&mut self) -> Result<Vec<Clause>, IsoError> {
        self.eat(Tok::LBrace, "`{`")?;
        let mut clauses = Vec::new();
        while matches!(self.peek(), Some(Tok::Bar)) {
            self.next();
            let lhs = self.pattern()?;
            self.eat(Tok::Iso, "`<->`")?;
            let rhs = self.rhs()?;
            clauses.push(Clause { lhs, rhs });
        }
        self.eat(Tok::RBrace, "`}`")?;
        Ok(clauses)
    }

    fn definition(&mut self) -> Result<(String, IsoDecl), IsoError> {
        match self.next() {
            Some(Tok::Ident(w)) if w == "iso" => {}
            got => return self.err(format!("expected `iso`, got {got:?}")),
        }
        let name = self.ident()?;
        let mut params = Vec::new();
        while matches!(self.peek(), Some(Tok::LParen))
            && matches!(self.peek2(), Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()))
        {
            // lookahead: `(name :` introduces a parameter
            let save = self.pos;
            self.next();
            let pname = self.ident()?;
            if !matches!(self.peek(), Some(Tok::Colon)) {
                self.pos = save;
                break;
            }
            self.next();
            let a = self.ty()?;
            self.eat(Tok::Iso, "`<->`")?;
            let b = self.ty()?;
            self.eat(Tok::RParen, "`)`")?;
            params.push((pname, a, b));
        }
        self.eat(Tok::Colon, "`:`")?;
        let lhs_ty = self.ty()?;
        self.eat(Tok::Iso, "`<->`")?;
        let rhs_ty = self.ty()?;

        self.params = params.iter().map(|(p, _, _)| p.clone()).collect();
        self.fix = None;

        let decl = match self.peek() {
            Some(Tok::LBrace) => {
                let clauses = self.clauses()?;
                IsoDecl::Def(Iso {
                    name: Some(name.clone()),
                    params,
                    fix: None,
                    lhs_ty,
                    rhs_ty,
                    clauses,
                })
            }
            Some(Tok::Equals) => {
                self.next();
                match self.peek() {
                    Some(Tok::Ident(w)) if w == "fix" => {
                        self.next();
                        let binder = self.ident()?;
                        self.fix = Some(binder.clone());
                        let clauses = self.clauses()?;
                        IsoDecl::Def(Iso {
                            name: Some(name.clone()),
                            params,
                            fix: Some(binder),
                            lhs_ty,
                            rhs_ty,
                            clauses,
                        })
                    }
                    _ => {
                        let base = self.ident()?;
                        let mut args = Vec::new();
                        while matches!(self.peek(), Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()))
                        {
                            args.push(self.ident()?);
                        }
                        IsoDecl::Instantiate {
                            base,
                            args,
                            lhs_ty,
                            rhs_ty,
                        }
                    }
                }
            }
            got => return self.err(format!("expected `{{` or `=`, got {got:?}")),
        };
        self.params.clear();
        self.fix = None;
        Ok((name, decl))
    }
}

/// A parsed top-level declaration.
#[derive(Debug, Clone)]
pub enum IsoDecl {
    Def(Iso),
    /// `iso name : a <-> b = base arg1 arg2`
    Instantiate {
        base: String,
        args: Vec<String>,
        lhs_ty: IsoType,
        rhs_ty: IsoType,
    },
}

/// Parse a whole iso file: named declarations in order.
pub fn parse_file(src: &str) -> Result<Vec<(String, IsoDecl)>, IsoError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params: Vec::new(),
        fix: None,
    };
    let mut defs = Vec::new();
    while p.peek().is_some() {
        defs.push(p.definition()?);
    }
    Ok(defs)
}

/// Parse one closed value literal (for `iso run --value`).
pub fn parse_value(src: &str) -> Result<Pattern, IsoError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params: Vec::new(),
        fix: None,
    };
    let pat = p.pattern()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    if !pat.is_closed() {
        return Err(IsoError::Parse {
            line: 1,
            msg: "value literals must be closed".into(),
        });
    }
    Ok(pat)
}
