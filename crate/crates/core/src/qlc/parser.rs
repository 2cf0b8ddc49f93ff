//! Recursive-descent parser for the concrete term syntax.
//!
//! Keywords: `fun`/`lambda`, `let`, `rec`, `in`, `if`/`then`/`else`, `tt`,
//! `ff`, `qinit`, `meas`, `box`, `unbox`, `letrec`. Application is
//! left-associative and binds tighter than a lambda body. Pairs are written
//! `(M, N)`, unit is `()`, and the non-parametric gate constants are the
//! uppercase names `H X NOT Z S T CNOT SWAP TOFFOLI`.

use super::ast::{Span, Term, TermNode};
use super::QlcError;
use crate::qnum::GateName;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Arrow,
    Equals,
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, QlcError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let span = Span { line, col };
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                // comment to end of line
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                toks.push((Tok::LParen, span));
            }
            ')' => {
                chars.next();
                col += 1;
                toks.push((Tok::RParen, span));
            }
            ',' => {
                chars.next();
                col += 1;
                toks.push((Tok::Comma, span));
            }
            '=' => {
                chars.next();
                col += 1;
                toks.push((Tok::Equals, span));
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    toks.push((Tok::Arrow, span));
                } else {
                    return Err(QlcError::Parse {
                        span,
                        msg: "expected `->`".into(),
                    });
                }
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        word.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(word), span));
            }
            other => {
                return Err(QlcError::Parse {
                    span,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

const KEYWORDS: &[&str] = &[
    "fun", "lambda", "let", "rec", "in", "if", "then", "else", "tt", "ff", "qinit", "meas",
    "box", "unbox", "letrec",
];

impl Parser {
    fn peek(&self) -> Option<&(Tok, Span)> {
        self.toks.get(self.pos)
    }

    fn span(&self) -> Span {
        self.peek()
            .map(|(_, s)| *s)
            .or_else(|| self.toks.last().map(|(_, s)| *s))
            .unwrap_or_default()
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok, what: &str) -> Result<Span, QlcError> {
        match self.next() {
            Some((t, s)) if &t == tok => Ok(s),
            Some((t, s)) => Err(QlcError::Parse {
                span: s,
                msg: format!("expected {what}, got {t:?}"),
            }),
            None => Err(QlcError::Parse {
                span: self.span(),
                msg: format!("expected {what}, got end of input"),
            }),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<Span, QlcError> {
        match self.next() {
            Some((Tok::Ident(w), s)) if w == kw => Ok(s),
            Some((t, s)) => Err(QlcError::Parse {
                span: s,
                msg: format!("expected `{kw}`, got {t:?}"),
            }),
            None => Err(QlcError::Parse {
                span: self.span(),
                msg: format!("expected `{kw}`, got end of input"),
            }),
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some((Tok::Ident(w), _)) if w == kw)
    }

    fn eat_binder(&mut self) -> Result<(String, Span), QlcError> {
        match self.next() {
            Some((Tok::Ident(w), s)) => {
                if KEYWORDS.contains(&w.as_str()) || gate_of(&w).is_some() {
                    Err(QlcError::Parse {
                        span: s,
                        msg: format!("`{w}` cannot be used as a variable"),
                    })
                } else {
                    Ok((w, s))
                }
            }
            Some((t, s)) => Err(QlcError::Parse {
                span: s,
                msg: format!("expected a variable name, got {t:?}"),
            }),
            None => Err(QlcError::Parse {
                span: self.span(),
                msg: "expected a variable name, got end of input".into(),
            }),
        }
    }

    fn term(&mut self) -> Result<Term, QlcError> {
        match self.peek() {
            Some((Tok::Ident(w), span)) => {
                let span = *span;
                match w.as_str() {
                    "fun" | "lambda" => {
                        self.next();
                        let mut binders = Vec::new();
                        loop {
                            binders.push(self.eat_binder()?.0);
                            if matches!(self.peek(), Some((Tok::Arrow, _))) {
                                break;
                            }
                        }
                        self.eat(&Tok::Arrow, "`->`")?;
                        let mut body = self.term()?;
                        for b in binders.into_iter().rev() {
                            body = Term::new(TermNode::Lam(b, Box::new(body)), span);
                        }
                        Ok(body)
                    }
                    "letrec" => {
                        self.next();
                        self.letrec_tail(span)
                    }
                    "let" => {
                        self.next();
                        if self.peek_keyword("rec") {
                            self.next();
                            return self.letrec_tail(span);
                        }
                        self.eat(&Tok::LParen, "`(`")?;
                        if matches!(self.peek(), Some((Tok::RParen, _))) {
                            self.next();
                            self.eat(&Tok::Equals, "`=`")?;
                            let scrutinee = self.term()?;
                            self.eat_keyword("in")?;
                            let body = self.term()?;
                            Ok(Term::new(
                                TermNode::LetUnit(Box::new(scrutinee), Box::new(body)),
                                span,
                            ))
                        } else {
                            let (x, _) = self.eat_binder()?;
                            self.eat(&Tok::Comma, "`,`")?;
                            let (y, _) = self.eat_binder()?;
                            self.eat(&Tok::RParen, "`)`")?;
                            self.eat(&Tok::Equals, "`=`")?;
                            let scrutinee = self.term()?;
                            self.eat_keyword("in")?;
                            let body = self.term()?;
                            Ok(Term::new(
                                TermNode::LetPair(x, y, Box::new(scrutinee), Box::new(body)),
                                span,
                            ))
                        }
                    }
                    "if" => {
                        self.next();
                        let cond = self.term()?;
                        self.eat_keyword("then")?;
                        let then = self.term()?;
                        self.eat_keyword("else")?;
                        let els = self.term()?;
                        Ok(Term::new(
                            TermNode::If(Box::new(cond), Box::new(then), Box::new(els)),
                            span,
                        ))
                    }
                    _ => self.app(),
                }
            }
            _ => self.app(),
        }
    }

    fn letrec_tail(&mut self, span: Span) -> Result<Term, QlcError> {
        let (f, _) = self.eat_binder()?;
        let (x, _) = self.eat_binder()?;
        self.eat(&Tok::Equals, "`=`")?;
        let body = self.term()?;
        self.eat_keyword("in")?;
        let rest = self.term()?;
        Ok(Term::new(
            TermNode::LetRec(f, x, Box::new(body), Box::new(rest)),
            span,
        ))
    }

    fn app(&mut self) -> Result<Term, QlcError> {
        let mut head = self.atom()?;
        while self.starts_atom() {
            let span = head.span;
            let arg = self.atom()?;
            head = Term::new(TermNode::App(Box::new(head), Box::new(arg)), span);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some((Tok::LParen, _)) => true,
            Some((Tok::Ident(w), _)) => !matches!(
                w.as_str(),
                "in" | "then" | "else" | "rec" | "fun" | "lambda" | "let" | "letrec" | "if"
            ),
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<Term, QlcError> {
        match self.next() {
            Some((Tok::LParen, span)) => {
                if matches!(self.peek(), Some((Tok::RParen, _))) {
                    self.next();
                    return Ok(Term::new(TermNode::Unit, span));
                }
                let first = self.term()?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(first),
                    Some((Tok::Comma, _)) => {
                        let second = self.term()?;
                        self.eat(&Tok::RParen, "`)`")?;
                        Ok(Term::new(
                            TermNode::Pair(Box::new(first), Box::new(second)),
                            span,
                        ))
                    }
                    Some((t, s)) => Err(QlcError::Parse {
                        span: s,
                        msg: format!("expected `)` or `,`, got {t:?}"),
                    }),
                    None => Err(QlcError::Parse {
                        span,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            Some((Tok::Ident(w), span)) => {
                let node = match w.as_str() {
                    "tt" => TermNode::Bool(true),
                    "ff" => TermNode::Bool(false),
                    "qinit" => TermNode::QInit,
                    "meas" => TermNode::Meas,
                    "box" => TermNode::BoxC,
                    "unbox" => TermNode::Unbox,
                    other => {
                        if let Some(g) = gate_of(other) {
                            TermNode::Gate(g)
                        } else if KEYWORDS.contains(&other) {
                            return Err(QlcError::Parse {
                                span,
                                msg: format!("keyword `{other}` is not a term here"),
                            });
                        } else {
                            TermNode::Var(w)
                        }
                    }
                };
                Ok(Term::new(node, span))
            }
            Some((t, s)) => Err(QlcError::Parse {
                span: s,
                msg: format!("expected a term, got {t:?}"),
            }),
            None => Err(QlcError::Parse {
                span: self.span(),
                msg: "expected a term, got end of input".into(),
            }),
        }
    }
}

/// Non-parametric gate constants available in source programs.
fn gate_of(name: &str) -> Option<GateName> {
    match name {
        "H" => Some(GateName::H),
        "X" => Some(GateName::X),
        "NOT" => Some(GateName::Not),
        "Z" => Some(GateName::Z),
        "S" => Some(GateName::S),
        "T" => Some(GateName::T),
        "CNOT" => Some(GateName::Cnot),
        "SWAP" => Some(GateName::Swap),
        "TOFFOLI" => Some(GateName::Toffoli),
        _ => None,
    }
}

/// Parse a source string into an untyped term.
pub fn parse(src: &str) -> Result<Term, QlcError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if let Some((tok, span)) = p.peek() {
        return Err(QlcError::Parse {
            span: *span,
            msg: format!("unexpected trailing input {tok:?}"),
        });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_function() {
        let t = parse("fun x -> x").unwrap();
        match t.node {
            TermNode::Lam(x, body) => {
                assert_eq!(x, "x");
                assert_eq!(body.node, TermNode::Var("x".into()));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn coin_is_application_spine() {
        let t = parse("meas (H (qinit ff))").unwrap();
        // meas applied to (H applied to (qinit ff))
        match t.node {
            TermNode::App(f, arg) => {
                assert_eq!(f.node, TermNode::Meas);
                match arg.node {
                    TermNode::App(g, inner) => {
                        assert_eq!(g.node, TermNode::Gate(GateName::H));
                        match inner.node {
                            TermNode::App(q, b) => {
                                assert_eq!(q.node, TermNode::QInit);
                                assert_eq!(b.node, TermNode::Bool(false));
                            }
                            _ => panic!(),
                        }
                    }
                    _ => panic!(),
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn example_d7_shape() {
        let t = parse("fun x -> let () = x in H (qinit ff)").unwrap();
        match t.node {
            TermNode::Lam(_, body) => assert!(matches!(body.node, TermNode::LetUnit(_, _))),
            _ => panic!(),
        }
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse("f a b").unwrap();
        match t.node {
            TermNode::App(fa, b) => {
                assert_eq!(b.node, TermNode::Var("b".into()));
                assert!(matches!(fa.node, TermNode::App(_, _)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn lambda_body_extends_right() {
        // fun x -> f x parses as fun x -> (f x)
        let t = parse("fun x -> f x").unwrap();
        match t.node {
            TermNode::Lam(_, body) => assert!(matches!(body.node, TermNode::App(_, _))),
            _ => panic!(),
        }
    }

    #[test]
    fn pairs_and_let_pair() {
        let t = parse("let (a, b) = CNOT (x, y) in (b, a)").unwrap();
        assert!(matches!(t.node, TermNode::LetPair(_, _, _, _)));
    }

    #[test]
    fn letrec_both_spellings() {
        let a = parse("letrec f x = f x in f tt").unwrap();
        let b = parse("let rec f x = f x in f tt").unwrap();
        match (&a.node, &b.node) {
            (TermNode::LetRec(f1, x1, m1, n1), TermNode::LetRec(f2, x2, m2, n2)) => {
                assert_eq!((f1, x1), (f2, x2));
                assert!(matches!(m1.node, TermNode::App(_, _)));
                assert_eq!(format!("{:?}", strip_spans(m1)), format!("{:?}", strip_spans(m2)));
                assert_eq!(format!("{:?}", strip_spans(n1)), format!("{:?}", strip_spans(n2)));
            }
            _ => panic!("both must parse to letrec"),
        }
    }

    fn strip_spans(t: &Term) -> Term {
        let node = match &t.node {
            TermNode::App(a, b) => {
                TermNode::App(Box::new(strip_spans(a)), Box::new(strip_spans(b)))
            }
            other => other.clone(),
        };
        Term::new(node, Span::default())
    }

    #[test]
    fn multi_binder_fun_desugars() {
        let t = parse("fun x y -> (x, y)").unwrap();
        match t.node {
            TermNode::Lam(x, body) => {
                assert_eq!(x, "x");
                assert!(matches!(body.node, TermNode::Lam(_, _)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("fun x ->").unwrap_err();
        match err {
            QlcError::Parse { span, .. } => assert_eq!(span.line, 1),
            _ => panic!(),
        }
        assert!(parse("fun -> x").is_err());
        assert!(parse("(a, b").is_err());
        assert!(parse("let tt = x in x").is_err());
    }
}
