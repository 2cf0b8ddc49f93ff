//! Concrete syntax for Boolean functional programs; mirrors the lambda
//! calculus syntax with `and`/`not` constants.

use super::ast::BTerm;
use super::OracleError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Arrow,
    Equals,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, OracleError> {
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
            ',' => {
                chars.next();
                toks.push((Tok::Comma, line));
            }
            '=' => {
                chars.next();
                toks.push((Tok::Equals, line));
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    toks.push((Tok::Arrow, line));
                } else {
                    return Err(OracleError::Parse {
                        line,
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
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(word), line));
            }
            other => {
                return Err(OracleError::Parse {
                    line,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

const KEYWORDS: &[&str] = &[
    "fun", "lambda", "let", "rec", "in", "if", "then", "else", "tt", "ff", "not", "and",
    "letrec",
];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<(), OracleError> {
        let line = self.line();
        match self.next() {
            Some(t) if t == tok => Ok(()),
            got => Err(OracleError::Parse {
                line,
                msg: format!("expected {what}, got {got:?}"),
            }),
        }
    }

    fn eat_kw(&mut self, kw: &str) -> Result<(), OracleError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Ident(w)) if w == kw => Ok(()),
            got => Err(OracleError::Parse {
                line,
                msg: format!("expected `{kw}`, got {got:?}"),
            }),
        }
    }

    fn binder(&mut self) -> Result<String, OracleError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => Ok(w),
            got => Err(OracleError::Parse {
                line,
                msg: format!("expected a variable name, got {got:?}"),
            }),
        }
    }

    fn term(&mut self) -> Result<BTerm, OracleError> {
        match self.peek() {
            Some(Tok::Ident(w)) => match w.as_str() {
                "fun" | "lambda" => {
                    self.next();
                    let mut binders = Vec::new();
                    loop {
                        binders.push(self.binder()?);
                        if matches!(self.peek(), Some(Tok::Arrow)) {
                            break;
                        }
                    }
                    self.eat(Tok::Arrow, "`->`")?;
                    let mut body = self.term()?;
                    for b in binders.into_iter().rev() {
                        body = BTerm::lam(&b, body);
                    }
                    Ok(body)
                }
                "letrec" => {
                    self.next();
                    self.letrec_tail()
                }
                "let" => {
                    self.next();
                    if matches!(self.peek(), Some(Tok::Ident(w)) if w == "rec") {
                        self.next();
                        return self.letrec_tail();
                    }
                    self.eat(Tok::LParen, "`(`")?;
                    let x = self.binder()?;
                    self.eat(Tok::Comma, "`,`")?;
                    let y = self.binder()?;
                    self.eat(Tok::RParen, "`)`")?;
                    self.eat(Tok::Equals, "`=`")?;
                    let scrutinee = self.term()?;
                    self.eat_kw("in")?;
                    let body = self.term()?;
                    Ok(BTerm::LetPair(
                        x,
                        y,
                        Box::new(scrutinee),
                        Box::new(body),
                    ))
                }
                "if" => {
                    self.next();
                    let c = self.term()?;
                    self.eat_kw("then")?;
                    let t = self.term()?;
                    self.eat_kw("else")?;
                    let e = self.term()?;
                    Ok(BTerm::If(Box::new(c), Box::new(t), Box::new(e)))
                }
                _ => self.app(),
            },
            _ => self.app(),
        }
    }

    fn letrec_tail(&mut self) -> Result<BTerm, OracleError> {
        let f = self.binder()?;
        let x = self.binder()?;
        self.eat(Tok::Equals, "`=`")?;
        let body = self.term()?;
        self.eat_kw("in")?;
        let rest = self.term()?;
        Ok(BTerm::LetRec(f, x, Box::new(body), Box::new(rest)))
    }

    fn app(&mut self) -> Result<BTerm, OracleError> {
        let mut head = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = BTerm::app(head, arg);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::LParen) => true,
            Some(Tok::Ident(w)) => !matches!(
                w.as_str(),
                "in" | "then" | "else" | "rec" | "fun" | "lambda" | "let" | "letrec" | "if"
            ),
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<BTerm, OracleError> {
        let line = self.line();
        match self.next() {
            Some(Tok::LParen) => {
                let first = self.term()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(first),
                    Some(Tok::Comma) => {
                        let second = self.term()?;
                        self.eat(Tok::RParen, "`)`")?;
                        Ok(BTerm::Pair(Box::new(first), Box::new(second)))
                    }
                    got => Err(OracleError::Parse {
                        line,
                        msg: format!("expected `)` or `,`, got {got:?}"),
                    }),
                }
            }
            Some(Tok::Ident(w)) => Ok(match w.as_str() {
                "tt" => BTerm::Bool(true),
                "ff" => BTerm::Bool(false),
                "not" => BTerm::Not,
                "and" => BTerm::And,
                other if KEYWORDS.contains(&other) => {
                    return Err(OracleError::Parse {
                        line,
                        msg: format!("keyword `{other}` is not a term here"),
                    })
                }
                _ => BTerm::Var(w),
            }),
            got => Err(OracleError::Parse {
                line,
                msg: format!("expected a term, got {got:?}"),
            }),
        }
    }
}

pub fn parse_bool(src: &str) -> Result<BTerm, OracleError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(OracleError::Parse {
            line: p.line(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(t)
}
