//! Random well-typed program generator for the operational-safety fuzz.
//!
//! Programs are built type-directed, so every output checks by
//! construction: branches of conditionals are closed subterms, pair
//! eliminations consume both components, and duplicated functions are
//! closed values.

use rand::Rng;

use super::ast::{Span, Term, TermNode};
use crate::qnum::GateName;

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    /// Upper bound on `qinit` sites (and so on live qubits).
    pub max_qubits: usize,
    /// Recursion depth of the generator.
    pub max_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_qubits: 6,
            max_depth: 5,
        }
    }
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    qinits_left: usize,
    names: usize,
}

fn t(node: TermNode) -> Term {
    Term::new(node, Span::default())
}

fn app(f: Term, a: Term) -> Term {
    t(TermNode::App(Box::new(f), Box::new(a)))
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.names += 1;
        format!("{prefix}{}", self.names)
    }

    fn gen_qbit(&mut self, depth: usize) -> Term {
        if depth == 0 || self.qinits_left == 0 {
            // base case must still allocate; reserve guarantees at least one
            self.qinits_left = self.qinits_left.saturating_sub(1);
            return app(t(TermNode::QInit), t(TermNode::Bool(self.rng.random())));
        }
        match self.rng.random_range(0..10u32) {
            0..=2 => {
                self.qinits_left -= 1;
                app(t(TermNode::QInit), t(TermNode::Bool(self.rng.random())))
            }
            3..=5 => {
                let g = match self.rng.random_range(0..5u32) {
                    0 => GateName::H,
                    1 => GateName::X,
                    2 => GateName::Z,
                    3 => GateName::S,
                    _ => GateName::T,
                };
                app(t(TermNode::Gate(g)), self.gen_qbit(depth - 1))
            }
            6 => {
                // beta redex around a qubit
                let x = self.fresh("x");
                app(
                    t(TermNode::Lam(
                        x.clone(),
                        Box::new(app(t(TermNode::Gate(GateName::H)), t(TermNode::Var(x)))),
                    )),
                    self.gen_qbit(depth - 1),
                )
            }
            7 => t(TermNode::If(
                Box::new(self.gen_bit(depth - 1)),
                Box::new(self.gen_qbit(depth - 1)),
                Box::new(self.gen_qbit(depth - 1)),
            )),
            8 if self.qinits_left >= 2 => {
                // let (a, b) = CNOT (q, q') in if meas a then b else H b
                let a = self.fresh("a");
                let b = self.fresh("b");
                let pair = t(TermNode::Pair(
                    Box::new(self.gen_qbit(depth - 1)),
                    Box::new(self.gen_qbit(depth - 1)),
                ));
                t(TermNode::LetPair(
                    a.clone(),
                    b.clone(),
                    Box::new(app(t(TermNode::Gate(GateName::Cnot)), pair)),
                    Box::new(t(TermNode::If(
                        Box::new(app(t(TermNode::Meas), t(TermNode::Var(a)))),
                        Box::new(t(TermNode::Var(b.clone()))),
                        Box::new(app(t(TermNode::Gate(GateName::H)), t(TermNode::Var(b)))),
                    ))),
                ))
            }
            _ => {
                // unbox (box (fun x -> U x)) applied to a qubit
                let x = self.fresh("x");
                let g = if self.rng.random() {
                    GateName::H
                } else {
                    GateName::X
                };
                let boxed = app(
                    t(TermNode::BoxC),
                    t(TermNode::Lam(
                        x.clone(),
                        Box::new(app(t(TermNode::Gate(g)), t(TermNode::Var(x)))),
                    )),
                );
                app(app(t(TermNode::Unbox), boxed), self.gen_qbit(depth - 1))
            }
        }
    }

    fn gen_bit(&mut self, depth: usize) -> Term {
        if depth == 0 {
            return t(TermNode::Bool(self.rng.random()));
        }
        match self.rng.random_range(0..8u32) {
            0..=2 => t(TermNode::Bool(self.rng.random())),
            3..=4 if self.qinits_left > 0 => {
                app(t(TermNode::Meas), self.gen_qbit(depth - 1))
            }
            5 => t(TermNode::If(
                Box::new(self.gen_bit(depth - 1)),
                Box::new(self.gen_bit(depth - 1)),
                Box::new(self.gen_bit(depth - 1)),
            )),
            6 => {
                // terminating recursion: f ff -> f tt -> ff
                let f = self.fresh("f");
                let x = self.fresh("x");
                t(TermNode::LetRec(
                    f.clone(),
                    x.clone(),
                    Box::new(t(TermNode::If(
                        Box::new(t(TermNode::Var(x))),
                        Box::new(t(TermNode::Bool(false))),
                        Box::new(app(t(TermNode::Var(f.clone())), t(TermNode::Bool(true)))),
                    ))),
                    Box::new(app(t(TermNode::Var(f)), self.gen_bit(depth - 1))),
                ))
            }
            _ => {
                let u = self.fresh("u");
                let body = t(TermNode::LetUnit(
                    Box::new(t(TermNode::Var(u.clone()))),
                    Box::new(self.gen_bit(depth - 1)),
                ));
                app(t(TermNode::Lam(u, Box::new(body))), t(TermNode::Unit))
            }
        }
    }

    fn gen_top(&mut self, depth: usize) -> Term {
        match self.rng.random_range(0..4u32) {
            0 => self.gen_bit(depth),
            1 => self.gen_qbit(depth),
            2 => t(TermNode::Pair(
                Box::new(self.gen_bit(depth - 1)),
                Box::new(self.gen_qbit(depth - 1)),
            )),
            _ => {
                // duplicable thunk used twice
                let f = self.fresh("f");
                let u = self.fresh("u");
                let thunk = t(TermNode::Lam(
                    u.clone(),
                    Box::new(t(TermNode::LetUnit(
                        Box::new(t(TermNode::Var(u))),
                        Box::new(app(
                            t(TermNode::Gate(GateName::H)),
                            app(t(TermNode::QInit), t(TermNode::Bool(false))),
                        )),
                    ))),
                ));
                self.qinits_left = self.qinits_left.saturating_sub(2);
                app(
                    t(TermNode::Lam(
                        f.clone(),
                        Box::new(t(TermNode::Pair(
                            Box::new(app(t(TermNode::Var(f.clone())), t(TermNode::Unit))),
                            Box::new(app(t(TermNode::Var(f)), t(TermNode::Unit))),
                        ))),
                    )),
                    thunk,
                )
            }
        }
    }
}

/// Generate one random closed well-typed term.
pub fn random_term(rng: &mut impl Rng, config: GenConfig) -> Term {
    let mut g = Gen {
        rng,
        qinits_left: config.max_qubits,
        names: 0,
    };
    let depth = 1 + g.rng.random_range(0..config.max_depth as u32) as usize;
    g.gen_top(depth)
}
