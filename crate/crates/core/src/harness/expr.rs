//! Parser, optimizer and evaluator for the expression generator's language,
//! with three seeded faults.

use super::{hit, Fault, Sut, Verdict};
use crate::generators::expr::OPERATORS;

/// Values outside `[-BOUND, BOUND]` make an evaluation invalid.
pub const BOUND: i64 = 1_000_000;
/// Binding depth at which the seeded nesting fault fires.
pub const NESTING_LIMIT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExprFault {
    /// Division whose divisor is the literal `0` reaches the raw division.
    DivByLiteralZero,
    /// The environment overflows once `NESTING_LIMIT` bindings are live.
    LetNestingOverflow,
    /// The optimizer's rewrite of `(_ * (_ - (_ % _)))` is broken.
    MulSubModPattern,
}

impl ExprFault {
    pub const ALL: [ExprFault; 3] = [
        ExprFault::DivByLiteralZero,
        ExprFault::LetNestingOverflow,
        ExprFault::MulSubModPattern,
    ];

    pub fn site(self) -> &'static str {
        match self {
            ExprFault::DivByLiteralZero => "expr_eval::div_by_literal_zero",
            ExprFault::LetNestingOverflow => "expr_eval::let_nesting_overflow",
            ExprFault::MulSubModPattern => "expr_eval::mul_sub_mod_pattern",
        }
    }

    pub fn from_site(site: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.site() == site)
    }
}

#[derive(Debug, Clone)]
pub struct ExprEval {
    pub faults: Vec<ExprFault>,
}

impl Default for ExprEval {
    fn default() -> Self {
        Self {
            faults: ExprFault::ALL.to_vec(),
        }
    }
}

impl ExprEval {
    pub fn without_faults() -> Self {
        Self { faults: Vec::new() }
    }

    fn armed(&self, fault: ExprFault) -> bool {
        self.faults.contains(&fault)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    Lit(i64),
    Var(usize),
    Bin(char, Box<Expr>, Box<Expr>),
    Let(usize, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn type_index(&self) -> u32 {
        match self {
            Expr::Lit(_) => 0,
            Expr::Var(_) => 1,
            Expr::Bin(..) => 2,
            Expr::Let(..) => 3,
        }
    }

    fn op_index(&self) -> Option<u32> {
        match self {
            Expr::Bin(op, ..) => OPERATORS.iter().position(|o| o == op).map(|i| i as u32),
            _ => None,
        }
    }
}

enum Stop {
    Invalid,
    Fault(ExprFault),
}

impl Sut for ExprEval {
    fn name(&self) -> &str {
        "expr_eval"
    }

    fn execute(&self, input: &[u8]) -> Result<Verdict, Fault> {
        let Some(expr) = parse(input) else {
            hit(2);
            return Ok(Verdict::Invalid);
        };
        hit(1);
        visit(&expr, 0);
        let outcome = self.optimize(&expr).and_then(|()| self.eval(&expr, &mut Vec::new()));
        let value = match outcome {
            Ok(v) => v,
            Err(Stop::Invalid) => return Ok(Verdict::Invalid),
            Err(Stop::Fault(f)) => return Err(Fault::at(f.site())),
        };
        if !bindings_used(&expr) {
            hit(90);
            return Ok(Verdict::Invalid);
        }
        hit(91);
        hit(95 + value.signum().wrapping_add(1) as u32);
        let magnitude = value.unsigned_abs().checked_ilog10().map_or(0, |l| l + 1);
        hit(100 + magnitude.min(7));
        Ok(Verdict::Valid)
    }
}

fn visit(expr: &Expr, depth: u32) {
    hit(10 + expr.type_index() * 8 + depth.min(7));
    match expr {
        Expr::Bin(_, l, r) | Expr::Let(_, l, r) => {
            visit(l, depth + 1);
            visit(r, depth + 1);
        }
        _ => {}
    }
}

impl ExprEval {
    /// Peephole pass over binary-operator pairs.
    fn optimize(&self, expr: &Expr) -> Result<(), Stop> {
        match expr {
            Expr::Bin(op, l, r) => {
                let parent = expr.op_index().unwrap_or(0);
                for (side, child) in [(0, l), (1, r)] {
                    if let Some(c) = child.op_index() {
                        hit(200 + parent * 10 + c * 2 + side);
                    }
                }
                if *op == '*' {
                    if let Expr::Bin('-', _, inner) = r.as_ref() {
                        hit(250);
                        if matches!(inner.as_ref(), Expr::Bin('%', ..)) {
                            hit(251);
                            if self.armed(ExprFault::MulSubModPattern) {
                                return Err(Stop::Fault(ExprFault::MulSubModPattern));
                            }
                        }
                    }
                }
                self.optimize(l)?;
                self.optimize(r)
            }
            Expr::Let(_, bound, body) => {
                self.optimize(bound)?;
                self.optimize(body)
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, expr: &Expr, env: &mut Vec<i64>) -> Result<i64, Stop> {
        match expr {
            Expr::Lit(v) => Ok(*v),
            Expr::Var(idx) => match env.get(*idx) {
                Some(v) => {
                    hit(70 + (*idx).min(5) as u32);
                    Ok(*v)
                }
                None => {
                    hit(76);
                    Err(Stop::Invalid)
                }
            },
            Expr::Let(name, bound, body) => {
                if *name != env.len() {
                    hit(77);
                    return Err(Stop::Invalid);
                }
                let value = self.eval(bound, env)?;
                hit(80 + env.len().min(5) as u32);
                env.push(value);
                if env.len() >= NESTING_LIMIT && self.armed(ExprFault::LetNestingOverflow) {
                    return Err(Stop::Fault(ExprFault::LetNestingOverflow));
                }
                let result = self.eval(body, env);
                env.pop();
                result
            }
            Expr::Bin(op, l, r) => {
                let a = self.eval(l, env)?;
                let b = self.eval(r, env)?;
                let result = match op {
                    '+' => Some(a + b),
                    '-' => Some(a - b),
                    '*' => a.checked_mul(b),
                    '/' | '%' if b == 0 => {
                        if *op == '/' && **r == Expr::Lit(0) && self.armed(ExprFault::DivByLiteralZero) {
                            return Err(Stop::Fault(ExprFault::DivByLiteralZero));
                        }
                        hit(if *op == '/' { 66 } else { 67 });
                        return Err(Stop::Invalid);
                    }
                    '/' => Some(a / b),
                    '%' => Some(a % b),
                    _ => None,
                };
                let op_idx = expr.op_index().unwrap_or(0);
                match result {
                    Some(v) if v.abs() <= BOUND => {
                        hit(50 + op_idx * 3 + v.signum().wrapping_add(1) as u32);
                        Ok(v)
                    }
                    _ => {
                        hit(65);
                        Err(Stop::Invalid)
                    }
                }
            }
        }
    }
}

/// Every `let` binding is referenced somewhere in its body.
fn bindings_used(expr: &Expr) -> bool {
    match expr {
        Expr::Lit(_) | Expr::Var(_) => true,
        Expr::Bin(_, l, r) => bindings_used(l) && bindings_used(r),
        Expr::Let(name, bound, body) => {
            references(body, *name) && bindings_used(bound) && bindings_used(body)
        }
    }
}

fn references(expr: &Expr, var: usize) -> bool {
    match expr {
        Expr::Lit(_) => false,
        Expr::Var(v) => *v == var,
        Expr::Bin(_, l, r) | Expr::Let(_, l, r) => references(l, var) || references(r, var),
    }
}

fn parse(input: &[u8]) -> Option<Expr> {
    let mut p = ExprParser { s: input, pos: 0 };
    let e = p.expr(0)?;
    (p.pos == input.len()).then_some(e)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    const MAX_NESTING: u32 = 64;

    fn eat(&mut self, lit: &[u8]) -> Option<()> {
        if self.s[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Some(())
        } else {
            None
        }
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos || self.pos - start > 9 {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn expr(&mut self, nesting: u32) -> Option<Expr> {
        if nesting > Self::MAX_NESTING {
            return None;
        }
        match self.s.get(self.pos)? {
            b'v' => {
                self.pos += 1;
                Some(Expr::Var(self.number()? as usize))
            }
            b'(' => {
                self.pos += 1;
                if self.eat(b"let v").is_some() {
                    let name = self.number()? as usize;
                    self.eat(b"=")?;
                    let bound = self.expr(nesting + 1)?;
                    self.eat(b" in ")?;
                    let body = self.expr(nesting + 1)?;
                    self.eat(b")")?;
                    return Some(Expr::Let(name, Box::new(bound), Box::new(body)));
                }
                let lhs = self.expr(nesting + 1)?;
                let op = *self.s.get(self.pos)? as char;
                if !OPERATORS.contains(&op) {
                    return None;
                }
                self.pos += 1;
                let rhs = self.expr(nesting + 1)?;
                self.eat(b")")?;
                Some(Expr::Bin(op, Box::new(lhs), Box::new(rhs)))
            }
            _ => Some(Expr::Lit(self.number()?)),
        }
    }
}
