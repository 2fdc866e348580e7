use std::collections::BTreeMap;
use std::sync::Arc;

use super::{ArithOp, BExpr, CmpOp, Expr, LangError, Program};
use crate::relalg::{Predicate, Relation, StateSpace, Value};

/// Named programs available to `@name` references.
pub type Definitions = BTreeMap<String, Program>;

/// Replaces every `@name` with its definition, rejecting cyclic references.
pub fn resolve(program: &Program, defs: &Definitions) -> Result<Program, LangError> {
    fn go(p: &Program, defs: &Definitions, stack: &mut Vec<String>) -> Result<Program, LangError> {
        Ok(match p {
            Program::Ref(name) => {
                if let Some(start) = stack.iter().position(|n| n == name) {
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(name.clone());
                    return Err(LangError::CyclicReference(cycle));
                }
                let body = defs
                    .get(name)
                    .ok_or_else(|| LangError::UnknownProgram(name.clone()))?;
                stack.push(name.clone());
                let out = go(body, defs, stack)?;
                stack.pop();
                out
            }
            Program::Skip | Program::Diverge | Program::Assign(..) | Program::Assume(_) => {
                p.clone()
            }
            Program::Seq(a, b) => Program::seq(go(a, defs, stack)?, go(b, defs, stack)?),
            Program::Choice(a, b) => Program::choice(go(a, defs, stack)?, go(b, defs, stack)?),
            Program::Star(a) => Program::star(go(a, defs, stack)?),
            Program::If(g, a, b) => Program::If(
                g.clone(),
                Box::new(go(a, defs, stack)?),
                Box::new(go(b, defs, stack)?),
            ),
            Program::While(g, b) => Program::While(g.clone(), Box::new(go(b, defs, stack)?)),
        })
    }
    go(program, defs, &mut Vec::new())
}

fn check_expr(e: &Expr, space: &StateSpace) -> Result<(), LangError> {
    match e {
        Expr::Int(_) => Ok(()),
        Expr::Name(x) if space.var_index(x).is_some() || space.has_symbol(x) => Ok(()),
        Expr::Name(x) => Err(LangError::UnknownIdentifier(x.clone())),
        Expr::Neg(a) => check_expr(a, space),
        Expr::Arith(_, a, b) => {
            check_expr(a, space)?;
            check_expr(b, space)
        }
    }
}

fn check_bexpr(b: &BExpr, space: &StateSpace) -> Result<(), LangError> {
    match b {
        BExpr::True | BExpr::False => Ok(()),
        BExpr::Cmp(_, x, y) => {
            check_expr(x, space)?;
            check_expr(y, space)
        }
        BExpr::Not(a) => check_bexpr(a, space),
        BExpr::And(a, c) | BExpr::Or(a, c) => {
            check_bexpr(a, space)?;
            check_bexpr(c, space)
        }
    }
}

fn check_program(p: &Program, space: &StateSpace) -> Result<(), LangError> {
    match p {
        Program::Skip | Program::Diverge => Ok(()),
        Program::Ref(name) => Err(LangError::UnknownProgram(name.clone())),
        Program::Assign(x, e) => {
            if space.var_index(x).is_none() {
                return Err(LangError::UnknownIdentifier(x.clone()));
            }
            check_expr(e, space)
        }
        Program::Assume(b) => check_bexpr(b, space),
        Program::Seq(a, b) | Program::Choice(a, b) => {
            check_program(a, space)?;
            check_program(b, space)
        }
        Program::Star(a) => check_program(a, space),
        Program::If(g, a, b) => {
            check_bexpr(g, space)?;
            check_program(a, space)?;
            check_program(b, space)
        }
        Program::While(g, b) => {
            check_bexpr(g, space)?;
            check_program(b, space)
        }
    }
}

fn mismatch(e: &dyn std::fmt::Display, message: impl Into<String>) -> LangError {
    LangError::TypeMismatch {
        expr: e.to_string(),
        message: message.into(),
    }
}

fn eval_expr(e: &Expr, space: &StateSpace, state: usize) -> Result<Value, LangError> {
    match e {
        Expr::Int(n) => Ok(Value::Int(*n)),
        Expr::Name(x) => match space.var_index(x) {
            Some(v) => Ok(space.value(state, v).clone()),
            None if space.has_symbol(x) => Ok(Value::Sym(x.clone())),
            None => Err(LangError::UnknownIdentifier(x.clone())),
        },
        Expr::Neg(a) => match eval_expr(a, space, state)? {
            Value::Int(n) => n
                .checked_neg()
                .map(Value::Int)
                .ok_or_else(|| mismatch(e, "arithmetic overflow")),
            Value::Sym(s) => Err(mismatch(e, format!("cannot negate symbol `{s}`"))),
        },
        Expr::Arith(op, a, b) => {
            let (x, y) = match (eval_expr(a, space, state)?, eval_expr(b, space, state)?) {
                (Value::Int(x), Value::Int(y)) => (x, y),
                (x, y) => return Err(mismatch(e, format!("arithmetic on `{x}` and `{y}`"))),
            };
            if y == 0 && matches!(op, ArithOp::Div | ArithOp::Mod) {
                return Err(LangError::DivisionByZero {
                    expr: e.to_string(),
                    state: space.describe(state),
                });
            }
            let r = match op {
                ArithOp::Add => x.checked_add(y),
                ArithOp::Sub => x.checked_sub(y),
                ArithOp::Mul => x.checked_mul(y),
                ArithOp::Div => x.checked_div_euclid(y),
                ArithOp::Mod => x.checked_rem_euclid(y),
            };
            r.map(Value::Int)
                .ok_or_else(|| mismatch(e, "arithmetic overflow"))
        }
    }
}

fn eval_bexpr(b: &BExpr, space: &StateSpace, state: usize) -> Result<bool, LangError> {
    match b {
        BExpr::True => Ok(true),
        BExpr::False => Ok(false),
        BExpr::Not(a) => Ok(!eval_bexpr(a, space, state)?),
        BExpr::And(a, c) => Ok(eval_bexpr(a, space, state)? && eval_bexpr(c, space, state)?),
        BExpr::Or(a, c) => Ok(eval_bexpr(a, space, state)? || eval_bexpr(c, space, state)?),
        BExpr::Cmp(op, x, y) => {
            let (vx, vy) = (eval_expr(x, space, state)?, eval_expr(y, space, state)?);
            match (op, &vx, &vy) {
                (CmpOp::Eq, Value::Int(_), Value::Int(_))
                | (CmpOp::Eq, Value::Sym(_), Value::Sym(_)) => Ok(vx == vy),
                (CmpOp::Ne, Value::Int(_), Value::Int(_))
                | (CmpOp::Ne, Value::Sym(_), Value::Sym(_)) => Ok(vx != vy),
                (_, Value::Int(i), Value::Int(j)) => Ok(match op {
                    CmpOp::Lt => i < j,
                    CmpOp::Le => i <= j,
                    CmpOp::Gt => i > j,
                    CmpOp::Ge => i >= j,
                    CmpOp::Eq | CmpOp::Ne => unreachable!(),
                }),
                (CmpOp::Eq | CmpOp::Ne, _, _) => {
                    Err(mismatch(b, format!("comparing `{vx}` with `{vy}`")))
                }
                _ => Err(mismatch(
                    b,
                    format!("ordering is only defined on integers, got `{vx}` and `{vy}`"),
                )),
            }
        }
    }
}

/// The set of states satisfying `b`.
pub fn eval_pred(b: &BExpr, space: &Arc<StateSpace>) -> Result<Predicate, LangError> {
    check_bexpr(b, space)?;
    let mut err = None;
    let p = Predicate::from_fn(space, |s| match eval_bexpr(b, space, s) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            false
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(p),
    }
}

/// Input-output relation of a reference-free program over every state.
pub fn denote(p: &Program, space: &Arc<StateSpace>) -> Result<Relation, LangError> {
    denote_from(p, &Predicate::full(space))
}

/// The relation of `p` restricted to initial states in `entry`.
///
/// Expressions are only evaluated in states that can actually reach them
/// from `entry`, so a guarded `x := x + 1` does not fail on the state where
/// the guard excludes it. This equals `test(entry) ; denote(p)` whenever the
/// latter is defined.
pub fn denote_from(p: &Program, entry: &Predicate) -> Result<Relation, LangError> {
    check_program(p, entry.space())?;
    Denoter {
        space: entry.space(),
    }
    .run(p, entry)
}

struct Denoter<'a> {
    space: &'a Arc<StateSpace>,
}

impl Denoter<'_> {
    fn run(&self, p: &Program, entry: &Predicate) -> Result<Relation, LangError> {
        Ok(match p {
            Program::Skip => Relation::test(entry),
            Program::Diverge => Relation::empty(self.space),
            Program::Assume(b) => Relation::test(&entry.and(&eval_pred(b, self.space)?)?),
            Program::Assign(x, e) => self.assign(x, e, entry)?,
            Program::Seq(a, b) => {
                let first = self.run(a, entry)?;
                let second = self.run(b, &first.codomain())?;
                first.compose(&second)?
            }
            Program::Choice(a, b) => self.run(a, entry)?.union(&self.run(b, entry)?)?,
            Program::If(g, a, b) => {
                let guard = eval_pred(g, self.space)?;
                let then = self.run(a, &entry.and(&guard)?)?;
                let other = self.run(b, &entry.and(&guard.complement())?)?;
                then.union(&other)?
            }
            Program::Star(body) => self.iterate(entry, |reach| self.run(body, reach))?,
            Program::While(g, body) => {
                let guard = eval_pred(g, self.space)?;
                let looped = self.iterate(entry, |reach| self.run(body, &reach.and(&guard)?))?;
                looped.compose(&Relation::test(&guard.complement()))?
            }
            Program::Ref(name) => return Err(LangError::UnknownProgram(name.clone())),
        })
    }

    fn assign(&self, x: &str, e: &Expr, entry: &Predicate) -> Result<Relation, LangError> {
        let var = self
            .space
            .var_index(x)
            .ok_or_else(|| LangError::UnknownIdentifier(x.to_owned()))?;
        let mut pairs = Vec::with_capacity(entry.count());
        for s in entry.iter() {
            let value = eval_expr(e, self.space, s)?;
            let Some(digit) = self.space.vars()[var].position(&value) else {
                return Err(LangError::OutOfDomain {
                    var: x.to_owned(),
                    expr: e.to_string(),
                    value,
                    state: self.space.describe(s),
                });
            };
            pairs.push((s, self.space.with_digit(s, var, digit)));
        }
        Ok(Relation::from_pairs(self.space, pairs)?)
    }

    /// `test(entry) ; star(step)`, where `step` is only evaluated on states
    /// reachable from `entry`.
    fn iterate(
        &self,
        entry: &Predicate,
        step: impl Fn(&Predicate) -> Result<Relation, LangError>,
    ) -> Result<Relation, LangError> {
        let mut reach = entry.clone();
        loop {
            let body = step(&reach)?;
            let next = reach.or(&body.codomain())?;
            if next == reach {
                return Ok(Relation::test(entry).compose(&body.star())?);
            }
            reach = next;
        }
    }
}
