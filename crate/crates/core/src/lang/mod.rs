//! A small guarded-command language whose programs denote [`Relation`]s.
//!
//! ```text
//! prog   := seq ("[]" seq)*
//! seq    := post (";" post)*
//! post   := atom "*"*
//! atom   := "skip" | "diverge" | IDENT ":=" expr | "assume" "(" bexpr ")"
//!         | "if" bexpr "then" prog "else" prog "fi"
//!         | "while" bexpr "do" prog "od" | "(" prog ")" | "@" IDENT
//! ```
//!
//! [`Relation`]: crate::relalg::Relation

mod parse;
mod semantics;

use std::fmt;

use thiserror::Error;

use crate::relalg::{RelError, Value};

pub use parse::{parse_bexpr, parse_expr, parse_program};
pub use semantics::{denote, denote_from, eval_pred, resolve, Definitions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown program `@{0}`")]
    UnknownProgram(String),
    #[error("cyclic program reference: {}", .0.join(" -> "))]
    CyclicReference(Vec<String>),
    #[error("type mismatch in `{expr}`: {message}")]
    TypeMismatch { expr: String, message: String },
    #[error("assignment `{var} := {expr}` yields {value}, outside the domain of `{var}`, in state [{state}]")]
    OutOfDomain {
        var: String,
        expr: String,
        value: Value,
        state: String,
    },
    #[error("division by zero in `{expr}` in state [{state}]")]
    DivisionByZero { expr: String, state: String },
    #[error(transparent)]
    Rel(#[from] RelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Value expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// A variable or a symbolic constant, decided against the state space.
    Name(String),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
}

/// Boolean expressions, the syntax of tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BExpr {
    True,
    False,
    Cmp(CmpOp, Expr, Expr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Program {
    Skip,
    Diverge,
    Assign(String, Expr),
    Assume(BExpr),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    Star(Box<Program>),
    If(BExpr, Box<Program>, Box<Program>),
    While(BExpr, Box<Program>),
    /// Reference to a named program, `@name`.
    Ref(String),
}

impl Program {
    pub fn seq(a: Program, b: Program) -> Self {
        Program::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Program, b: Program) -> Self {
        Program::Choice(Box::new(a), Box::new(b))
    }

    pub fn star(p: Program) -> Self {
        Program::Star(Box::new(p))
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "%",
        })
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) if *n < 0 => write!(f, "({n})"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Name(x) => f.write_str(x),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Arith(op, a, b) => write!(f, "({a} {op} {b})"),
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BExpr::True => f.write_str("true"),
            BExpr::False => f.write_str("false"),
            BExpr::Cmp(op, a, b) => write!(f, "{a} {op} {b}"),
            BExpr::Not(b) => write!(f, "!({b})"),
            BExpr::And(a, b) => write!(f, "({a} && {b})"),
            BExpr::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Skip => f.write_str("skip"),
            Program::Diverge => f.write_str("diverge"),
            Program::Assign(x, e) => write!(f, "{x} := {e}"),
            Program::Assume(b) => write!(f, "assume({b})"),
            Program::Seq(a, b) => write!(f, "({a}; {b})"),
            Program::Choice(a, b) => write!(f, "({a} [] {b})"),
            Program::Star(p) => write!(f, "({p})*"),
            Program::If(g, a, b) => write!(f, "if {g} then {a} else {b} fi"),
            Program::While(g, b) => write!(f, "while {g} do {b} od"),
            Program::Ref(name) => write!(f, "@{name}"),
        }
    }
}
