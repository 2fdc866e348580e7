//! Kleene algebra with tests and a top element, interpreted over relations.
//!
//! Terms are evaluated in an [`Interpretation`] that maps program symbols to
//! relations and test symbols to predicates. Tests become filters, `top`
//! the universal relation. Prefixing `top` compares codomains and suffixing
//! it compares domains, which is how triple readings become equations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::relalg::{Predicate, RelError, Relation, StateSpace};
use crate::transformers::{aslp, asp, awlp, awp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KatError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("symbol `{0}` is not mapped by the interpretation")]
    Unmapped(String),
    #[error("unknown equation `{0}`")]
    UnknownEquation(String),
    #[error(transparent)]
    Rel(#[from] RelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Top,
    Test(String),
    /// Complement of a test symbol; only tests can be negated.
    NegTest(String),
    Prog(String),
    Plus(Box<Term>, Box<Term>),
    Dot(Box<Term>, Box<Term>),
    Star(Box<Term>),
}

impl Term {
    pub fn test(b: &str) -> Self {
        Term::Test(b.to_owned())
    }

    pub fn prog(p: &str) -> Self {
        Term::Prog(p.to_owned())
    }

    pub fn plus(a: Term, b: Term) -> Self {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn dot(a: Term, b: Term) -> Self {
        Term::Dot(Box::new(a), Box::new(b))
    }

    pub fn star(a: Term) -> Self {
        Term::Star(Box::new(a))
    }

    /// Left-nested product of `terms`; `1` when empty.
    pub fn product(terms: impl IntoIterator<Item = Term>) -> Self {
        terms.into_iter().reduce(Term::dot).unwrap_or(Term::One)
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Plus(..) => 0,
            Term::Dot(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Top => f.write_str("top"),
            Term::Test(b) | Term::Prog(b) => f.write_str(b),
            Term::NegTest(b) => write!(f, "!{b}"),
            Term::Plus(a, b) => {
                a.fmt_at(f, 0)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 1)
            }
            Term::Dot(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(";")?;
                b.fmt_at(f, 2)
            }
            Term::Star(a) => {
                a.fmt_at(f, 2)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Parses the ASCII term syntax. `is_test` decides whether a bare
/// identifier names a test or a program.
///
/// ```text
/// term := term "+" term | term ";" term | term "*"
///       | "0" | "1" | "top" | IDENT | "!" IDENT | "(" term ")"
/// ```
pub fn parse_term(text: &str, is_test: &dyn Fn(&str) -> bool) -> Result<Term, KatError> {
    let mut p = TermParser {
        chars: text.chars().collect(),
        pos: 0,
        is_test,
    };
    let t = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(t)
}

struct TermParser<'a> {
    chars: Vec<char>,
    pos: usize,
    is_test: &'a dyn Fn(&str) -> bool,
}

impl TermParser<'_> {
    fn error(&self, message: impl Into<String>) -> KatError {
        KatError::Syntax {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            if self.pos == start && self.chars[self.pos].is_ascii_digit() {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn sum(&mut self) -> Result<Term, KatError> {
        let mut t = self.seq()?;
        while self.eat('+') {
            t = Term::plus(t, self.seq()?);
        }
        Ok(t)
    }

    fn seq(&mut self) -> Result<Term, KatError> {
        let mut t = self.post()?;
        while self.eat(';') {
            t = Term::dot(t, self.post()?);
        }
        Ok(t)
    }

    fn post(&mut self) -> Result<Term, KatError> {
        let mut t = self.atom()?;
        while self.eat('*') {
            t = Term::star(t);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, KatError> {
        if self.eat('(') {
            let t = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(t);
        }
        if self.eat('0') {
            return Ok(Term::Zero);
        }
        if self.eat('1') {
            return Ok(Term::One);
        }
        if self.eat('!') {
            let at = self.pos;
            let name = self
                .ident()
                .ok_or_else(|| self.error("expected a test symbol"))?;
            if !(self.is_test)(&name) {
                self.pos = at;
                return Err(self.error(format!("`{name}` is not a test and cannot be negated")));
            }
            return Ok(Term::NegTest(name));
        }
        match self.ident() {
            Some(name) if name == "top" => Ok(Term::Top),
            Some(name) if (self.is_test)(&name) => Ok(Term::Test(name)),
            Some(name) => Ok(Term::Prog(name)),
            None if self.pos >= self.chars.len() => Err(self.error("unexpected end of term")),
            None => Err(self.error(format!("unexpected `{}`", self.chars[self.pos]))),
        }
    }
}

/// Symbol assignment over one state space.
#[derive(Debug, Clone)]
pub struct Interpretation {
    space: Arc<StateSpace>,
    progs: BTreeMap<String, Relation>,
    tests: BTreeMap<String, Predicate>,
}

impl Interpretation {
    pub fn new(space: &Arc<StateSpace>) -> Self {
        Self {
            space: space.clone(),
            progs: BTreeMap::new(),
            tests: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn with_prog(mut self, name: &str, r: Relation) -> Result<Self, KatError> {
        self.bind_prog(name, r)?;
        Ok(self)
    }

    pub fn with_test(mut self, name: &str, b: Predicate) -> Result<Self, KatError> {
        self.bind_test(name, b)?;
        Ok(self)
    }

    pub fn bind_prog(&mut self, name: &str, r: Relation) -> Result<(), KatError> {
        if r.space() != &self.space {
            return Err(RelError::SpaceMismatch.into());
        }
        self.progs.insert(name.to_owned(), r);
        Ok(())
    }

    pub fn bind_test(&mut self, name: &str, b: Predicate) -> Result<(), KatError> {
        if b.space() != &self.space {
            return Err(RelError::SpaceMismatch.into());
        }
        self.tests.insert(name.to_owned(), b);
        Ok(())
    }

    pub fn prog(&self, name: &str) -> Result<&Relation, KatError> {
        self.progs
            .get(name)
            .ok_or_else(|| KatError::Unmapped(name.to_owned()))
    }

    pub fn test(&self, name: &str) -> Result<&Predicate, KatError> {
        self.tests
            .get(name)
            .ok_or_else(|| KatError::Unmapped(name.to_owned()))
    }

    pub fn is_test(&self, name: &str) -> bool {
        self.tests.contains_key(name)
    }
}

pub fn eval(t: &Term, i: &Interpretation) -> Result<Relation, KatError> {
    Ok(match t {
        Term::Zero => Relation::empty(&i.space),
        Term::One => Relation::identity(&i.space),
        Term::Top => Relation::top(&i.space),
        Term::Test(b) => Relation::test(i.test(b)?),
        Term::NegTest(b) => Relation::test(&i.test(b)?.complement()),
        Term::Prog(p) => i.prog(p)?.clone(),
        Term::Plus(a, b) => eval(a, i)?.union(&eval(b, i)?)?,
        Term::Dot(a, b) => eval(a, i)?.compose(&eval(b, i)?)?,
        Term::Star(a) => eval(a, i)?.star(),
    })
}

/// The six triple readings that have a TopKAT encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EquationLabel {
    #[serde(rename = "partial-correctness")]
    PartialCorrectness,
    #[serde(rename = "incorrectness")]
    Incorrectness,
    #[serde(rename = "angelic-total-correctness")]
    AngelicTotalCorrectness,
    #[serde(rename = "partial-incorrectness")]
    PartialIncorrectness,
    #[serde(rename = "topbpc-toppc")]
    TopBpcTopPc,
    #[serde(rename = "bpctop-bptop")]
    BpcTopBpTop,
}

impl EquationLabel {
    pub const ALL: [EquationLabel; 6] = [
        EquationLabel::PartialCorrectness,
        EquationLabel::Incorrectness,
        EquationLabel::AngelicTotalCorrectness,
        EquationLabel::PartialIncorrectness,
        EquationLabel::TopBpcTopPc,
        EquationLabel::BpcTopBpTop,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EquationLabel::PartialCorrectness => "partial-correctness",
            EquationLabel::Incorrectness => "incorrectness",
            EquationLabel::AngelicTotalCorrectness => "angelic-total-correctness",
            EquationLabel::PartialIncorrectness => "partial-incorrectness",
            EquationLabel::TopBpcTopPc => "topbpc-toppc",
            EquationLabel::BpcTopBpTop => "bpctop-bptop",
        }
    }

    /// The transformer implication the equation is checked against.
    pub fn transformer_side(self) -> &'static str {
        match self {
            EquationLabel::PartialCorrectness => "asp(p)(b) => c",
            EquationLabel::Incorrectness => "c => asp(p)(b)",
            EquationLabel::AngelicTotalCorrectness => "b => awp(p)(c)",
            EquationLabel::PartialIncorrectness => "awp(p)(c) => b",
            EquationLabel::TopBpcTopPc => "c => aslp(p)(b)",
            EquationLabel::BpcTopBpTop => "b => awlp(p)(c)",
        }
    }

    pub fn transformer_holds(
        self,
        r: &Relation,
        b: &Predicate,
        c: &Predicate,
    ) -> Result<bool, RelError> {
        match self {
            EquationLabel::PartialCorrectness => asp(r, b)?.implies(c),
            EquationLabel::Incorrectness => c.implies(&asp(r, b)?),
            EquationLabel::AngelicTotalCorrectness => b.implies(&awp(r, c)?),
            EquationLabel::PartialIncorrectness => awp(r, c)?.implies(b),
            EquationLabel::TopBpcTopPc => c.implies(&aslp(r, b)?),
            EquationLabel::BpcTopBpTop => b.implies(&awlp(r, c)?),
        }
    }
}

impl fmt::Display for EquationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EquationLabel {
    type Err = KatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EquationLabel::ALL
            .iter()
            .copied()
            .find(|l| l.label() == s)
            .ok_or_else(|| KatError::UnknownEquation(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedEquation {
    pub label: EquationLabel,
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for EncodedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// The equation encoding `label` for the triple `{b} p {c}`.
pub fn encode(label: EquationLabel, b: &str, p: &str, c: &str) -> EncodedEquation {
    let (b, p, c) = (Term::test(b), Term::prog(p), Term::test(c));
    let top = || Term::Top;
    let (lhs, rhs) = match label {
        EquationLabel::PartialCorrectness => (
            Term::product([top(), b.clone(), p.clone(), c]),
            Term::product([top(), b, p]),
        ),
        EquationLabel::Incorrectness => (
            Term::product([top(), b, p, c.clone()]),
            Term::product([top(), c]),
        ),
        EquationLabel::AngelicTotalCorrectness => (
            Term::product([b.clone(), p, c, top()]),
            Term::product([b, top()]),
        ),
        EquationLabel::PartialIncorrectness => (
            Term::product([b, p.clone(), c.clone(), top()]),
            Term::product([p, c, top()]),
        ),
        EquationLabel::TopBpcTopPc => (
            Term::product([top(), b, p.clone(), c.clone()]),
            Term::product([top(), p, c]),
        ),
        EquationLabel::BpcTopBpTop => (
            Term::product([b.clone(), p.clone(), c, top()]),
            Term::product([b, p, top()]),
        ),
    };
    EncodedEquation { label, lhs, rhs }
}

pub fn equation_holds(eq: &EncodedEquation, i: &Interpretation) -> Result<bool, KatError> {
    terms_equal(&eq.lhs, &eq.rhs, i)
}

pub fn terms_equal(lhs: &Term, rhs: &Term, i: &Interpretation) -> Result<bool, KatError> {
    Ok(eval(lhs, i)?.equals(&eval(rhs, i)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub label: EquationLabel,
    pub equation: String,
    pub equation_holds: bool,
    pub transformer_side: &'static str,
    pub transformer_holds: bool,
}

impl Correspondence {
    pub fn agrees(&self) -> bool {
        self.equation_holds == self.transformer_holds
    }
}

/// Evaluates the encoding of `label` and its transformer reading on the
/// symbols `b`, `p`, `c` of `i`.
pub fn correspondence(
    label: EquationLabel,
    i: &Interpretation,
    b: &str,
    p: &str,
    c: &str,
) -> Result<Correspondence, KatError> {
    let eq = encode(label, b, p, c);
    let equation_holds = equation_holds(&eq, i)?;
    let transformer_holds = label.transformer_holds(i.prog(p)?, i.test(b)?, i.test(c)?)?;
    Ok(Correspondence {
        label,
        equation: eq.to_string(),
        equation_holds,
        transformer_side: label.transformer_side(),
        transformer_holds,
    })
}
