//! The line-oriented input format of the command-line tool.
//!
//! ```text
//! # comment
//! [space]
//! pw: correct, wrong
//! n: 0..3
//!
//! [programs]
//! login = if pw = correct then skip else diverge fi
//!
//! [predicates]
//! wrong_pw = pw = wrong
//!
//! [checks]
//! triple NAME: pre=P prog=Q post=P [exegeses=all|E,E..] [expect=valid|invalid,..] [witness]
//! kat NAME: equation=LABEL b=P p=Q c=P [expect=valid|invalid]
//! kat NAME: lhs="TERM" rhs="TERM" [bind="x=P,y=Q"] [expect=valid|invalid]
//! laws NAME: mode=exhaustive max-size=N
//! laws NAME: mode=random samples=N seed=S [max-size=N]
//! ```
//!
//! Lines starting with whitespace continue the previous entry. Operands
//! name a definition or give its text in double quotes.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::lang::{self, BExpr, Definitions, LangError, Program};
use crate::laws::LawsConfig;
use crate::relalg::{Predicate, RelError, Relation, StateSpace, Value, Variable};
use crate::topkat::{EquationLabel, KatError};
use crate::triples::Exegesis;

/// Environment variable overriding [`crate::relalg::DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "EXEGESIS_STATE_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("no check named `{0}`")]
    UnknownCheck(String),
    #[error("check `{name}` is a {found} check, not a {wanted} check")]
    WrongCheckKind {
        name: String,
        found: &'static str,
        wanted: &'static str,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Parse {
        line,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl std::fmt::Display) -> SpecError {
    SpecError::Semantic {
        line,
        message: message.to_string(),
    }
}

/// A named definition or inline text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Name(String),
    Inline(String),
}

impl std::fmt::Display for Operand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Operand::Name(n) => f.write_str(n),
            Operand::Inline(t) => write!(f, "\"{t}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KatEquation {
    Encoded {
        label: EquationLabel,
        b: Operand,
        p: Operand,
        c: Operand,
    },
    Explicit {
        lhs: String,
        rhs: String,
        bindings: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckKind {
    Triple {
        pre: Operand,
        prog: Operand,
        post: Operand,
        /// `None` means every reading, with the full matrix.
        exegeses: Option<Vec<Exegesis>>,
        expect: Vec<bool>,
        witness: bool,
    },
    Kat {
        equation: KatEquation,
        expect: Option<bool>,
    },
    Laws {
        config: LawsConfig,
    },
}

impl CheckKind {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckKind::Triple { .. } => "triple",
            CheckKind::Kat { .. } => "kat",
            CheckKind::Laws { .. } => "laws",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub line: usize,
    pub kind: CheckKind,
}

/// A parsed and type-checked spec file with every definition denoted.
#[derive(Debug, Clone)]
pub struct SpecFile {
    pub space: Arc<StateSpace>,
    pub programs: BTreeMap<String, Relation>,
    pub predicates: BTreeMap<String, Predicate>,
    pub checks: Vec<Check>,
    definitions: Definitions,
}

impl SpecFile {
    pub fn check(&self, name: &str) -> Result<&Check, SpecError> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| SpecError::UnknownCheck(name.to_owned()))
    }

    pub fn predicate(&self, op: &Operand, line: usize) -> Result<Predicate, SpecError> {
        match op {
            Operand::Name(n) => self
                .predicates
                .get(n)
                .cloned()
                .ok_or_else(|| semantic(line, format!("unknown predicate `{n}`"))),
            Operand::Inline(text) => {
                let b = lang::parse_bexpr(text).map_err(|e| semantic(line, e))?;
                lang::eval_pred(&b, &self.space).map_err(|e| semantic(line, e))
            }
        }
    }

    pub fn program(&self, op: &Operand, line: usize) -> Result<Relation, SpecError> {
        match op {
            Operand::Name(n) => self
                .programs
                .get(n)
                .cloned()
                .ok_or_else(|| semantic(line, format!("unknown program `{n}`"))),
            Operand::Inline(text) => {
                let p = lang::parse_program(text).map_err(|e| semantic(line, e))?;
                let p = lang::resolve(&p, &self.definitions).map_err(|e| semantic(line, e))?;
                lang::denote(&p, &self.space).map_err(|e| semantic(line, e))
            }
        }
    }
}

/// State-space cap from [`STATE_CAP_ENV`], or the default.
pub fn state_cap_from_env() -> Result<usize, String> {
    match std::env::var(STATE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{STATE_CAP_ENV} must be a positive integer, got `{v}`")),
        Err(_) => Ok(crate::relalg::DEFAULT_STATE_CAP),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Space,
    Programs,
    Predicates,
    Checks,
}

/// Joins continuation lines; yields `(first line number, section, text)`.
fn logical_lines(text: &str) -> Result<Vec<(usize, Section, String)>, SpecError> {
    let mut out: Vec<(usize, Section, String)> = Vec::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.trim().is_empty() {
            continue;
        }
        let continues = content.starts_with(char::is_whitespace);
        let trimmed = content.trim();
        if !continues && trimmed.starts_with('[') && trimmed.ends_with(']') {
            section = match &trimmed[1..trimmed.len() - 1] {
                "space" => Section::Space,
                "programs" => Section::Programs,
                "predicates" => Section::Predicates,
                "checks" => Section::Checks,
                other => return Err(parse_err(line, format!("unknown section `[{other}]`"))),
            };
            continue;
        }
        if continues {
            match out.last_mut() {
                Some((_, s, text)) if *s == section => {
                    text.push('\n');
                    text.push_str(trimmed);
                    continue;
                }
                _ => return Err(parse_err(line, "continuation line without an entry")),
            }
        }
        if section == Section::None {
            return Err(parse_err(line, "entry outside of any section"));
        }
        out.push((line, section, trimmed.to_owned()));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_value(line: usize, s: &str) -> Result<Value, SpecError> {
    if let Ok(n) = s.parse::<i64>() {
        Ok(Value::Int(n))
    } else if is_ident(s) {
        Ok(Value::Sym(s.to_owned()))
    } else {
        Err(parse_err(line, format!("invalid domain value `{s}`")))
    }
}

fn parse_variable(line: usize, text: &str) -> Result<Variable, SpecError> {
    let (name, domain) = text
        .split_once(':')
        .ok_or_else(|| parse_err(line, "expected `name: values`"))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(parse_err(line, format!("invalid variable name `{name}`")));
    }
    let domain = domain.trim();
    if let Some((lo, hi)) = domain.split_once("..") {
        let bound = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| parse_err(line, format!("invalid range bound `{}`", s.trim())))
        };
        let (lo, hi) = (bound(lo)?, bound(hi)?);
        if lo > hi {
            return Err(parse_err(line, format!("empty range {lo}..{hi}")));
        }
        if hi - lo >= 1 << 20 {
            return Err(parse_err(line, format!("range {lo}..{hi} is too large")));
        }
        return Ok(Variable::range(name, lo, hi));
    }
    let values = domain
        .split(',')
        .map(|v| parse_value(line, v.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Variable::new(name, values))
}

fn parse_definition(line: usize, text: &str) -> Result<(String, String), SpecError> {
    let (name, body) = text
        .split_once('=')
        .ok_or_else(|| parse_err(line, "expected `name = definition`"))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(parse_err(line, format!("invalid name `{name}`")));
    }
    Ok((name.to_owned(), body.trim().to_owned()))
}

/// Splits `key=value` tokens on whitespace, honouring double quotes.
/// A field value and whether it was quoted.
type FieldValue = (String, bool);

fn tokens(line: usize, text: &str) -> Result<Vec<(String, Option<FieldValue>)>, SpecError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut key = String::new();
        while let Some(&c) = chars.peek() {
            if c == '=' || c.is_whitespace() {
                break;
            }
            key.push(c);
            chars.next();
        }
        if chars.peek() != Some(&'=') {
            out.push((key, None));
            continue;
        }
        chars.next();
        let mut value = String::new();
        let quoted = chars.peek() == Some(&'"');
        if quoted {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\n') => value.push(' '),
                    Some(c) => value.push(c),
                    None => {
                        return Err(parse_err(
                            line,
                            format!("unterminated quote after `{key}=`"),
                        ))
                    }
                }
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                value.push(c);
                chars.next();
            }
        }
        out.push((key, Some((value, quoted))));
    }
}

struct Fields {
    line: usize,
    values: BTreeMap<String, (String, bool)>,
    flags: Vec<String>,
}

impl Fields {
    fn new(line: usize, text: &str) -> Result<Self, SpecError> {
        let mut values = BTreeMap::new();
        let mut flags = Vec::new();
        for (key, value) in tokens(line, text)? {
            match value {
                Some(v) => {
                    if values.insert(key.clone(), v).is_some() {
                        return Err(parse_err(line, format!("`{key}` given twice")));
                    }
                }
                None => flags.push(key),
            }
        }
        Ok(Self {
            line,
            values,
            flags,
        })
    }

    fn take(&mut self, key: &str) -> Option<(String, bool)> {
        self.values.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(String, bool), SpecError> {
        self.take(key)
            .ok_or_else(|| parse_err(self.line, format!("missing `{key}=`")))
    }

    fn operand(&mut self, key: &str) -> Result<Operand, SpecError> {
        let (v, quoted) = self.require(key)?;
        Ok(if quoted {
            Operand::Inline(v)
        } else {
            Operand::Name(v)
        })
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, SpecError> {
        self.take(key)
            .map(|(v, _)| {
                v.parse().map_err(|_| {
                    parse_err(self.line, format!("`{key}` must be a number, got `{v}`"))
                })
            })
            .transpose()
    }

    fn flag(&mut self, name: &str) -> bool {
        let before = self.flags.len();
        self.flags.retain(|f| f != name);
        self.flags.len() != before
    }

    fn finish(self) -> Result<(), SpecError> {
        if let Some(key) = self.values.keys().next() {
            return Err(parse_err(self.line, format!("unexpected field `{key}=`")));
        }
        if let Some(flag) = self.flags.first() {
            return Err(parse_err(self.line, format!("unexpected `{flag}`")));
        }
        Ok(())
    }
}

fn parse_expect(line: usize, s: &str) -> Result<bool, SpecError> {
    match s {
        "valid" | "true" | "holds" => Ok(true),
        "invalid" | "false" | "fails" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("expectation must be `valid` or `invalid`, got `{s}`"),
        )),
    }
}

fn parse_check(line: usize, text: &str) -> Result<Check, SpecError> {
    let (head, body) = text
        .split_once(':')
        .ok_or_else(|| parse_err(line, "expected `kind name: fields`"))?;
    let mut head = head.split_whitespace();
    let (Some(kind), Some(name), None) = (head.next(), head.next(), head.next()) else {
        return Err(parse_err(line, "expected `kind name: fields`"));
    };
    if !is_ident(name) {
        return Err(parse_err(line, format!("invalid check name `{name}`")));
    }
    let mut f = Fields::new(line, body)?;
    let kind = match kind {
        "triple" => {
            let pre = f.operand("pre")?;
            let prog = f.operand("prog")?;
            let post = f.operand("post")?;
            let exegeses = match f.take("exegeses") {
                None => Some(vec![
                    Exegesis::TotalCorrectness,
                    Exegesis::PartialCorrectness,
                    Exegesis::Incorrectness,
                    Exegesis::PartialIncorrectness,
                ]),
                Some((v, _)) if v == "all" => None,
                Some((v, _)) => Some(
                    v.split(',')
                        .map(|e| {
                            e.trim()
                                .parse::<Exegesis>()
                                .map_err(|e| parse_err(line, e.to_string()))
                        })
                        .collect::<Result<_, _>>()?,
                ),
            };
            let expect = match f.take("expect") {
                None => Vec::new(),
                Some((v, _)) => v
                    .split(',')
                    .map(|e| parse_expect(line, e.trim()))
                    .collect::<Result<_, _>>()?,
            };
            let listed = exegeses.as_ref().map_or(Exegesis::ALL.len(), Vec::len);
            if !(expect.is_empty() || expect.len() == 1 || expect.len() == listed) {
                return Err(parse_err(
                    line,
                    format!("{} expectations for {listed} exegeses", expect.len()),
                ));
            }
            let witness = f.flag("witness");
            CheckKind::Triple {
                pre,
                prog,
                post,
                exegeses,
                expect,
                witness,
            }
        }
        "kat" => {
            let expect = f
                .take("expect")
                .map(|(v, _)| parse_expect(line, &v))
                .transpose()?;
            let equation = if let Some((label, _)) = f.take("equation") {
                let label = label
                    .parse::<EquationLabel>()
                    .map_err(|e| parse_err(line, e.to_string()))?;
                KatEquation::Encoded {
                    label,
                    b: f.operand("b")?,
                    p: f.operand("p")?,
                    c: f.operand("c")?,
                }
            } else {
                let lhs = f.require("lhs")?.0;
                let rhs = f.require("rhs")?.0;
                let bindings = match f.take("bind") {
                    None => Vec::new(),
                    Some((v, _)) => v
                        .split(',')
                        .filter(|b| !b.trim().is_empty())
                        .map(|b| {
                            let (sym, target) = b.split_once('=').ok_or_else(|| {
                                parse_err(line, format!("binding `{b}` is not `symbol=name`"))
                            })?;
                            Ok((sym.trim().to_owned(), target.trim().to_owned()))
                        })
                        .collect::<Result<_, SpecError>>()?,
                };
                KatEquation::Explicit { lhs, rhs, bindings }
            };
            CheckKind::Kat { equation, expect }
        }
        "laws" => {
            let mode = f.require("mode")?.0;
            let max_size = f.number::<usize>("max-size")?;
            let config = match mode.as_str() {
                "exhaustive" => LawsConfig::exhaustive(max_size.unwrap_or(3)),
                "random" => LawsConfig::random(
                    f.number("samples")?.unwrap_or(10_000),
                    f.number("seed")?.unwrap_or(0),
                    max_size.unwrap_or(6),
                ),
                other => return Err(parse_err(line, format!("unknown laws mode `{other}`"))),
            };
            CheckKind::Laws { config }
        }
        other => return Err(parse_err(line, format!("unknown check kind `{other}`"))),
    };
    f.finish()?;
    Ok(Check {
        name: name.to_owned(),
        line,
        kind,
    })
}

/// Parses the body of a `[space]` section on its own.
pub fn load_space(text: &str, cap: usize) -> Result<Arc<StateSpace>, SpecError> {
    let mut vars = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = strip_comment(raw).trim();
        if !content.is_empty() {
            vars.push(parse_variable(i + 1, content)?);
        }
    }
    if vars.is_empty() {
        return Err(semantic(1, "no variables declared"));
    }
    StateSpace::with_cap(vars, cap).map_err(|e| semantic(text.lines().count().max(1), e))
}

/// Parses and type-checks a spec file against a state-space cap.
pub fn load(text: &str, cap: usize) -> Result<SpecFile, SpecError> {
    let mut vars = Vec::new();
    let mut program_src: Vec<(usize, String, Program)> = Vec::new();
    let mut predicate_src: Vec<(usize, String, BExpr)> = Vec::new();
    let mut checks: Vec<Check> = Vec::new();
    let mut space_line = 0;
    for (line, section, text) in logical_lines(text)? {
        match section {
            Section::Space => {
                space_line = space_line.max(line);
                vars.push(parse_variable(line, &text)?);
            }
            Section::Programs => {
                let (name, body) = parse_definition(line, &text)?;
                if program_src.iter().any(|(_, n, _)| *n == name) {
                    return Err(semantic(line, format!("program `{name}` defined twice")));
                }
                let p = lang::parse_program(&body).map_err(|e| syntax_at(line, e))?;
                program_src.push((line, name, p));
            }
            Section::Predicates => {
                let (name, body) = parse_definition(line, &text)?;
                if predicate_src.iter().any(|(_, n, _)| *n == name) {
                    return Err(semantic(line, format!("predicate `{name}` defined twice")));
                }
                let b = lang::parse_bexpr(&body).map_err(|e| syntax_at(line, e))?;
                predicate_src.push((line, name, b));
            }
            Section::Checks => {
                let check = parse_check(line, &text)?;
                if checks.iter().any(|c| c.name == check.name) {
                    return Err(semantic(
                        line,
                        format!("check `{}` defined twice", check.name),
                    ));
                }
                checks.push(check);
            }
            Section::None => unreachable!("rejected while splitting lines"),
        }
    }
    if vars.is_empty() {
        return Err(semantic(1, "no [space] variables declared"));
    }
    let space = StateSpace::with_cap(vars, cap).map_err(|e| match e {
        RelError::CapExceeded { .. } => semantic(
            space_line,
            format!("{e}; set {STATE_CAP_ENV} to raise the cap"),
        ),
        e => semantic(space_line, e),
    })?;

    let mut predicates = BTreeMap::new();
    for (line, name, b) in &predicate_src {
        if programs_shadow(&program_src, name) {
            return Err(semantic(
                *line,
                format!("`{name}` names both a program and a predicate"),
            ));
        }
        let p = lang::eval_pred(b, &space).map_err(|e| semantic(*line, e))?;
        predicates.insert(name.clone(), p);
    }
    let definitions: Definitions = program_src
        .iter()
        .map(|(_, n, p)| (n.clone(), p.clone()))
        .collect();
    let mut programs = BTreeMap::new();
    for (line, name, p) in &program_src {
        let resolved = lang::resolve(p, &definitions).map_err(|e| semantic(*line, e))?;
        let r = lang::denote(&resolved, &space).map_err(|e| semantic(*line, e))?;
        programs.insert(name.clone(), r);
    }

    let spec = SpecFile {
        space,
        programs,
        predicates,
        checks,
        definitions,
    };
    for check in &spec.checks {
        validate(&spec, check)?;
    }
    Ok(spec)
}

fn programs_shadow(programs: &[(usize, String, Program)], name: &str) -> bool {
    programs.iter().any(|(_, n, _)| n == name)
}

fn syntax_at(line: usize, e: LangError) -> SpecError {
    match e {
        LangError::Syntax {
            line: l,
            column,
            message,
        } => parse_err(line + l - 1, format!("column {column}: {message}")),
        e => semantic(line, e),
    }
}

/// Resolves every name a check refers to, so errors surface at load time.
fn validate(spec: &SpecFile, check: &Check) -> Result<(), SpecError> {
    let line = check.line;
    match &check.kind {
        CheckKind::Triple {
            pre, prog, post, ..
        } => {
            spec.predicate(pre, line)?;
            spec.program(prog, line)?;
            spec.predicate(post, line)?;
        }
        CheckKind::Kat {
            equation: KatEquation::Encoded { b, p, c, .. },
            ..
        } => {
            spec.predicate(b, line)?;
            spec.program(p, line)?;
            spec.predicate(c, line)?;
        }
        CheckKind::Kat {
            equation: KatEquation::Explicit { lhs, rhs, bindings },
            ..
        } => {
            let interp = kat_interpretation(spec, bindings, line)?;
            for term in [lhs, rhs] {
                let t = crate::topkat::parse_term(term, &|n| interp.is_test(n))
                    .map_err(|e| semantic(line, e))?;
                crate::topkat::eval(&t, &interp).map_err(|e| semantic(line, e))?;
            }
        }
        CheckKind::Laws { config } => {
            if let crate::laws::Mode::Exhaustive { max_size } = config.mode {
                if max_size == 0 || max_size > crate::laws::MAX_EXHAUSTIVE_SIZE {
                    return Err(semantic(
                        line,
                        format!(
                            "exhaustive max-size must be within 1..={}",
                            crate::laws::MAX_EXHAUSTIVE_SIZE
                        ),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Interpretation binding every program and predicate of the file under its
/// own name, plus the aliases in `bindings`.
pub fn kat_interpretation(
    spec: &SpecFile,
    bindings: &[(String, String)],
    line: usize,
) -> Result<crate::topkat::Interpretation, SpecError> {
    let wrap = |e: KatError| semantic(line, e);
    let mut interp = crate::topkat::Interpretation::new(&spec.space);
    for (name, r) in &spec.programs {
        interp.bind_prog(name, r.clone()).map_err(wrap)?;
    }
    for (name, b) in &spec.predicates {
        interp.bind_test(name, b.clone()).map_err(wrap)?;
    }
    for (sym, target) in bindings {
        if let Some(b) = spec.predicates.get(target) {
            interp.bind_test(sym, b.clone()).map_err(wrap)?;
        } else if let Some(r) = spec.programs.get(target) {
            interp.bind_prog(sym, r.clone()).map_err(wrap)?;
        } else {
            return Err(semantic(
                line,
                format!("binding `{sym}` refers to unknown `{target}`"),
            ));
        }
    }
    Ok(interp)
}
