//! Running the checks of a spec file and rendering the results.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::laws::{self, Fault, LawsError, LawsReport};
use crate::specfile::{self, Check, CheckKind, KatEquation, Operand, SpecError, SpecFile};
use crate::topkat::{self, Correspondence, Interpretation};
use crate::triples::{self, ContrapositivePartner, Exegesis, GaloisPartner, Triple};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Laws(#[from] LawsError),
    #[error("line {line}: {message}")]
    Eval { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub from: usize,
    pub to: usize,
    pub from_state: String,
    pub to_state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictRow {
    pub exegesis: Exegesis,
    pub title: &'static str,
    pub definition: &'static str,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois: Option<GaloisPartner>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrapositive: Option<ContrapositivePartner>,
}

impl VerdictRow {
    pub fn ok(&self) -> bool {
        self.expected.is_none_or(|e| e == self.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleReport {
    pub pre: String,
    pub prog: String,
    pub post: String,
    pub rows: Vec<VerdictRow>,
    /// Present when requested; `null` means no bug witness exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Option<Witness>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KatReport {
    pub equation: String,
    pub bindings: Vec<(String, String)>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<Correspondence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Triple(TripleReport),
    Kat(KatReport),
    Laws(LawsReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub kind: &'static str,
    pub passed: bool,
    pub result: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

fn eval_err(line: usize) -> impl Fn(&dyn std::fmt::Display) -> ReportError {
    move |e| ReportError::Eval {
        line,
        message: e.to_string(),
    }
}

fn witness(spec: &SpecFile, pair: Option<(usize, usize)>) -> Option<Witness> {
    pair.map(|(from, to)| Witness {
        from,
        to,
        from_state: spec.space.describe(from),
        to_state: spec.space.describe(to),
    })
}

/// Evaluates a triple check. With `full`, every reading is reported with
/// its partners and the witness, whatever the check lists.
pub fn run_triple(spec: &SpecFile, check: &Check, full: bool) -> Result<TripleReport, ReportError> {
    let CheckKind::Triple {
        pre,
        prog,
        post,
        exegeses,
        expect,
        witness: want_witness,
    } = &check.kind
    else {
        return Err(SpecError::WrongCheckKind {
            name: check.name.clone(),
            found: check.kind.kind(),
            wanted: "triple",
        }
        .into());
    };
    let line = check.line;
    let triple = Triple::new(
        spec.predicate(pre, line)?,
        spec.program(prog, line)?,
        spec.predicate(post, line)?,
    )
    .map_err(|e| eval_err(line)(&e))?;
    let listed: Vec<Exegesis> = exegeses.clone().unwrap_or_else(|| Exegesis::ALL.to_vec());
    let expected_for = |e: Exegesis| -> Option<bool> {
        match expect.len() {
            0 => None,
            1 => listed.contains(&e).then_some(expect[0]),
            _ => listed.iter().position(|&l| l == e).map(|i| expect[i]),
        }
    };
    let with_partners = full || exegeses.is_none();
    let shown: Vec<Exegesis> = if full {
        Exegesis::ALL.to_vec()
    } else {
        listed.clone()
    };
    let rows = if with_partners {
        let m = triples::matrix(&triple).map_err(|e| eval_err(line)(&e))?;
        m.rows
            .into_iter()
            .filter(|r| shown.contains(&r.exegesis))
            .map(|r| VerdictRow {
                exegesis: r.exegesis,
                title: r.title,
                definition: r.definition,
                verdict: r.verdict,
                expected: expected_for(r.exegesis),
                galois: r.galois,
                contrapositive: r.contrapositive,
            })
            .collect()
    } else {
        shown
            .iter()
            .map(|&e| {
                Ok(VerdictRow {
                    exegesis: e,
                    title: e.title(),
                    definition: e.definition(),
                    verdict: triples::holds(e, &triple).map_err(|e| eval_err(line)(&e))?,
                    expected: expected_for(e),
                    galois: None,
                    contrapositive: None,
                })
            })
            .collect::<Result<_, ReportError>>()?
    };
    let witness = (full || *want_witness || exegeses.is_none())
        .then(|| witness(spec, triples::bug_witness(&triple)));
    Ok(TripleReport {
        pre: pre.to_string(),
        prog: prog.to_string(),
        post: post.to_string(),
        rows,
        witness,
    })
}

fn bind_operands(
    spec: &SpecFile,
    line: usize,
    b: &Operand,
    p: &Operand,
    c: &Operand,
) -> Result<Interpretation, ReportError> {
    let (b, p, c) = (
        spec.predicate(b, line)?,
        spec.program(p, line)?,
        spec.predicate(c, line)?,
    );
    Interpretation::new(&spec.space)
        .with_test("b", b)
        .and_then(|i| i.with_prog("p", p))
        .and_then(|i| i.with_test("c", c))
        .map_err(|e| eval_err(line)(&e))
}

pub fn run_kat(spec: &SpecFile, check: &Check) -> Result<KatReport, ReportError> {
    let CheckKind::Kat { equation, expect } = &check.kind else {
        return Err(SpecError::WrongCheckKind {
            name: check.name.clone(),
            found: check.kind.kind(),
            wanted: "kat",
        }
        .into());
    };
    let line = check.line;
    let err = eval_err(line);
    match equation {
        KatEquation::Encoded { label, b, p, c } => {
            let interp = bind_operands(spec, line, b, p, c)?;
            let corr =
                topkat::correspondence(*label, &interp, "b", "p", "c").map_err(|e| err(&e))?;
            Ok(KatReport {
                equation: corr.equation.clone(),
                bindings: vec![
                    ("b".into(), b.to_string()),
                    ("p".into(), p.to_string()),
                    ("c".into(), c.to_string()),
                ],
                holds: corr.equation_holds,
                expected: *expect,
                correspondence: Some(corr),
            })
        }
        KatEquation::Explicit { lhs, rhs, bindings } => {
            let interp = specfile::kat_interpretation(spec, bindings, line)?;
            let is_test = |n: &str| interp.is_test(n);
            let l = topkat::parse_term(lhs, &is_test).map_err(|e| err(&e))?;
            let r = topkat::parse_term(rhs, &is_test).map_err(|e| err(&e))?;
            let holds = topkat::terms_equal(&l, &r, &interp).map_err(|e| err(&e))?;
            Ok(KatReport {
                equation: format!("{l} = {r}"),
                bindings: bindings.clone(),
                holds,
                expected: *expect,
                correspondence: None,
            })
        }
    }
}

fn triple_passed(t: &TripleReport) -> bool {
    t.rows.iter().all(VerdictRow::ok)
}

fn kat_passed(k: &KatReport) -> bool {
    k.expected.is_none_or(|e| e == k.holds)
        && k.correspondence.as_ref().is_none_or(Correspondence::agrees)
}

fn wrap(check: &Check, result: Outcome) -> CheckReport {
    let passed = match &result {
        Outcome::Triple(t) => triple_passed(t),
        Outcome::Kat(k) => kat_passed(k),
        Outcome::Laws(l) => l.passed,
    };
    CheckReport {
        check: check.name.clone(),
        kind: check.kind.kind(),
        passed,
        result,
    }
}

pub fn run_check(
    spec: &SpecFile,
    check: &Check,
    fault: Option<Fault>,
) -> Result<CheckReport, ReportError> {
    let result = match &check.kind {
        CheckKind::Triple { .. } => Outcome::Triple(run_triple(spec, check, false)?),
        CheckKind::Kat { .. } => Outcome::Kat(run_kat(spec, check)?),
        CheckKind::Laws { config } => {
            let mut config = *config;
            config.fault = fault.or(config.fault);
            Outcome::Laws(laws::run_laws(&config)?)
        }
    };
    Ok(wrap(check, result))
}

/// Runs every check of the file in order.
pub fn run_all(spec: &SpecFile) -> Result<RunReport, ReportError> {
    let checks = spec
        .checks
        .iter()
        .map(|c| run_check(spec, c, None))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(RunReport { checks, passed })
}

/// The full matrix of the named triple check.
pub fn run_matrix(spec: &SpecFile, name: &str) -> Result<CheckReport, ReportError> {
    let check = spec.check(name)?;
    let t = run_triple(spec, check, true)?;
    Ok(wrap(check, Outcome::Triple(t)))
}

pub fn run_named_kat(spec: &SpecFile, name: &str) -> Result<CheckReport, ReportError> {
    let check = spec.check(name)?;
    let k = run_kat(spec, check)?;
    Ok(wrap(check, Outcome::Kat(k)))
}

fn verdict(v: bool) -> &'static str {
    if v {
        "valid"
    } else {
        "invalid"
    }
}

fn holds(v: bool) -> &'static str {
    if v {
        "holds"
    } else {
        "fails"
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn render_triple(out: &mut String, t: &TripleReport) {
    let _ = writeln!(out, "  {{{}}} {} {{{}}}", t.pre, t.prog, t.post);
    for r in &t.rows {
        let _ = write!(
            out,
            "  {:<26} {:<8} {}",
            r.exegesis.label(),
            verdict(r.verdict),
            r.definition
        );
        if let Some(g) = &r.galois {
            let _ = write!(out, "  [{}: {}]", g.definition, holds(g.verdict));
        }
        if let Some(c) = &r.contrapositive {
            let _ = write!(
                out,
                "  [{} on negation: {}]",
                c.exegesis.label(),
                verdict(c.verdict)
            );
        }
        if let Some(e) = r.expected {
            let mark = if r.ok() { "ok" } else { "MISMATCH" };
            let _ = write!(out, "  expected {}: {mark}", verdict(e));
        }
        out.push('\n');
    }
    match &t.witness {
        Some(Some(w)) => {
            let _ = writeln!(out, "  witness: ({}) -> ({})", w.from_state, w.to_state);
        }
        Some(None) => out.push_str("  witness: none\n"),
        None => {}
    }
}

fn render_kat(out: &mut String, k: &KatReport) {
    let _ = writeln!(out, "  {}  {}", k.equation, holds(k.holds));
    if !k.bindings.is_empty() {
        let b: Vec<String> = k
            .bindings
            .iter()
            .map(|(s, t)| format!("{s} = {t}"))
            .collect();
        let _ = writeln!(out, "  where {}", b.join(", "));
    }
    if let Some(c) = &k.correspondence {
        let agree = if c.agrees() { "agrees" } else { "DISAGREES" };
        let _ = writeln!(
            out,
            "  {}  {}  {agree}",
            c.transformer_side,
            holds(c.transformer_holds)
        );
    }
    if let Some(e) = k.expected {
        let mark = if e == k.holds { "ok" } else { "MISMATCH" };
        let _ = writeln!(out, "  expected {}: {mark}", holds(e));
    }
}

pub fn render_check(c: &CheckReport) -> String {
    let mut out = format!("{} {}: {}\n", c.kind, c.check, status(c.passed));
    match &c.result {
        Outcome::Triple(t) => render_triple(&mut out, t),
        Outcome::Kat(k) => render_kat(&mut out, k),
        Outcome::Laws(l) => {
            for line in laws::render_laws(l).lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    }
    out
}

pub fn render_run(r: &RunReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        out.push_str(&render_check(c));
    }
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(
        out,
        "result: {} ({} checks, {failed} failed)",
        status(r.passed),
        r.checks.len()
    );
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
[space]
x: 0..2
[programs]
p = x := 1 [] x := 2
[predicates]
zero = x = 0
one = x = 1
[checks]
triple t: pre=zero prog=p post=one exegeses=total-correctness,partial-correctness,incorrectness expect=valid,invalid,valid
triple all: pre=zero prog=p post=one exegeses=all
triple bad: pre=zero prog=p post=one exegeses=partial-correctness expect=valid
kat k: equation=incorrectness b=zero p=p c=one expect=valid
kat e: lhs="zero;p;!one" rhs="0" expect=invalid
laws l: mode=exhaustive max-size=2
"#;

    fn spec() -> SpecFile {
        specfile::load(SPEC, 4096).unwrap()
    }

    #[test]
    fn triple_rows_follow_expectations() {
        let s = spec();
        let r = run_check(&s, s.check("t").unwrap(), None).unwrap();
        assert!(r.passed);
        let Outcome::Triple(t) = &r.result else {
            panic!()
        };
        let verdicts: Vec<bool> = t.rows.iter().map(|r| r.verdict).collect();
        assert_eq!(verdicts, [true, false, true]);
        assert!(t.witness.is_none());
        let bad = run_check(&s, s.check("bad").unwrap(), None).unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn all_reports_partners_and_witness() {
        let s = spec();
        let r = run_check(&s, s.check("all").unwrap(), None).unwrap();
        let Outcome::Triple(t) = &r.result else {
            panic!()
        };
        assert_eq!(t.rows.len(), Exegesis::ALL.len());
        assert!(t.rows.iter().any(|r| r.contrapositive.is_some()));
        let w = t.witness.clone().unwrap().unwrap();
        assert_eq!((w.from_state.as_str(), w.to_state.as_str()), ("x=0", "x=1"));
    }

    #[test]
    fn matrix_of_a_listed_triple_is_full() {
        let s = spec();
        let r = run_matrix(&s, "t").unwrap();
        let Outcome::Triple(t) = &r.result else {
            panic!()
        };
        assert_eq!(t.rows.len(), Exegesis::ALL.len());
        assert!(r.passed);
        assert!(matches!(
            run_matrix(&s, "k"),
            Err(ReportError::Spec(SpecError::WrongCheckKind { .. }))
        ));
    }

    #[test]
    fn kat_checks() {
        let s = spec();
        let k = run_named_kat(&s, "k").unwrap();
        assert!(k.passed);
        let Outcome::Kat(kr) = &k.result else {
            panic!()
        };
        assert_eq!(kr.equation, "top;b;p;c = top;c");
        assert!(kr.correspondence.as_ref().unwrap().agrees());
        let e = run_named_kat(&s, "e").unwrap();
        assert!(e.passed);
    }

    #[test]
    fn whole_run_and_rendering_are_stable() {
        let s = spec();
        let r = run_all(&s).unwrap();
        assert!(!r.passed);
        let text = render_run(&r);
        assert!(text.ends_with("result: FAIL (6 checks, 1 failed)\n"));
        assert_eq!(text, render_run(&run_all(&spec()).unwrap()));
        let json = to_json(&r);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            v["checks"][0]["result"]["rows"][0]["exegesis"],
            "total-correctness"
        );
        assert_eq!(v["checks"][5]["kind"], "laws");
    }
}
