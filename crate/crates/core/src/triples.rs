//! Readings of a triple `{b} p {c}` and the laws that relate them.
//!
//! Six readings arise from combining `wp`, `wlp`, `sp`, `slp` with both
//! implication directions; partial correctness and partial incorrectness
//! each have two formulations joined by a Galois connection. Three further
//! readings come from TopKAT equations (the two angelic-liberal ones) and
//! from the existence of a path from `b` to `c`. Demonic total correctness
//! is kept alongside to show where it departs from the angelic reading.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::relalg::{Predicate, RelError, Relation};
use crate::transformers::{aslp, asp, awlp, awp, dslp, dwlp, dwp};

#[derive(Debug, Clone)]
pub struct Triple {
    pre: Predicate,
    prog: Relation,
    post: Predicate,
}

impl Triple {
    pub fn new(pre: Predicate, prog: Relation, post: Predicate) -> Result<Self, RelError> {
        if pre.space() != prog.space() || post.space() != prog.space() {
            return Err(RelError::SpaceMismatch);
        }
        Ok(Self { pre, prog, post })
    }

    pub fn pre(&self) -> &Predicate {
        &self.pre
    }

    pub fn prog(&self) -> &Relation {
        &self.prog
    }

    pub fn post(&self) -> &Predicate {
        &self.post
    }

    /// `{¬b} p {¬c}`, the triple a contrapositive partner is evaluated on.
    pub fn negated(&self) -> Self {
        Self {
            pre: self.pre.complement(),
            prog: self.prog.clone(),
            post: self.post.complement(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exegesis {
    TotalCorrectness,
    ExegesisV,
    PartialCorrectness,
    PartialIncorrectness,
    ExegesisVi,
    Incorrectness,
    AngelicLiberalLhs,
    AngelicLiberalRhs,
    BugWitness,
    DemonicTotalCorrectness,
}

impl Exegesis {
    /// Diagram order (left to right, top to bottom), then the extra readings.
    pub const ALL: [Exegesis; 10] = [
        Exegesis::TotalCorrectness,
        Exegesis::ExegesisV,
        Exegesis::PartialCorrectness,
        Exegesis::PartialIncorrectness,
        Exegesis::ExegesisVi,
        Exegesis::Incorrectness,
        Exegesis::AngelicLiberalLhs,
        Exegesis::AngelicLiberalRhs,
        Exegesis::BugWitness,
        Exegesis::DemonicTotalCorrectness,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Exegesis::TotalCorrectness => "total-correctness",
            Exegesis::ExegesisV => "exegesis-v",
            Exegesis::PartialCorrectness => "partial-correctness",
            Exegesis::PartialIncorrectness => "partial-incorrectness",
            Exegesis::ExegesisVi => "exegesis-vi",
            Exegesis::Incorrectness => "incorrectness",
            Exegesis::AngelicLiberalLhs => "angelic-liberal-lhs",
            Exegesis::AngelicLiberalRhs => "angelic-liberal-rhs",
            Exegesis::BugWitness => "bug-witness",
            Exegesis::DemonicTotalCorrectness => "demonic-total-correctness",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Exegesis::TotalCorrectness => "total correctness (angelic)",
            Exegesis::ExegesisV => "exegesis V (???)",
            Exegesis::PartialCorrectness => "partial correctness",
            Exegesis::PartialIncorrectness => "partial incorrectness",
            Exegesis::ExegesisVi => "exegesis VI (¿¿¿)",
            Exegesis::Incorrectness => "incorrectness",
            Exegesis::AngelicLiberalLhs => "angelic liberal, bpc;top = bp;top",
            Exegesis::AngelicLiberalRhs => "angelic liberal, top;bpc = top;pc",
            Exegesis::BugWitness => "bug witness",
            Exegesis::DemonicTotalCorrectness => "demonic total correctness",
        }
    }

    /// The defining implication.
    pub fn definition(self) -> &'static str {
        match self {
            Exegesis::TotalCorrectness => "b => awp(p)(c)",
            Exegesis::ExegesisV => "dwlp(p)(c) => b",
            Exegesis::PartialCorrectness => "b => dwlp(p)(c)",
            Exegesis::PartialIncorrectness => "awp(p)(c) => b",
            Exegesis::ExegesisVi => "dslp(p)(b) => c",
            Exegesis::Incorrectness => "c => asp(p)(b)",
            Exegesis::AngelicLiberalLhs => "b => awlp(p)(c)",
            Exegesis::AngelicLiberalRhs => "c => aslp(p)(b)",
            Exegesis::BugWitness => "b && awp(p)(c) != false",
            Exegesis::DemonicTotalCorrectness => "b => dwp(p)(c)",
        }
    }

    /// The formulation equivalent to [`definition`](Self::definition) by a
    /// Galois connection, where one exists.
    pub fn galois_form(self) -> Option<&'static str> {
        match self {
            Exegesis::PartialCorrectness => Some("asp(p)(b) => c"),
            Exegesis::PartialIncorrectness => Some("c => dslp(p)(b)"),
            _ => None,
        }
    }

    /// The reading that holds on `{¬b} p {¬c}` exactly when this one holds
    /// on `{b} p {c}`.
    pub fn contrapositive(self) -> Option<Exegesis> {
        match self {
            Exegesis::TotalCorrectness => Some(Exegesis::ExegesisV),
            Exegesis::ExegesisV => Some(Exegesis::TotalCorrectness),
            Exegesis::PartialCorrectness => Some(Exegesis::PartialIncorrectness),
            Exegesis::PartialIncorrectness => Some(Exegesis::PartialCorrectness),
            Exegesis::Incorrectness => Some(Exegesis::ExegesisVi),
            Exegesis::ExegesisVi => Some(Exegesis::Incorrectness),
            _ => None,
        }
    }

    pub fn in_diagram(self) -> bool {
        self.contrapositive().is_some()
    }
}

impl fmt::Display for Exegesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown exegesis `{0}`")]
pub struct UnknownExegesis(pub String);

impl FromStr for Exegesis {
    type Err = UnknownExegesis;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Exegesis::ALL
            .iter()
            .copied()
            .find(|e| e.label() == s)
            .ok_or_else(|| UnknownExegesis(s.to_owned()))
    }
}

/// Evaluates the defining implication of `e` on `t`.
pub fn holds(e: Exegesis, t: &Triple) -> Result<bool, RelError> {
    let (b, r, c) = (&t.pre, &t.prog, &t.post);
    match e {
        Exegesis::TotalCorrectness => b.implies(&awp(r, c)?),
        Exegesis::ExegesisV => dwlp(r, c)?.implies(b),
        Exegesis::PartialCorrectness => b.implies(&dwlp(r, c)?),
        Exegesis::PartialIncorrectness => awp(r, c)?.implies(b),
        Exegesis::ExegesisVi => dslp(r, b)?.implies(c),
        Exegesis::Incorrectness => c.implies(&asp(r, b)?),
        Exegesis::AngelicLiberalLhs => b.implies(&awlp(r, c)?),
        Exegesis::AngelicLiberalRhs => c.implies(&aslp(r, b)?),
        Exegesis::BugWitness => b.intersects(&awp(r, c)?),
        Exegesis::DemonicTotalCorrectness => b.implies(&dwp(r, c)?),
    }
}

/// Evaluates the Galois-equivalent formulation, if `e` has one.
pub fn holds_galois_form(e: Exegesis, t: &Triple) -> Result<Option<bool>, RelError> {
    let (b, r, c) = (&t.pre, &t.prog, &t.post);
    Ok(match e {
        Exegesis::PartialCorrectness => Some(asp(r, b)?.implies(c)?),
        Exegesis::PartialIncorrectness => Some(c.implies(&dslp(r, b)?)?),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisPartner {
    pub definition: &'static str,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContrapositivePartner {
    pub exegesis: Exegesis,
    /// Verdict of the partner on `{¬b} p {¬c}`.
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixRow {
    pub exegesis: Exegesis,
    pub title: &'static str,
    pub definition: &'static str,
    pub verdict: bool,
    pub galois: Option<GaloisPartner>,
    pub contrapositive: Option<ContrapositivePartner>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matrix {
    pub rows: Vec<MatrixRow>,
    pub witness: Option<(usize, usize)>,
}

impl Matrix {
    pub fn verdict(&self, e: Exegesis) -> bool {
        self.rows.iter().any(|r| r.exegesis == e && r.verdict)
    }
}

/// Verdicts for every reading, with partners and a bug witness.
pub fn matrix(t: &Triple) -> Result<Matrix, RelError> {
    let negated = t.negated();
    let rows = Exegesis::ALL
        .iter()
        .map(|&e| {
            let galois = match (e.galois_form(), holds_galois_form(e, t)?) {
                (Some(definition), Some(verdict)) => Some(GaloisPartner {
                    definition,
                    verdict,
                }),
                _ => None,
            };
            let contrapositive = match e.contrapositive() {
                Some(partner) => Some(ContrapositivePartner {
                    exegesis: partner,
                    verdict: holds(partner, &negated)?,
                }),
                None => None,
            };
            Ok(MatrixRow {
                exegesis: e,
                title: e.title(),
                definition: e.definition(),
                verdict: holds(e, t)?,
                galois,
                contrapositive,
            })
        })
        .collect::<Result<_, RelError>>()?;
    Ok(Matrix {
        rows,
        witness: bug_witness(t),
    })
}

/// The lexicographically smallest `(s, s')` with `s ∈ b`, `s' ∈ c` and
/// `p(s, s')`.
pub fn bug_witness(t: &Triple) -> Option<(usize, usize)> {
    t.pre.iter().find_map(|s| {
        let hits = t.prog.successors(s).and(&t.post).ok()?;
        let first = hits.iter().next();
        first.map(|s2| (s, s2))
    })
}

/// One side-by-side check of two statements that must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub name: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub lhs_holds: bool,
    pub rhs_holds: bool,
}

impl Equivalence {
    pub fn ok(&self) -> bool {
        self.lhs_holds == self.rhs_holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub checks: Vec<Equivalence>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(Equivalence::ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Equivalence> {
        self.checks.iter().filter(|c| !c.ok())
    }
}

/// Both Galois connections: `b ⊆ dwlp(c) ⟺ asp(b) ⊆ c` and
/// `awp(c) ⊆ b ⟺ c ⊆ dslp(b)`.
pub fn check_galois(r: &Relation, b: &Predicate, c: &Predicate) -> Result<LawReport, RelError> {
    Ok(LawReport {
        checks: vec![
            Equivalence {
                name: "galois-dagger",
                lhs: "b => dwlp(p)(c)",
                rhs: "asp(p)(b) => c",
                lhs_holds: b.implies(&dwlp(r, c)?)?,
                rhs_holds: asp(r, b)?.implies(c)?,
            },
            Equivalence {
                name: "galois-ddagger",
                lhs: "awp(p)(c) => b",
                rhs: "c => dslp(p)(b)",
                lhs_holds: awp(r, c)?.implies(b)?,
                rhs_holds: c.implies(&dslp(r, b)?)?,
            },
        ],
    })
}

/// The four contrapositive edges of the diagram.
pub fn check_contrapositive(
    r: &Relation,
    b: &Predicate,
    c: &Predicate,
) -> Result<LawReport, RelError> {
    let (nb, nc) = (b.complement(), c.complement());
    Ok(LawReport {
        checks: vec![
            Equivalence {
                name: "contrapositive-dwlp-awp",
                lhs: "b => dwlp(p)(c)",
                rhs: "awp(p)(!c) => !b",
                lhs_holds: b.implies(&dwlp(r, c)?)?,
                rhs_holds: awp(r, &nc)?.implies(&nb)?,
            },
            Equivalence {
                name: "contrapositive-awp-dwlp",
                lhs: "b => awp(p)(c)",
                rhs: "dwlp(p)(!c) => !b",
                lhs_holds: b.implies(&awp(r, c)?)?,
                rhs_holds: dwlp(r, &nc)?.implies(&nb)?,
            },
            Equivalence {
                name: "contrapositive-asp-dslp",
                lhs: "asp(p)(b) => c",
                rhs: "!c => dslp(p)(!b)",
                lhs_holds: asp(r, b)?.implies(c)?,
                rhs_holds: nc.implies(&dslp(r, &nb)?)?,
            },
            Equivalence {
                name: "contrapositive-asp-dslp-reverse",
                lhs: "c => asp(p)(b)",
                rhs: "dslp(p)(!b) => !c",
                lhs_holds: c.implies(&asp(r, b)?)?,
                rhs_holds: dslp(r, &nb)?.implies(&nc)?,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relalg::StateSpace;
    use std::sync::Arc;

    fn space(n: usize) -> Arc<StateSpace> {
        StateSpace::anonymous(n).unwrap()
    }

    fn triple(n: usize, b: &[usize], pairs: &[(usize, usize)], c: &[usize]) -> Triple {
        let s = space(n);
        Triple::new(
            Predicate::from_states(&s, b.iter().copied()).unwrap(),
            Relation::from_pairs(&s, pairs.iter().copied()).unwrap(),
            Predicate::from_states(&s, c.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn skip_preserves_its_precondition() {
        let t = triple(3, &[0, 2], &[(0, 0), (1, 1), (2, 2)], &[0, 2]);
        assert!(holds(Exegesis::PartialCorrectness, &t).unwrap());
    }

    #[test]
    fn diverge_is_never_totally_correct() {
        let t = triple(2, &[1], &[], &[0, 1]);
        assert!(!holds(Exegesis::TotalCorrectness, &t).unwrap());
        assert!(holds(Exegesis::PartialCorrectness, &t).unwrap());
        assert_eq!(bug_witness(&t), None);
    }

    #[test]
    fn full_skip_full_satisfies_the_diagram() {
        let t = triple(2, &[0, 1], &[(0, 0), (1, 1)], &[0, 1]);
        let m = matrix(&t).unwrap();
        for e in Exegesis::ALL.into_iter().filter(|e| e.in_diagram()) {
            assert!(m.verdict(e), "{e}");
        }
        assert_eq!(m.witness, Some((0, 0)));
    }

    #[test]
    fn empty_pre_and_post() {
        let t = triple(2, &[], &[(0, 1), (1, 1)], &[]);
        let m = matrix(&t).unwrap();
        assert!(m.verdict(Exegesis::PartialCorrectness));
        assert!(m.verdict(Exegesis::TotalCorrectness));
        assert!(!m.verdict(Exegesis::BugWitness));
    }

    #[test]
    fn angelic_but_not_demonic() {
        let t = triple(2, &[0], &[(0, 0), (0, 1)], &[1]);
        let m = matrix(&t).unwrap();
        assert!(m.verdict(Exegesis::TotalCorrectness));
        assert!(!m.verdict(Exegesis::PartialCorrectness));
        assert!(!m.verdict(Exegesis::DemonicTotalCorrectness));
        assert_eq!(m.witness, Some((0, 1)));
    }

    #[test]
    fn matrix_rows_are_in_diagram_order_with_partners() {
        let t = triple(2, &[0], &[(0, 0), (0, 1)], &[1]);
        let m = matrix(&t).unwrap();
        let order: Vec<_> = m.rows.iter().map(|r| r.exegesis).collect();
        assert_eq!(order, Exegesis::ALL.to_vec());
        for row in &m.rows {
            if let Some(g) = &row.galois {
                assert_eq!(g.verdict, row.verdict);
            }
            if let Some(cp) = &row.contrapositive {
                assert_eq!(cp.verdict, row.verdict, "{}", row.exegesis);
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        for e in Exegesis::ALL {
            assert_eq!(e.label().parse::<Exegesis>().unwrap(), e);
            if let Some(p) = e.contrapositive() {
                assert_eq!(p.contrapositive(), Some(e));
            }
        }
        assert!("total".parse::<Exegesis>().is_err());
    }

    #[test]
    fn galois_trivial_cases() {
        let s = space(3);
        let full = Predicate::full(&s);
        let b = Predicate::from_states(&s, [1]).unwrap();
        let report = check_galois(&Relation::empty(&s), &b, &Predicate::empty(&s)).unwrap();
        assert!(report.checks[0].lhs_holds && report.checks[0].rhs_holds);
        let report = check_galois(&Relation::identity(&s), &b, &b).unwrap();
        assert!(report.checks[0].lhs_holds && report.checks[0].rhs_holds);
        assert!(report.ok());
        let report = check_contrapositive(&Relation::top(&s), &Predicate::empty(&s), &b).unwrap();
        assert!(report.checks[0].lhs_holds && report.checks[0].rhs_holds);
        let report = check_contrapositive(&Relation::top(&s), &b, &full).unwrap();
        assert!(report.checks[0].lhs_holds && report.checks[0].rhs_holds);
    }

    #[test]
    fn mismatched_triple_is_rejected() {
        let err = Triple::new(
            Predicate::full(&space(2)),
            Relation::identity(&space(3)),
            Predicate::full(&space(3)),
        )
        .unwrap_err();
        assert_eq!(err, RelError::SpaceMismatch);
    }

    fn each_model(mut f: impl FnMut(&Triple)) {
        for n in 1..=3 {
            let s = space(n);
            for mask in 0..1u64 << (n * n) {
                let r = Relation::from_mask(&s, mask);
                for bm in 0..1u64 << n {
                    for cm in 0..1u64 << n {
                        let t = Triple::new(
                            Predicate::from_mask(&s, bm),
                            r.clone(),
                            Predicate::from_mask(&s, cm),
                        )
                        .unwrap();
                        f(&t);
                    }
                }
            }
        }
    }

    #[test]
    fn formulations_agree_exhaustively() {
        each_model(|t| {
            for e in [Exegesis::PartialCorrectness, Exegesis::PartialIncorrectness] {
                assert_eq!(holds_galois_form(e, t).unwrap(), Some(holds(e, t).unwrap()));
            }
            assert!(check_galois(t.prog(), t.pre(), t.post()).unwrap().ok());
            assert!(check_contrapositive(t.prog(), t.pre(), t.post())
                .unwrap()
                .ok());
        });
    }

    #[test]
    fn bug_witness_is_the_negated_partial_correctness() {
        each_model(|t| {
            let b = holds(Exegesis::BugWitness, t).unwrap();
            let sp_avoids_c = asp(t.prog(), t.pre())
                .unwrap()
                .implies(&t.post().complement())
                .unwrap();
            assert_eq!(b, !sp_avoids_c);
            let w = bug_witness(t);
            assert_eq!(w.is_some(), b);
            if let Some((s, s2)) = w {
                assert!(t.pre().contains(s) && t.post().contains(s2) && t.prog().get(s, s2));
                let smallest = t
                    .prog()
                    .pairs()
                    .find(|&(x, y)| t.pre().contains(x) && t.post().contains(y));
                assert_eq!(smallest, Some((s, s2)));
            }
        });
    }

    #[test]
    fn demonic_total_implies_angelic_total() {
        each_model(|t| {
            if holds(Exegesis::DemonicTotalCorrectness, t).unwrap() {
                assert!(holds(Exegesis::TotalCorrectness, t).unwrap());
            }
        });
    }
}
