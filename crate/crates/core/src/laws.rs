//! Model-checking sweeps for the laws relating the triple readings.
//!
//! A model is a relation with a pre- and a postcondition over an anonymous
//! state space. Exhaustive sweeps enumerate every model of each size up to
//! a bound; random sweeps draw models from a seeded ChaCha8 stream, so a
//! seed reproduces the same models on every platform.

use std::fmt::Write as _;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::relalg::{Predicate, Relation, StateSpace};
use crate::topkat::{encode, equation_holds, eval, EquationLabel, Interpretation, Term};
use crate::transformers::{aslp, asp, awlp, awp, dslp, dsp, dwlp, dwp};
use crate::triples::{check_contrapositive, check_galois};

/// Largest size accepted by exhaustive sweeps; size `n` has `2^(n²)` relations.
pub const MAX_EXHAUSTIVE_SIZE: usize = 4;
/// Largest size accepted by random sweeps.
pub const MAX_RANDOM_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawsError {
    #[error("exhaustive sweeps are limited to {MAX_EXHAUSTIVE_SIZE} states, got {0}")]
    TooLargeForExhaustive(usize),
    #[error("random sweeps are limited to {MAX_RANDOM_SIZE} states, got {0}")]
    TooLargeForRandom(usize),
    #[error("model size must be at least 1")]
    ZeroSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every model with `1..=max_size` states.
    Exhaustive { max_size: usize },
    /// `samples` models with exactly `size` states.
    Random {
        samples: u64,
        seed: u64,
        size: usize,
    },
}

/// Deliberate defects for exercising the failure path of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Use `dwlp` where the demonic total correctness check needs `dwp`.
    DemonicAsLiberal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawsConfig {
    pub mode: Mode,
    pub fault: Option<Fault>,
}

impl LawsConfig {
    pub fn exhaustive(max_size: usize) -> Self {
        Self {
            mode: Mode::Exhaustive { max_size },
            fault: None,
        }
    }

    pub fn random(samples: u64, seed: u64, size: usize) -> Self {
        Self {
            mode: Mode::Random {
                samples,
                seed,
                size,
            },
            fault: None,
        }
    }
}

/// A relation with pre- and postcondition over `0..size`.
#[derive(Debug, Clone)]
pub struct Model {
    pub relation: Relation,
    pub pre: Predicate,
    pub post: Predicate,
}

impl Model {
    pub fn size(&self) -> usize {
        self.relation.space().size()
    }

    fn interpretation(&self) -> Interpretation {
        Interpretation::new(self.relation.space())
            .with_prog("p", self.relation.clone())
            .and_then(|i| i.with_test("b", self.pre.clone()))
            .and_then(|i| i.with_test("c", self.post.clone()))
            .expect("model components share one space")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub size: usize,
    /// Rows of the relation as `0`/`1` strings.
    pub relation: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
    pub lhs_holds: bool,
    pub rhs_holds: bool,
}

impl Counterexample {
    fn new(m: &Model, lhs_holds: bool, rhs_holds: bool) -> Self {
        let n = m.size();
        Self {
            size: n,
            relation: (0..n)
                .map(|s| {
                    (0..n)
                        .map(|t| if m.relation.get(s, t) { '1' } else { '0' })
                        .collect()
                })
                .collect(),
            pairs: m.relation.pairs().collect(),
            pre: m.pre.iter().collect(),
            post: m.post.iter().collect(),
            lhs_holds,
            rhs_holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    /// The two sides agree on every model.
    Forall,
    /// Some model has the left side true and the right side false.
    Exists,
}

/// One checked law: two statements about a model and how they must relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Galois(usize),
    Contrapositive(usize),
    DeMorgan(usize),
    Correspondence(EquationLabel),
    BugWitness,
    DemonicImpliesAngelic,
    DemonicGap,
}

impl Law {
    pub fn all() -> Vec<Law> {
        let mut laws = vec![Law::Galois(0), Law::Galois(1)];
        laws.extend((0..4).map(Law::Contrapositive));
        laws.extend((0..4).map(Law::DeMorgan));
        laws.extend(EquationLabel::ALL.map(Law::Correspondence));
        laws.extend([Law::BugWitness, Law::DemonicImpliesAngelic, Law::DemonicGap]);
        laws
    }

    pub fn name(self) -> String {
        const GALOIS: [&str; 2] = ["galois-dagger", "galois-ddagger"];
        const CONTRA: [&str; 4] = [
            "contrapositive-dwlp-awp",
            "contrapositive-awp-dwlp",
            "contrapositive-asp-dslp",
            "contrapositive-asp-dslp-reverse",
        ];
        const DE_MORGAN: [&str; 4] = [
            "de-morgan-awp-dwlp",
            "de-morgan-asp-dslp",
            "de-morgan-dwp-awlp",
            "de-morgan-dsp-aslp",
        ];
        match self {
            Law::Galois(i) => GALOIS[i].into(),
            Law::Contrapositive(i) => CONTRA[i].into(),
            Law::DeMorgan(i) => DE_MORGAN[i].into(),
            Law::Correspondence(l) => format!("correspondence-{}", l.label()),
            Law::BugWitness => "bug-witness".into(),
            Law::DemonicImpliesAngelic => "demonic-implies-angelic".into(),
            Law::DemonicGap => "demonic-gap".into(),
        }
    }

    pub fn statement(self) -> String {
        const GALOIS: [(&str, &str); 2] = [
            ("b => dwlp(p)(c)", "asp(p)(b) => c"),
            ("awp(p)(c) => b", "c => dslp(p)(b)"),
        ];
        const CONTRA: [(&str, &str); 4] = [
            ("b => dwlp(p)(c)", "awp(p)(!c) => !b"),
            ("b => awp(p)(c)", "dwlp(p)(!c) => !b"),
            ("asp(p)(b) => c", "!c => dslp(p)(!b)"),
            ("c => asp(p)(b)", "dslp(p)(!b) => !c"),
        ];
        const DE_MORGAN: [&str; 4] = [
            "awp(p)(c) = !dwlp(p)(!c)",
            "asp(p)(b) = !dslp(p)(!b)",
            "dwp(p)(c) = !awlp(p)(!c)",
            "dsp(p)(b) = !aslp(p)(!b)",
        ];
        match self {
            Law::Galois(i) => format!("{}  <=>  {}", GALOIS[i].0, GALOIS[i].1),
            Law::Contrapositive(i) => format!("{}  <=>  {}", CONTRA[i].0, CONTRA[i].1),
            Law::DeMorgan(i) => DE_MORGAN[i].into(),
            Law::Correspondence(l) => {
                format!(
                    "{}  <=>  {}",
                    encode(l, "b", "p", "c"),
                    l.transformer_side()
                )
            }
            Law::BugWitness => "b;p;c != 0  <=>  b && awp(p)(c) != false".into(),
            Law::DemonicImpliesAngelic => "b => dwp(p)(c)  ==>  b;p;c;top = b;top".into(),
            Law::DemonicGap => "some model has b;p;c;top = b;top but not b => dwp(p)(c)".into(),
        }
    }

    pub fn quantifier(self) -> Quantifier {
        match self {
            Law::DemonicGap => Quantifier::Exists,
            _ => Quantifier::Forall,
        }
    }

    /// The two sides of the law on `m`, and whether `m` violates it (for
    /// `Forall` laws) or witnesses it (for `Exists` laws).
    pub fn evaluate(self, m: &Model, fault: Option<Fault>) -> (bool, bool, bool) {
        let (r, b, c) = (&m.relation, &m.pre, &m.post);
        let (nb, nc) = (b.complement(), c.complement());
        let (lhs, rhs) = match self {
            Law::Galois(i) => {
                let e = &check_galois(r, b, c).expect("same space").checks[i];
                (e.lhs_holds, e.rhs_holds)
            }
            Law::Contrapositive(i) => {
                let e = &check_contrapositive(r, b, c).expect("same space").checks[i];
                (e.lhs_holds, e.rhs_holds)
            }
            Law::DeMorgan(i) => {
                let (x, y) = match i {
                    0 => (awp(r, c), dwlp(r, &nc)),
                    1 => (asp(r, b), dslp(r, &nb)),
                    2 => (dwp(r, c), awlp(r, &nc)),
                    _ => (dsp(r, b), aslp(r, &nb)),
                };
                let (x, y) = (x.expect("same space"), y.expect("same space"));
                return (true, x == y.complement(), x != y.complement());
            }
            Law::Correspondence(l) => {
                let eq = encode(l, "b", "p", "c");
                (
                    equation_holds(&eq, &m.interpretation()).expect("all symbols bound"),
                    l.transformer_holds(r, b, c).expect("same space"),
                )
            }
            Law::BugWitness => {
                let bpc = Term::product([Term::test("b"), Term::prog("p"), Term::test("c")]);
                (
                    !eval(&bpc, &m.interpretation()).expect("bound").is_empty(),
                    b.intersects(&awp(r, c).expect("same space"))
                        .expect("same space"),
                )
            }
            Law::DemonicImpliesAngelic | Law::DemonicGap => {
                let demonic = match fault {
                    Some(Fault::DemonicAsLiberal) => dwlp(r, c),
                    None => dwp(r, c),
                }
                .expect("same space");
                let eq = encode(EquationLabel::AngelicTotalCorrectness, "b", "p", "c");
                let angelic = equation_holds(&eq, &m.interpretation()).expect("bound");
                let demonic = b.implies(&demonic).expect("same space");
                if self == Law::DemonicGap {
                    return (angelic, demonic, angelic && !demonic);
                }
                return (demonic, angelic, demonic && !angelic);
            }
        };
        (lhs, rhs, lhs != rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub name: String,
    pub statement: String,
    pub quantifier: Quantifier,
    pub models_checked: u64,
    /// Models violating a `Forall` law, or witnessing an `Exists` law.
    pub hits: u64,
    pub passed: bool,
    /// First violating (or witnessing) model in sweep order.
    pub example: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawsReport {
    pub mode: &'static str,
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub models_checked: u64,
    pub laws: Vec<LawReport>,
    pub passed: bool,
}

/// Number of models with exactly `n` states: `2^(n²) · 4^n`.
pub fn models_of_size(n: usize) -> u64 {
    1u64 << (n * n + 2 * n)
}

#[derive(Clone)]
struct Tally {
    hits: Vec<u64>,
    first: Vec<Option<(u64, Counterexample)>>,
}

impl Tally {
    fn new(laws: usize) -> Self {
        Self {
            hits: vec![0; laws],
            first: vec![None; laws],
        }
    }

    fn record(&mut self, laws: &[Law], order: u64, m: &Model, fault: Option<Fault>) {
        for (i, law) in laws.iter().enumerate() {
            let (lhs, rhs, hit) = law.evaluate(m, fault);
            if hit {
                self.hits[i] += 1;
                if self.first[i].as_ref().is_none_or(|(o, _)| order < *o) {
                    self.first[i] = Some((order, Counterexample::new(m, lhs, rhs)));
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for i in 0..self.hits.len() {
            self.hits[i] += other.hits[i];
            let take = match (&self.first[i], &other.first[i]) {
                (None, Some(_)) => true,
                (Some((a, _)), Some((b, _))) => b < a,
                _ => false,
            };
            if take {
                self.first[i] = other.first[i].clone();
            }
        }
        self
    }
}

fn sweep_size(n: usize, laws: &[Law], fault: Option<Fault>) -> Tally {
    let space = StateSpace::anonymous(n).expect("n >= 1");
    let preds: Vec<Predicate> = (0..1u64 << n)
        .map(|m| Predicate::from_mask(&space, m))
        .collect();
    let per_relation = |mask: u64| {
        let mut tally = Tally::new(laws.len());
        let relation = Relation::from_mask(&space, mask);
        for (bi, pre) in preds.iter().enumerate() {
            for (ci, post) in preds.iter().enumerate() {
                let order = ((mask << n | bi as u64) << n) | ci as u64;
                let model = Model {
                    relation: relation.clone(),
                    pre: pre.clone(),
                    post: post.clone(),
                };
                tally.record(laws, order, &model, fault);
            }
        }
        tally
    };
    let masks = 0..1u64 << (n * n);
    #[cfg(feature = "parallel")]
    let tally = masks
        .into_par_iter()
        .map(per_relation)
        .reduce(|| Tally::new(laws.len()), Tally::merge);
    #[cfg(not(feature = "parallel"))]
    let tally = masks
        .map(per_relation)
        .fold(Tally::new(laws.len()), Tally::merge);
    tally
}

/// Draws one model from `rng`. Each model picks its own densities so that
/// sparse relations (with divergent and unreachable states) are common.
///
/// Every bit is `next_u32() < threshold`, where `threshold` is itself drawn
/// with `next_u32()` once per component: first the relation, then the
/// precondition, then the postcondition.
pub fn random_model(rng: &mut ChaCha8Rng, space: &Arc<StateSpace>) -> Model {
    let n = space.size();
    let mut draw = |count: usize| -> Vec<bool> {
        let threshold = rng.next_u32();
        (0..count).map(|_| rng.next_u32() < threshold).collect()
    };
    let bits = draw(n * n);
    let relation = Relation::from_pairs(
        space,
        (0..n * n).filter(|&i| bits[i]).map(|i| (i / n, i % n)),
    )
    .expect("in range");
    let pre_bits = draw(n);
    let post_bits = draw(n);
    Model {
        relation,
        pre: Predicate::from_fn(space, |s| pre_bits[s]),
        post: Predicate::from_fn(space, |s| post_bits[s]),
    }
}

pub fn run_laws(config: &LawsConfig) -> Result<LawsReport, LawsError> {
    let laws = Law::all();
    let (mode, sizes, seed, tally, models_checked) = match config.mode {
        Mode::Exhaustive { max_size } => {
            if max_size == 0 {
                return Err(LawsError::ZeroSize);
            }
            if max_size > MAX_EXHAUSTIVE_SIZE {
                return Err(LawsError::TooLargeForExhaustive(max_size));
            }
            let sizes: Vec<usize> = (1..=max_size).collect();
            // Sizes are swept smallest first so the first hit is also a
            // smallest one.
            let mut total = Tally::new(laws.len());
            let mut offset = 0u64;
            for &n in &sizes {
                let mut t = sweep_size(n, &laws, config.fault);
                for first in t.first.iter_mut().flatten() {
                    first.0 += offset;
                }
                offset += models_of_size(n);
                total = total.merge(t);
            }
            let count = sizes.iter().map(|&n| models_of_size(n)).sum();
            ("exhaustive", sizes, None, total, count)
        }
        Mode::Random {
            samples,
            seed,
            size,
        } => {
            if size == 0 {
                return Err(LawsError::ZeroSize);
            }
            if size > MAX_RANDOM_SIZE {
                return Err(LawsError::TooLargeForRandom(size));
            }
            let space = StateSpace::anonymous(size).expect("size >= 1");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let models: Vec<Model> = (0..samples)
                .map(|_| random_model(&mut rng, &space))
                .collect();
            let per_model = |(i, m): (usize, &Model)| {
                let mut t = Tally::new(laws.len());
                t.record(&laws, i as u64, m, config.fault);
                t
            };
            #[cfg(feature = "parallel")]
            let tally = models
                .par_iter()
                .enumerate()
                .map(per_model)
                .reduce(|| Tally::new(laws.len()), Tally::merge);
            #[cfg(not(feature = "parallel"))]
            let tally = models
                .iter()
                .enumerate()
                .map(per_model)
                .fold(Tally::new(laws.len()), Tally::merge);
            ("random", vec![size], Some(seed), tally, samples)
        }
    };
    let laws: Vec<LawReport> = laws
        .iter()
        .enumerate()
        .map(|(i, law)| {
            let hits = tally.hits[i];
            let passed = match law.quantifier() {
                Quantifier::Forall => hits == 0,
                Quantifier::Exists => hits > 0,
            };
            LawReport {
                name: law.name(),
                statement: law.statement(),
                quantifier: law.quantifier(),
                models_checked,
                hits,
                passed,
                example: tally.first[i].as_ref().map(|(_, ce)| ce.clone()),
            }
        })
        .collect();
    let passed = laws.iter().all(|l| l.passed);
    Ok(LawsReport {
        mode,
        sizes,
        seed,
        models_checked,
        laws,
        passed,
    })
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Plain-text rendering of a laws report.
pub fn render_laws(report: &LawsReport) -> String {
    let mut out = String::new();
    let sizes = match report.sizes.as_slice() {
        [n] => format!("{n} states"),
        s => format!("sizes {}..={}", s[0], s[s.len() - 1]),
    };
    let _ = write!(out, "laws: {}, {sizes}", report.mode);
    if let Some(seed) = report.seed {
        let _ = write!(out, ", seed {seed}");
    }
    let _ = writeln!(out, ", {} models", report.models_checked);
    let width = report.laws.iter().map(|l| l.name.len()).max().unwrap_or(0);
    for law in &report.laws {
        let _ = writeln!(
            out,
            "  {:width$}  {}  {}",
            law.name,
            verdict(law.passed),
            law.statement
        );
        let show = match law.quantifier {
            Quantifier::Forall => !law.passed,
            Quantifier::Exists => law.passed,
        };
        if let (true, Some(ce)) = (show, &law.example) {
            let what = match law.quantifier {
                Quantifier::Forall => format!("counterexample ({} violations)", law.hits),
                Quantifier::Exists => "witness".to_string(),
            };
            let _ = writeln!(out, "      {what}: {} states", ce.size);
            for row in &ce.relation {
                let _ = writeln!(out, "        {row}");
            }
            let _ = writeln!(
                out,
                "      p = {:?}, b = {:?}, c = {:?}, lhs = {}, rhs = {}",
                ce.pairs, ce.pre, ce.post, ce.lhs_holds, ce.rhs_holds
            );
        }
    }
    let count = |prefix: &str| {
        report
            .laws
            .iter()
            .filter(|l| l.name.starts_with(prefix))
            .count()
    };
    let _ = writeln!(
        out,
        "summary: galois ({}), contrapositive edges ({}), de morgan dualities ({}), correspondences ({}), bug witness, demonic gap: {}, {} models checked",
        count("galois"),
        count("contrapositive"),
        count("de-morgan"),
        count("correspondence"),
        verdict(report.passed),
        report.models_checked
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_counts() {
        assert_eq!(models_of_size(1), 8);
        assert_eq!(models_of_size(2), 16 * 16);
        assert_eq!(models_of_size(3), 512 * 64);
    }

    #[test]
    fn exhaustive_size_two_passes() {
        let report = run_laws(&LawsConfig::exhaustive(2)).unwrap();
        assert!(report.passed, "{}", render_laws(&report));
        assert_eq!(report.models_checked, 8 + 256);
        assert!(report.laws.iter().all(|l| l.models_checked == 264));
    }

    #[test]
    fn limits() {
        assert_eq!(
            run_laws(&LawsConfig::exhaustive(5)).unwrap_err(),
            LawsError::TooLargeForExhaustive(5)
        );
        assert_eq!(
            run_laws(&LawsConfig::exhaustive(0)).unwrap_err(),
            LawsError::ZeroSize
        );
        assert_eq!(
            run_laws(&LawsConfig::random(1, 0, 65)).unwrap_err(),
            LawsError::TooLargeForRandom(65)
        );
    }

    #[test]
    fn random_models_are_reproducible() {
        let space = StateSpace::anonymous(5).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    let m = random_model(&mut rng, &space);
                    (m.relation, m.pre, m.post)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn demonic_gap_is_found_at_two_states() {
        let report = run_laws(&LawsConfig::exhaustive(2)).unwrap();
        let gap = report
            .laws
            .iter()
            .find(|l| l.name == "demonic-gap")
            .unwrap();
        let w = gap.example.as_ref().unwrap();
        assert_eq!(w.size, 2);
        assert!(w.lhs_holds && !w.rhs_holds);
    }

    #[test]
    fn injected_fault_is_reported() {
        let mut config = LawsConfig::exhaustive(2);
        config.fault = Some(Fault::DemonicAsLiberal);
        let report = run_laws(&config).unwrap();
        assert!(!report.passed);
        let failed: Vec<_> = report
            .laws
            .iter()
            .filter(|l| !l.passed)
            .map(|l| l.name.as_str())
            .collect();
        assert_eq!(failed, ["demonic-implies-angelic"]);
        let text = render_laws(&report);
        assert!(text.contains("counterexample"));
    }
}
