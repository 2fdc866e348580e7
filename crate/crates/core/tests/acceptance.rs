//! One PASS/FAIL line per acceptance criterion.
//!
//! Transformer and equation verdicts are recomputed here from their set
//! definitions on plain boolean matrices and compared with the library.

use std::path::PathBuf;
use std::process::Command;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exegesis::lang::{self, Program};
use exegesis::laws::{self, LawsConfig, LawsReport};
use exegesis::relalg::{Predicate, Relation, StateSpace};
use exegesis::topkat::{self, EquationLabel, Interpretation};
use exegesis::transformers as tf;
use exegesis::triples::{self, Triple};

type Set = Vec<bool>;
type Mat = Vec<Vec<bool>>;

struct Oracle {
    n: usize,
    r: Mat,
}

impl Oracle {
    fn of(rel: &Relation) -> Self {
        let n = rel.space().size();
        let r = (0..n)
            .map(|s| (0..n).map(|t| rel.get(s, t)).collect())
            .collect();
        Self { n, r }
    }

    fn awp(&self, c: &Set) -> Set {
        (0..self.n)
            .map(|s| (0..self.n).any(|t| self.r[s][t] && c[t]))
            .collect()
    }
    fn dwlp(&self, c: &Set) -> Set {
        (0..self.n)
            .map(|s| (0..self.n).all(|t| !self.r[s][t] || c[t]))
            .collect()
    }
    fn asp(&self, b: &Set) -> Set {
        (0..self.n)
            .map(|t| (0..self.n).any(|s| self.r[s][t] && b[s]))
            .collect()
    }
    fn dslp(&self, b: &Set) -> Set {
        (0..self.n)
            .map(|t| (0..self.n).all(|s| !self.r[s][t] || b[s]))
            .collect()
    }
    fn dom(&self) -> Set {
        (0..self.n).map(|s| self.r[s].iter().any(|&x| x)).collect()
    }
    fn cod(&self) -> Set {
        (0..self.n)
            .map(|t| (0..self.n).any(|s| self.r[s][t]))
            .collect()
    }
    fn dwp(&self, c: &Set) -> Set {
        and(&self.dwlp(c), &self.dom())
    }
    fn awlp(&self, c: &Set) -> Set {
        or(&self.awp(c), &not(&self.dom()))
    }
    fn dsp(&self, b: &Set) -> Set {
        and(&self.dslp(b), &self.cod())
    }
    fn aslp(&self, b: &Set) -> Set {
        or(&self.asp(b), &not(&self.cod()))
    }

    fn test(&self, b: &Set) -> Mat {
        (0..self.n)
            .map(|s| (0..self.n).map(|t| s == t && b[s]).collect())
            .collect()
    }
    fn top(&self) -> Mat {
        vec![vec![true; self.n]; self.n]
    }
    fn product(&self, ms: &[&Mat]) -> Mat {
        let mut acc: Mat = self.test(&vec![true; self.n]);
        for m in ms {
            acc = (0..self.n)
                .map(|s| {
                    (0..self.n)
                        .map(|t| (0..self.n).any(|k| acc[s][k] && m[k][t]))
                        .collect()
                })
                .collect();
        }
        acc
    }

    /// The six encoded equations computed on matrices.
    fn equation(&self, label: EquationLabel, b: &Set, c: &Set) -> bool {
        let (b, p, c, top) = (&self.test(b), &self.r, &self.test(c), &self.top());
        let (l, r) = match label {
            EquationLabel::PartialCorrectness => {
                (self.product(&[top, b, p, c]), self.product(&[top, b, p]))
            }
            EquationLabel::Incorrectness => {
                (self.product(&[top, b, p, c]), self.product(&[top, c]))
            }
            EquationLabel::AngelicTotalCorrectness => {
                (self.product(&[b, p, c, top]), self.product(&[b, top]))
            }
            EquationLabel::PartialIncorrectness => {
                (self.product(&[b, p, c, top]), self.product(&[p, c, top]))
            }
            EquationLabel::TopBpcTopPc => {
                (self.product(&[top, b, p, c]), self.product(&[top, p, c]))
            }
            EquationLabel::BpcTopBpTop => {
                (self.product(&[b, p, c, top]), self.product(&[b, p, top]))
            }
        };
        l == r
    }

    fn transformer_side(&self, label: EquationLabel, b: &Set, c: &Set) -> bool {
        match label {
            EquationLabel::PartialCorrectness => subset(&self.asp(b), c),
            EquationLabel::Incorrectness => subset(c, &self.asp(b)),
            EquationLabel::AngelicTotalCorrectness => subset(b, &self.awp(c)),
            EquationLabel::PartialIncorrectness => subset(&self.awp(c), b),
            EquationLabel::TopBpcTopPc => subset(c, &self.aslp(b)),
            EquationLabel::BpcTopBpTop => subset(b, &self.awlp(c)),
        }
    }

    fn star(&self) -> Mat {
        let mut m = self.test(&vec![true; self.n]);
        for (row, r) in m.iter_mut().zip(&self.r) {
            for (x, y) in row.iter_mut().zip(r) {
                *x |= *y;
            }
        }
        for k in 0..self.n {
            for s in 0..self.n {
                for t in 0..self.n {
                    m[s][t] |= m[s][k] && m[k][t];
                }
            }
        }
        m
    }
}

fn and(a: &Set, b: &Set) -> Set {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}
fn or(a: &Set, b: &Set) -> Set {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}
fn not(a: &Set) -> Set {
    a.iter().map(|x| !x).collect()
}
fn subset(a: &Set, b: &Set) -> bool {
    a.iter().zip(b).all(|(x, y)| !x || *y)
}
fn set_of(p: &Predicate) -> Set {
    (0..p.space().size()).map(|s| p.contains(s)).collect()
}
fn mat_of(r: &Relation) -> Mat {
    Oracle::of(r).r
}

#[derive(Default)]
struct Tally {
    checked: u64,
    violations: u64,
}

impl Tally {
    fn expect(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
    }
}

#[derive(Default)]
struct Sweep {
    models: u64,
    transformers: Tally,
    galois: Tally,
    contrapositive: Tally,
    de_morgan: Tally,
    correspondence: Tally,
    bug_witness: Tally,
}

fn sweep_model(sw: &mut Sweep, rel: &Relation, pre: &Predicate, post: &Predicate) {
    let o = Oracle::of(rel);
    let (b, c) = (set_of(pre), set_of(post));
    let (nb, nc) = (not(&b), not(&c));
    sw.models += 1;

    for (kind, arg, expected) in [
        (tf::awp as fn(&Relation, &Predicate) -> _, post, o.awp(&c)),
        (tf::dwlp, post, o.dwlp(&c)),
        (tf::asp, pre, o.asp(&b)),
        (tf::dslp, pre, o.dslp(&b)),
        (tf::dwp, post, o.dwp(&c)),
        (tf::awlp, post, o.awlp(&c)),
        (tf::dsp, pre, o.dsp(&b)),
        (tf::aslp, pre, o.aslp(&b)),
    ] {
        sw.transformers
            .expect(set_of(&kind(rel, arg).unwrap()) == expected);
    }

    sw.galois
        .expect(subset(&b, &o.dwlp(&c)) == subset(&o.asp(&b), &c));
    sw.galois
        .expect(subset(&o.awp(&c), &b) == subset(&c, &o.dslp(&b)));

    sw.contrapositive
        .expect(subset(&b, &o.dwlp(&c)) == subset(&o.awp(&nc), &nb));
    sw.contrapositive
        .expect(subset(&b, &o.awp(&c)) == subset(&o.dwlp(&nc), &nb));
    sw.contrapositive
        .expect(subset(&o.asp(&b), &c) == subset(&nc, &o.dslp(&nb)));
    sw.contrapositive
        .expect(subset(&c, &o.asp(&b)) == subset(&o.dslp(&nb), &nc));

    sw.de_morgan.expect(o.awp(&c) == not(&o.dwlp(&nc)));
    sw.de_morgan.expect(o.asp(&b) == not(&o.dslp(&nb)));
    sw.de_morgan.expect(o.dwp(&c) == not(&o.awlp(&nc)));
    sw.de_morgan.expect(o.dsp(&b) == not(&o.aslp(&nb)));

    let interp = Interpretation::new(rel.space())
        .with_prog("p", rel.clone())
        .and_then(|i| i.with_test("b", pre.clone()))
        .and_then(|i| i.with_test("c", post.clone()))
        .unwrap();
    for label in EquationLabel::ALL {
        let eq = o.equation(label, &b, &c);
        let corr = topkat::correspondence(label, &interp, "b", "p", "c").unwrap();
        sw.correspondence.expect(
            eq == o.transformer_side(label, &b, &c)
                && corr.equation_holds == eq
                && corr.transformer_holds == eq,
        );
    }

    let path = (0..o.n).any(|s| (0..o.n).any(|t| b[s] && o.r[s][t] && c[t]));
    let via_awp = and(&b, &o.awp(&c)).iter().any(|&x| x);
    let bpc = o.product(&[&o.test(&b), &o.r, &o.test(&c)]);
    let triple = Triple::new(pre.clone(), rel.clone(), post.clone()).unwrap();
    sw.bug_witness.expect(
        path == via_awp
            && path == bpc.iter().flatten().any(|&x| x)
            && path == triples::bug_witness(&triple).is_some(),
    );
}

fn exhaustive_sweep(max: usize) -> Sweep {
    let mut sw = Sweep::default();
    for n in 1..=max {
        let space = StateSpace::anonymous(n).unwrap();
        for mask in 0..1u64 << (n * n) {
            let rel = Relation::from_mask(&space, mask);
            for bm in 0..1u64 << n {
                let pre = Predicate::from_mask(&space, bm);
                for cm in 0..1u64 << n {
                    sweep_model(&mut sw, &rel, &pre, &Predicate::from_mask(&space, cm));
                }
            }
        }
    }
    sw
}

struct Line {
    ok: bool,
    text: String,
}

fn line(ok: bool, text: impl Into<String>) -> Line {
    Line {
        ok,
        text: text.into(),
    }
}

fn laws_named<'a>(r: &'a LawsReport, prefix: &str) -> Vec<&'a laws::LawReport> {
    r.laws
        .iter()
        .filter(|l| l.name.starts_with(prefix))
        .collect()
}

fn laws_ok(r: &LawsReport, prefix: &str, expected: usize) -> bool {
    let found = laws_named(r, prefix);
    found.len() == expected && found.iter().all(|l| l.passed && l.hits == 0)
}

fn tally_ok(t: &Tally) -> bool {
    t.checked > 0 && t.violations == 0
}

fn criterion_exhaustive(sw: &Sweep, lib: &LawsReport) -> Vec<Line> {
    let models_ok = sw.models == 33_032 && lib.models_checked == 33_032 && lib.sizes == [1, 2, 3];
    let base = models_ok && tally_ok(&sw.transformers);
    vec![
        line(
            base && tally_ok(&sw.galois) && laws_ok(lib, "galois-", 2),
            format!(
                "galois connections: {} models, {} checks, {} violations",
                sw.models, sw.galois.checked, sw.galois.violations
            ),
        ),
        line(
            base && tally_ok(&sw.contrapositive) && laws_ok(lib, "contrapositive-", 4),
            format!(
                "contrapositive edges: {} checks, {} violations",
                sw.contrapositive.checked, sw.contrapositive.violations
            ),
        ),
        line(
            base && tally_ok(&sw.de_morgan) && laws_ok(lib, "de-morgan-", 4),
            format!(
                "de morgan dualities: {} checks, {} violations",
                sw.de_morgan.checked, sw.de_morgan.violations
            ),
        ),
    ]
}

fn criterion_correspondence(sw: &Sweep, lib: &LawsReport) -> Line {
    let mut random = Sweep::default();
    let space = StateSpace::anonymous(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let m = laws::random_model(&mut rng, &space);
        sweep_model(&mut random, &m.relation, &m.pre, &m.post);
    }
    let lib_random = laws::run_laws(&LawsConfig::random(10_000, 2024, 6)).unwrap();
    let ok = tally_ok(&sw.correspondence)
        && tally_ok(&random.correspondence)
        && tally_ok(&random.transformers)
        && random.models == 10_000
        && laws_ok(lib, "correspondence-", 6)
        && laws_ok(&lib_random, "correspondence-", 6)
        && lib_random.models_checked == 10_000;
    line(
        ok,
        format!(
            "topkat correspondences: {} exhaustive + {} random checks at 6 states, {} violations",
            sw.correspondence.checked,
            random.correspondence.checked,
            sw.correspondence.violations + random.correspondence.violations
        ),
    )
}

fn criterion_gap() -> Line {
    let space = StateSpace::anonymous(2).unwrap();
    let r = Relation::from_pairs(&space, [(0, 0), (0, 1)]).unwrap();
    let b = Predicate::from_states(&space, [0]).unwrap();
    let c = Predicate::from_states(&space, [1]).unwrap();
    let interp = Interpretation::new(&space)
        .with_prog("p", r.clone())
        .and_then(|i| i.with_test("b", b.clone()))
        .and_then(|i| i.with_test("c", c.clone()))
        .unwrap();
    let eq = topkat::encode(EquationLabel::AngelicTotalCorrectness, "b", "p", "c");
    let equation = topkat::equation_holds(&eq, &interp).unwrap();
    let demonic = b.implies(&tf::dwp(&r, &c).unwrap()).unwrap();
    let o = Oracle::of(&r);
    let (bs, cs) = (set_of(&b), set_of(&c));
    let oracle =
        o.equation(EquationLabel::AngelicTotalCorrectness, &bs, &cs) && !subset(&bs, &o.dwp(&cs));
    let ok = equation && !demonic && oracle && eq.to_string() == "b;p;c;top = b;top";
    line(
        ok,
        format!("demonic gap: r={{(0,0),(0,1)}} b={{0}} c={{1}}: {eq} holds={equation}, b => dwp(p)(c) holds={demonic}"),
    )
}

fn criterion_bug_witness(sw: &Sweep, lib: &LawsReport) -> Line {
    let ok = tally_ok(&sw.bug_witness) && laws_ok(lib, "bug-witness", 1);
    line(
        ok,
        format!(
            "bug witness equivalence: {} checks, {} violations",
            sw.bug_witness.checked, sw.bug_witness.violations
        ),
    )
}

fn while_parts(src: &str) -> (Program, lang::BExpr, Program) {
    let p = lang::parse_program(src).unwrap();
    match &p {
        Program::While(g, body) => (p.clone(), g.clone(), (**body).clone()),
        other => panic!("not a loop: {other}"),
    }
}

fn criterion_language() -> Line {
    let space = StateSpace::new(vec![exegesis::relalg::Variable::range("x", 0, 2)]).unwrap();
    let mut ok = true;

    // Bodies that are defined everywhere: the equation holds literally.
    for src in [
        "while x < 2 do if x < 2 then x := x + 1 else skip fi od",
        "while x != 1 do x := 0 [] x := 1 od",
        "while x = 0 do x := 2 [] skip od",
        "while true do skip od",
        "while false do x := 0 od",
    ] {
        let (p, g, body) = while_parts(src);
        let gp = lang::eval_pred(&g, &space).unwrap();
        let lhs = lang::denote(&p, &space).unwrap();
        let rhs = Relation::test(&gp)
            .compose(&lang::denote(&body, &space).unwrap())
            .unwrap()
            .star()
            .compose(&Relation::test(&gp.complement()))
            .unwrap();
        ok &= lhs.equals(&rhs).unwrap();
    }

    // The counter: the body only runs where the guard admits it.
    let (p, g, body) = while_parts("while x < 2 do x := x + 1 od");
    let gp = lang::eval_pred(&g, &space).unwrap();
    let counter = lang::denote(&p, &space).unwrap();
    let pairs: Vec<(usize, usize)> = counter.pairs().collect();
    ok &= pairs == [(0, 2), (1, 2), (2, 2)];
    let rhs = Relation::test(&gp)
        .compose(&lang::denote_from(&body, &gp).unwrap())
        .unwrap()
        .star()
        .compose(&Relation::test(&gp.complement()))
        .unwrap();
    ok &= counter.equals(&rhs).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut star_ok = 0;
    for i in 0..1000 {
        let n = 1 + (i % 8);
        let space = StateSpace::anonymous(n).unwrap();
        let threshold = rng.next_u32();
        let rel = Relation::from_pairs(
            &space,
            (0..n * n)
                .filter(|_| rng.next_u32() < threshold)
                .map(|k| (k / n, k % n))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let star = rel.star();
        let unfold = Relation::identity(&space)
            .union(&rel.compose(&star).unwrap())
            .unwrap();
        if star.equals(&unfold).unwrap() && mat_of(&star) == Oracle::of(&rel).star() {
            star_ok += 1;
        }
    }
    ok &= star_ok == 1000;
    line(
        ok,
        format!("language semantics: counter = {pairs:?}, star unfolding on {star_ok}/1000 random relations"),
    )
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exegesis"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn criterion_corpus() -> Line {
    let out = binary()
        .arg("check")
        .arg(corpus("login.spec"))
        .arg("--json")
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    // Hand-reviewed verdicts.
    let scenarios = [
        ("pc_wrong_failed", "partial-correctness", true),
        ("tc_correct_success", "total-correctness", true),
        ("tc_correct_success", "demonic-total-correctness", false),
        ("inc_correct_crash", "incorrectness", true),
        ("pi_wrong_success", "partial-incorrectness", true),
    ];
    let verdict = |check: &str, exegesis: &str| -> Option<bool> {
        json["checks"]
            .as_array()?
            .iter()
            .find(|c| c["check"] == check)?["result"]["rows"]
            .as_array()?
            .iter()
            .find(|r| r["exegesis"] == exegesis)?["verdict"]
            .as_bool()
    };
    let matched = scenarios
        .iter()
        .filter(|(c, e, v)| verdict(c, e) == Some(*v))
        .count();
    let ok = out.status.code() == Some(0) && matched == scenarios.len() && json["passed"] == true;
    line(
        ok,
        format!(
            "corpus login.spec: exit {:?}, {matched}/{} scenario verdicts match",
            out.status.code(),
            scenarios.len()
        ),
    )
}

fn criterion_determinism() -> Line {
    let run = || {
        binary()
            .args([
                "laws",
                "--random",
                "--samples",
                "1000",
                "--seed",
                "7",
                "--json",
            ])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let ok =
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout;
    line(
        ok,
        format!(
            "cli determinism: two runs, {} and {} bytes, identical={}",
            a.stdout.len(),
            b.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

fn main() {
    let sweep = exhaustive_sweep(3);
    let lib = laws::run_laws(&LawsConfig::exhaustive(3)).unwrap();

    let mut lines = criterion_exhaustive(&sweep, &lib);
    lines.push(criterion_correspondence(&sweep, &lib));
    lines.push(criterion_gap());
    lines.push(criterion_bug_witness(&sweep, &lib));
    lines.push(criterion_language());
    lines.push(criterion_corpus());
    lines.push(criterion_determinism());

    let mut failed = 0;
    for (i, l) in lines.iter().enumerate() {
        println!(
            "criterion {}: {} {}",
            i + 1,
            if l.ok { "PASS" } else { "FAIL" },
            l.text
        );
        failed += usize::from(!l.ok);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
