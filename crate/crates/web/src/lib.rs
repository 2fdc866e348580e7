//! WebAssembly bindings for the browser demo.
//!
//! Every export takes plain strings and returns a JSON string. Failures come
//! back as `{"error": "..."}` rather than exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use exegesis::lang;
use exegesis::relalg::{Predicate, Relation, StateSpace};
use exegesis::report;
use exegesis::specfile;
use exegesis::topkat::{self, EquationLabel, Interpretation};
use exegesis::transformers::TransformerKind;
use exegesis::triples::{self, Triple};

/// Largest model the bit-matrix editor accepts.
pub const MAX_MODEL_SIZE: usize = 8;

/// State cap for spec text pasted into the page.
pub const DEMO_STATE_CAP: usize = 1024;

fn bits(text: &str, len: usize, what: &str) -> Result<Vec<bool>, String> {
    let bits: Vec<bool> = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(format!("{what}: unexpected `{c}`, use 0 and 1")),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != len {
        return Err(format!("{what}: expected {len} bits, got {}", bits.len()));
    }
    Ok(bits)
}

fn states(p: &Predicate) -> Vec<usize> {
    p.iter().collect()
}

/// Every verdict, transformer and equation for one model over `0..size`.
///
/// `relation` lists `size * size` bits row by row; `pre` and `post` list
/// `size` bits each.
pub fn analyze_model(size: usize, relation: &str, pre: &str, post: &str) -> Result<Value, String> {
    if size == 0 || size > MAX_MODEL_SIZE {
        return Err(format!("size must be within 1..={MAX_MODEL_SIZE}"));
    }
    let space = StateSpace::anonymous(size).map_err(|e| e.to_string())?;
    let r_bits = bits(relation, size * size, "relation")?;
    let r = Relation::from_pairs(
        &space,
        (0..size * size)
            .filter(|&i| r_bits[i])
            .map(|i| (i / size, i % size)),
    )
    .map_err(|e| e.to_string())?;
    let b_bits = bits(pre, size, "precondition")?;
    let c_bits = bits(post, size, "postcondition")?;
    let b = Predicate::from_fn(&space, |s| b_bits[s]);
    let c = Predicate::from_fn(&space, |s| c_bits[s]);

    let triple = Triple::new(b.clone(), r.clone(), c.clone()).map_err(|e| e.to_string())?;
    let matrix = triples::matrix(&triple).map_err(|e| e.to_string())?;

    let transformers = TransformerKind::ALL
        .iter()
        .map(|&k| {
            let (arg, name) = if k.is_backward() {
                (&c, "c")
            } else {
                (&b, "b")
            };
            let result = k.apply(&r, arg).map_err(|e| e.to_string())?;
            Ok(json!({ "name": k.name(), "argument": name, "states": states(&result) }))
        })
        .collect::<Result<Vec<_>, String>>()?;

    let interp = Interpretation::new(&space)
        .with_prog("p", r.clone())
        .and_then(|i| i.with_test("b", b.clone()))
        .and_then(|i| i.with_test("c", c.clone()))
        .map_err(|e| e.to_string())?;
    let equations = EquationLabel::ALL
        .iter()
        .map(|&l| topkat::correspondence(l, &interp, "b", "p", "c").map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(json!({
        "size": size,
        "pairs": r.pairs().collect::<Vec<_>>(),
        "pre": states(&b),
        "post": states(&c),
        "matrix": matrix.rows,
        "witness": matrix.witness,
        "transformers": transformers,
        "equations": equations,
    }))
}

/// The relation denoted by `program` over the variables in `space`, given
/// as the body of a `[space]` section.
pub fn denote_text(space: &str, program: &str) -> Result<Value, String> {
    let space = specfile::load_space(space, DEMO_STATE_CAP).map_err(|e| e.to_string())?;
    let p = lang::parse_program(program).map_err(|e| e.to_string())?;
    let r = lang::denote(&p, &space).map_err(|e| e.to_string())?;
    let pairs: Vec<Value> = r
        .pairs()
        .map(|(s, t)| json!({ "from": space.describe(s), "to": space.describe(t) }))
        .collect();
    let diverging: Vec<String> = (0..space.size())
        .filter(|&s| r.out_degree(s) == 0)
        .map(|s| space.describe(s))
        .collect();
    Ok(json!({
        "states": space.size(),
        "program": p.to_string(),
        "pairs": pairs,
        "no_successor": diverging,
    }))
}

/// Runs every check of a spec file.
pub fn check_text(text: &str) -> Result<Value, String> {
    let spec = specfile::load(text, DEMO_STATE_CAP).map_err(|e| e.to_string())?;
    let run = report::run_all(&spec).map_err(|e| e.to_string())?;
    let mut value = serde_json::to_value(&run).map_err(|e| e.to_string())?;
    value["text"] = Value::String(report::render_run(&run));
    Ok(value)
}

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn analyze(size: usize, relation: &str, pre: &str, post: &str) -> String {
    respond(analyze_model(size, relation, pre, post))
}

#[wasm_bindgen]
pub fn denote_program(space: &str, program: &str) -> String {
    respond(denote_text(space, program))
}

#[wasm_bindgen]
pub fn check_spec(text: &str) -> String {
    respond(check_text(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_gap_model() {
        let v = analyze_model(2, "11 00", "10", "01").unwrap();
        assert_eq!(v["pairs"], json!([[0, 0], [0, 1]]));
        assert_eq!(v["witness"], json!([0, 1]));
        let verdict = |e: &str| {
            v["matrix"]
                .as_array()
                .unwrap()
                .iter()
                .find(|r| r["exegesis"] == e)
                .unwrap()["verdict"]
                .clone()
        };
        assert_eq!(verdict("total-correctness"), json!(true));
        assert_eq!(verdict("demonic-total-correctness"), json!(false));
        let dwp = v["transformers"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["name"] == "dwp")
            .unwrap()
            .clone();
        assert_eq!(dwp, json!({ "name": "dwp", "argument": "c", "states": [] }));
        let eqs = v["equations"].as_array().unwrap();
        assert_eq!(eqs.len(), 6);
        assert!(eqs
            .iter()
            .all(|e| e["equation_holds"] == e["transformer_holds"]));
    }

    #[test]
    fn analyze_rejects_bad_input() {
        assert!(analyze_model(0, "", "", "").is_err());
        assert!(analyze_model(9, "", "", "").is_err());
        assert_eq!(
            analyze_model(2, "110", "10", "01").unwrap_err(),
            "relation: expected 4 bits, got 3"
        );
        assert!(analyze_model(2, "11x0", "10", "01")
            .unwrap_err()
            .contains("`x`"));
        let err: Value = serde_json::from_str(&analyze(2, "1", "1", "1")).unwrap();
        assert!(err["error"].is_string());
    }

    #[test]
    fn denote_counter() {
        let v = denote_text("x: 0..2", "while x < 2 do x := x + 1 od").unwrap();
        assert_eq!(v["states"], 3);
        assert_eq!(
            v["pairs"],
            json!([
                { "from": "x=0", "to": "x=2" },
                { "from": "x=1", "to": "x=2" },
                { "from": "x=2", "to": "x=2" },
            ])
        );
        assert_eq!(v["no_successor"], json!([]));
        let d = denote_text("x: 0..1", "assume(x = 0)").unwrap();
        assert_eq!(d["no_successor"], json!(["x=1"]));
        assert!(denote_text("x: 0..1", "x := x + 5")
            .unwrap_err()
            .contains("x=0"));
        assert!(denote_text("", "skip").is_err());
    }

    #[test]
    fn check_corpus() {
        let text = include_str!("../../core/corpus/login.spec");
        let v = check_text(text).unwrap();
        assert_eq!(v["passed"], true);
        assert!(v["text"]
            .as_str()
            .unwrap()
            .ends_with("result: PASS (14 checks, 0 failed)\n"));
        let err: Value = serde_json::from_str(&check_spec("[space]\nx 1\n")).unwrap();
        assert_eq!(err["error"], "line 2: expected `name: values`");
    }
}
