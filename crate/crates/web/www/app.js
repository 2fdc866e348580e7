import init, { analyze, denote_program, check_spec } from "./pkg/exegesis_web.js";

const $ = (id) => document.getElementById(id);

const SAMPLE_SPEC = `[space]
pw: correct, wrong
outcome: pending, success, failure, crash

[programs]
login = assume(outcome = pending);
  if pw = correct
  then outcome := success [] outcome := crash
  else outcome := failure [] diverge
  fi

[predicates]
correct_pw = pw = correct && outcome = pending
wrong_pw = pw = wrong && outcome = pending
failed = outcome = failure
success = outcome = success

[checks]
triple pc: pre=wrong_pw prog=login post=failed exegeses=partial-correctness expect=valid
triple tc: pre=correct_pw prog=login post=success exegeses=total-correctness,demonic-total-correctness expect=valid,invalid
kat atc: equation=angelic-total-correctness b=correct_pw p=login c=success expect=valid
`;

const model = { size: 3, rel: [], pre: [], post: [] };

function resize(n) {
  model.size = n;
  model.rel = Array(n * n).fill(false);
  model.pre = Array(n).fill(false);
  model.post = Array(n).fill(false);
}

function bitString(bits) {
  return bits.map((b) => (b ? "1" : "0")).join("");
}

function cell(on, label, toggle) {
  const td = document.createElement("td");
  td.textContent = label;
  td.className = on ? "on" : "";
  td.addEventListener("click", () => { toggle(); render(); });
  return td;
}

function drawGrids() {
  const n = model.size;
  const rel = $("rel");
  rel.replaceChildren();
  for (let s = 0; s < n; s++) {
    const tr = rel.insertRow();
    for (let t = 0; t < n; t++) {
      const i = s * n + t;
      tr.appendChild(cell(model.rel[i], "", () => { model.rel[i] = !model.rel[i]; }));
    }
  }
  for (const key of ["pre", "post"]) {
    const table = $(key);
    table.replaceChildren();
    for (let s = 0; s < n; s++) {
      table.insertRow().appendChild(cell(model[key][s], String(s), () => { model[key][s] = !model[key][s]; }));
    }
  }
}

function row(table, cells, cls) {
  const tr = table.insertRow();
  cells.forEach((text, i) => {
    const td = tr.insertCell();
    td.textContent = text;
    if (cls && i === 1) td.className = cls;
  });
}

const setText = (xs) => `{${xs.join(", ")}}`;

function drawResults() {
  const out = JSON.parse(analyze(model.size, bitString(model.rel), bitString(model.pre), bitString(model.post)));
  for (const id of ["verdicts", "transformers", "equations"]) $(id).replaceChildren();
  if (out.error) {
    $("witness").textContent = out.error;
    $("witness").className = "error";
    return;
  }
  for (const r of out.matrix) {
    const v = r.verdict ? "valid" : "invalid";
    row($("verdicts"), [r.title, v, r.definition], v);
  }
  $("witness").className = "";
  $("witness").textContent = out.witness
    ? `bug witness: ${out.witness[0]} -> ${out.witness[1]}`
    : "bug witness: none";
  for (const t of out.transformers) {
    row($("transformers"), [`${t.name}(p)(${t.argument})`, setText(t.states)]);
  }
  for (const e of out.equations) {
    const agree = e.equation_holds === e.transformer_holds ? "agrees" : "DISAGREES";
    row($("equations"), [e.equation, e.equation_holds ? "holds" : "fails", e.transformer_side, agree]);
  }
}

function render() {
  drawGrids();
  drawResults();
}

function runDenote() {
  const out = JSON.parse(denote_program($("space-src").value, $("prog-src").value));
  if (out.error) {
    $("denote-out").textContent = `error: ${out.error}`;
    return;
  }
  const lines = out.pairs.map((p) => `(${p.from}) -> (${p.to})`);
  if (out.no_successor.length) lines.push(`no successor: ${out.no_successor.map((s) => `(${s})`).join(" ")}`);
  $("denote-out").textContent = `${out.program}\n${out.states} states, ${out.pairs.length} pairs\n\n${lines.join("\n")}`;
}

function runCheck() {
  const out = JSON.parse(check_spec($("spec-src").value));
  $("check-out").textContent = out.error ? `error: ${out.error}` : out.text;
}

await init();

for (let n = 1; n <= 8; n++) $("size").add(new Option(String(n), String(n), n === 3, n === 3));
$("size").addEventListener("change", (e) => { resize(Number(e.target.value)); render(); });
$("gap").addEventListener("click", () => {
  $("size").value = "2";
  resize(2);
  model.rel = [true, true, false, false];
  model.pre = [true, false];
  model.post = [false, true];
  render();
});
$("run-denote").addEventListener("click", runDenote);
$("run-check").addEventListener("click", runCheck);
$("spec-src").value = SAMPLE_SPEC;

resize(3);
render();
runDenote();
runCheck();
