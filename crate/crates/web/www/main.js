// Expects `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { simulate, diagnose, distractors } from "./pkg/notional_web.js";

const $ = (id) => document.getElementById(id);
const show = (json) => {
  $("out").textContent = JSON.stringify(JSON.parse(json), null, 2);
};

await init();

$("simulate").onclick = () => show(simulate($("source").value, $("profile").value, ""));
$("diagnose").onclick = () =>
  show(diagnose($("source").value, $("answer").value, Number($("k").value), "exact"));
$("distractors").onclick = () => show(distractors($("source").value, Number($("k").value)));
