// Built by `wasm-pack build --target web` from crates/demo, which writes ../pkg.
import init, { frobenius_traces, norm_index_grid, l_series_partial_sums } from "../pkg/twincurve_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseInt($(id).value, 10);

function plot(canvas, ys, bound) {
  const g = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  g.clearRect(0, 0, w, h);
  if (ys.length === 0) return;
  const lo = Math.min(...ys, ...(bound ? bound.map((b) => -b) : []));
  const hi = Math.max(...ys, ...(bound || []));
  const y = (v) => h - 10 - ((v - lo) / (hi - lo || 1)) * (h - 20);
  const x = (i) => 10 + (i / Math.max(ys.length - 1, 1)) * (w - 20);
  g.strokeStyle = "#999";
  g.beginPath();
  g.moveTo(0, y(0));
  g.lineTo(w, y(0));
  g.stroke();
  if (bound) {
    g.strokeStyle = "#e88";
    for (const s of [1, -1]) {
      g.beginPath();
      bound.forEach((b, i) => (i ? g.lineTo(x(i), y(s * b)) : g.moveTo(x(i), y(s * b))));
      g.stroke();
    }
  }
  g.strokeStyle = "#136";
  g.beginPath();
  ys.forEach((v, i) => (i ? g.lineTo(x(i), y(v)) : g.moveTo(x(i), y(v))));
  g.stroke();
}

function traces() {
  const r = JSON.parse(frobenius_traces(num("tr-eps"), num("tr-p"), num("tr-d"), num("tr-l")));
  if (r.error) return ($("tr-out").textContent = r.error);
  plot($("tr-plot"), r.map((t) => t.a), r.map((t) => 2 * Math.sqrt(t.l)));
  $("tr-out").textContent = r.map((t) => `l = ${t.l}\t#E = ${t.count}\ta = ${t.a}`).join("\n");
}

function grid() {
  const r = JSON.parse(norm_index_grid(num("ni-p"), num("ni-d")));
  if (r.error) return ($("ni-out").textContent = r.error);
  const ds = [...new Set(r.map((c) => c.D))];
  const cell = (d, mu) => r.find((c) => c.D === d && c.mu === mu);
  const row = (mu) =>
    `<tr><th>&mu; = ${mu}</th>` +
    ds.map((d) => {
      const c = cell(d, mu);
      return c ? `<td class="${c.beta ? "odd" : "even"}">${c.delta}</td>` : "<td></td>";
    }).join("") + "</tr>";
  $("ni-out").innerHTML =
    `<table class="grid"><tr><th>D</th>${ds.map((d) => `<th>${d}</th>`).join("")}</tr>${row(1)}${row(-1)}</table>`;
}

function partial() {
  const r = JSON.parse(l_series_partial_sums(num("ls-eps"), num("ls-p"), num("ls-n")));
  if (r.error) return ($("ls-out").textContent = r.error);
  plot($("ls-plot"), r.partial);
  $("ls-out").textContent =
    `root number ${r.root_number}\nL(E, 1) ~ ${r.value}\ntail bound ${r.tail_bound.toExponential(3)}`;
}

await init();
$("tr-go").onclick = traces;
$("ni-go").onclick = grid;
$("ls-go").onclick = partial;
traces();
grid();
partial();
