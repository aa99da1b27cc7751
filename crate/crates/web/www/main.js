import init, { eigenfunctions, scaled_first_row, spectrum, stabilize } from "./pkg/degen_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

function plot(canvas, series, { logY = false, xLabel = "", yLabel = "" } = {}) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const g = canvas.getContext("2d");
  g.scale(dpr, dpr);
  g.clearRect(0, 0, w, h);
  const tf = logY ? (y) => Math.log10(y) : (y) => y;
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (const s of series) {
    s.x.forEach((x, i) => {
      const y = tf(s.y[i]);
      if (!Number.isFinite(y)) return;
      x0 = Math.min(x0, x); x1 = Math.max(x1, x);
      y0 = Math.min(y0, y); y1 = Math.max(y1, y);
    });
  }
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const m = { l: 56, r: 10, t: 10, b: 30 };
  const px = (x) => m.l + (x - x0) / (x1 - x0) * (w - m.l - m.r);
  const py = (y) => h - m.b - (y - y0) / (y1 - y0) * (h - m.t - m.b);
  g.strokeStyle = "#999";
  g.strokeRect(m.l, m.t, w - m.l - m.r, h - m.t - m.b);
  g.fillStyle = "#444";
  g.font = "11px system-ui";
  g.fillText((logY ? "1e" : "") + y1.toPrecision(3), 2, m.t + 10);
  g.fillText((logY ? "1e" : "") + y0.toPrecision(3), 2, h - m.b);
  g.fillText(x0.toPrecision(3), m.l, h - 12);
  g.fillText(x1.toPrecision(3), w - m.r - 30, h - 12);
  g.fillText(xLabel, w / 2, h - 4);
  g.fillText(yLabel, m.l + 4, m.t + 12);
  if (!logY && y0 < 0 && y1 > 0) {
    g.strokeStyle = "#ddd";
    g.beginPath(); g.moveTo(m.l, py(0)); g.lineTo(w - m.r, py(0)); g.stroke();
  }
  series.forEach((s, j) => {
    g.strokeStyle = s.color || COLORS[j % COLORS.length];
    g.setLineDash(s.dash || []);
    g.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = tf(s.y[i]);
      if (!Number.isFinite(y)) { pen = false; return; }
      pen ? g.lineTo(px(x), py(y)) : g.moveTo(px(x), py(y));
      pen = true;
      if (s.dots) g.fillRect(px(x) - 1.5, py(y) - 1.5, 3, 3);
    });
    g.stroke();
  });
  g.setLineDash([]);
}

function guard(note, f) {
  try {
    note.classList.remove("error");
    f();
  } catch (e) {
    note.textContent = String(e.message || e);
    note.classList.add("error");
  }
}

const alpha = () => Number($("alpha").value);

function drawEigen() {
  guard($("phi-note"), () => {
    const modes = Number($("modes").value), samples = 401;
    const v = eigenfunctions(alpha(), modes, samples);
    const x = Array.from({ length: samples }, (_, i) => i / (samples - 1));
    const series = [];
    for (let k = 0; k < modes; k++) series.push({ x, y: v.subarray(k * samples, (k + 1) * samples) });
    plot($("phi"), series, { xLabel: "x" });
    const l = spectrum(alpha(), modes);
    $("phi-note").textContent = "lambda: " + Array.from(l, (v) => v.toPrecision(6)).join(", ");
  });
}

function drawRow() {
  guard($("row-note"), () => {
    const n = Number($("row-count").value);
    const row = scaled_first_row(alpha(), n);
    const x = Array.from(row, (_, i) => i + 2);
    plot($("row"), [{ x, y: row, dots: true }], { logY: true, xLabel: "k", yLabel: "|b_1k| lambda_k^{3/2}" });
    $("row-note").textContent = `last scaled entry ${row[row.length - 1].toPrecision(6)}, minimum ${Math.min(...row).toPrecision(6)}`;
  });
}

function drawDecay() {
  guard($("decay-note"), () => {
    const c = stabilize(alpha(), 16, Number($("windows").value), Number($("tau").value), Number($("eps").value));
    const t = c.times;
    plot($("decay"), [
      { x: t, y: c.shifted, color: "#d62728" },
      { x: t, y: c.baseline, color: "#1f77b4", dash: [5, 4] },
    ], { logY: true, xLabel: "t", yLabel: "e^{lambda_1 t} ||u - psi_1||" });
    $("decay-note").textContent = "per-window log reductions: " +
      Array.from(c.log_reductions, (r) => r.toFixed(2)).join(", ") + " (dashed: no control)";
    c.free();
  });
}

function redraw() {
  const a = alpha();
  $("alpha-out").textContent = a.toFixed(2);
  $("regime").textContent = a < 1 ? "weak degeneracy" : "strong degeneracy";
  drawEigen();
  drawRow();
  drawDecay();
}

await init();
$("alpha").addEventListener("input", redraw);
$("modes").addEventListener("change", drawEigen);
$("row-count").addEventListener("change", drawRow);
$("run").addEventListener("click", drawDecay);
redraw();
