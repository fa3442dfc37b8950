// Build first: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { flip_graph, geodesic, census } from "./pkg/fliplab_web.js";

const NS = "http://www.w3.org/2000/svg";
const $ = (id) => document.getElementById(id);
const out = (text) => { $("out").textContent = text; };

let graph = null;
let pos = [];
let from = null;
let to = null;
let route = [];

function el(tag, attrs, parent) {
  const e = document.createElementNS(NS, tag);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  parent.appendChild(e);
  return e;
}

// Spring layout seeded on a circle; deterministic for a given graph.
function layout(g, w, h) {
  const n = g.nodes.length;
  const p = g.nodes.map((_, i) => {
    const t = (2 * Math.PI * i) / n;
    return [w / 2 + (w / 3) * Math.cos(t), h / 2 + (h / 3) * Math.sin(t)];
  });
  const k = Math.sqrt((w * h) / n) * 0.6;
  for (let it = 0; it < 300; it++) {
    const f = p.map(() => [0, 0]);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = p[i][0] - p[j][0], dy = p[i][1] - p[j][1];
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const r = (k * k) / d2;
        f[i][0] += dx * r; f[i][1] += dy * r;
        f[j][0] -= dx * r; f[j][1] -= dy * r;
      }
    }
    for (const [a, b] of g.edges) {
      const dx = p[a][0] - p[b][0], dy = p[a][1] - p[b][1];
      const d = Math.max(Math.hypot(dx, dy), 1);
      const s = d / k;
      f[a][0] -= dx * s; f[a][1] -= dy * s;
      f[b][0] += dx * s; f[b][1] += dy * s;
    }
    const step = 10 * (1 - it / 300) + 0.5;
    for (let i = 0; i < n; i++) {
      const m = Math.max(Math.hypot(f[i][0], f[i][1]), 1e-9);
      p[i][0] = Math.min(w - 12, Math.max(12, p[i][0] + (f[i][0] / m) * step));
      p[i][1] = Math.min(h - 12, Math.max(12, p[i][1] + (f[i][1] / m) * step));
    }
  }
  return p;
}

function drawGraph() {
  const svg = $("graph");
  svg.replaceChildren();
  const onRoute = new Set();
  for (let i = 1; i < route.length; i++) {
    onRoute.add(Math.min(route[i - 1], route[i]) + ":" + Math.max(route[i - 1], route[i]));
  }
  for (const [a, b] of graph.edges) {
    const cls = onRoute.has(a + ":" + b) ? "edge on" : "edge";
    el("line", { x1: pos[a][0], y1: pos[a][1], x2: pos[b][0], y2: pos[b][1], class: cls }, svg);
  }
  const d = Math.max(...graph.nodes.map((v) => v.degree));
  graph.nodes.forEach((v, i) => {
    let cls = "node";
    if (v.degree < d) cls += " deficient";
    if (i === from) cls += " from";
    if (i === to) cls += " to";
    const c = el("circle", { cx: pos[i][0], cy: pos[i][1], r: graph.nodes.length > 150 ? 4 : 7, class: cls }, svg);
    c.addEventListener("click", (e) => pick(i, e.shiftKey));
  });
}

function drawPolygon(i) {
  const svg = $("polygon");
  svg.replaceChildren();
  const n = graph.points;
  const c = 150, r = 120;
  const pt = (k) => {
    if (k >= n) return [c, c];
    const t = -Math.PI / 2 + (2 * Math.PI * k) / n;
    return [c + r * Math.cos(t), c + r * Math.sin(t)];
  };
  const ring = Array.from({ length: n }, (_, k) => pt(k).join(",")).join(" ");
  el("polygon", { points: ring, class: "side" }, svg);
  for (const [a, b] of graph.nodes[i].chords) {
    const [x1, y1] = pt(a), [x2, y2] = pt(b);
    if (a === b) {
      // Loop at a boundary point around the puncture.
      const [mx, my] = [(x1 + 2 * c) / 3, (y1 + 2 * c) / 3];
      el("circle", { cx: mx, cy: my, r: Math.hypot(x1 - mx, y1 - my), class: "chord", fill: "none" }, svg);
    } else {
      el("line", { x1, y1, x2, y2, class: "chord" }, svg);
    }
  }
  if (graph.punctured) el("circle", { cx: c, cy: c, r: 4, fill: "#222" }, svg);
  for (let k = 0; k < n; k++) {
    const [x, y] = pt(k);
    el("circle", { cx: x, cy: y, r: 3, fill: "#222" }, svg);
  }
}

function pick(i, second) {
  if (second) to = i; else { from = i; to = null; }
  route = [];
  drawGraph();
  drawPolygon(i);
  out(`vertex ${i}: ${graph.nodes[i].chords.map((c) => c.join("-")).join(" ")}`);
}

function build() {
  try {
    graph = JSON.parse(flip_graph(Number($("n").value), $("punctured").checked));
  } catch (e) {
    out(String(e));
    return;
  }
  pos = layout(graph, 560, 560);
  from = to = null;
  route = [];
  drawGraph();
  drawPolygon(0);
  out(`${graph.surface}: ${graph.nodes.length} vertices, ${graph.edges.length} edges`);
}

await init();
$("build").addEventListener("click", build);
$("route").addEventListener("click", () => {
  if (from === null || to === null) return out("pick two vertices first");
  const r = JSON.parse(geodesic(graph.points, graph.punctured, from, to));
  route = r.path;
  drawGraph();
  out(`distance ${r.distance}, ${r.count} geodesic(s); path ${r.path.join(" -> ")}`);
});
$("census").addEventListener("click", () => {
  out("running...");
  setTimeout(() => {
    try {
      out(JSON.stringify(JSON.parse(census(Number($("m").value), Number($("cn").value))), null, 2));
    } catch (e) {
      out(String(e));
    }
  }, 0);
});
build();
