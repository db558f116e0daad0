import init, { butterfly, diffusion, portrait } from "./pkg/kharper_web.js";

const TAU = 2 * Math.PI;

function params(box) {
  const out = {};
  for (const el of box.querySelectorAll("input, select")) {
    out[el.name] = el.type === "number" ? Number(el.value) : el.value;
  }
  return out;
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

// Plots flat [x, y, x, y, ...] pairs mapped into the canvas with a margin.
function scatter(canvas, pairs, [x0, x1], [y0, y1], { size = 1, color = "#000" } = {}) {
  const ctx = clear(canvas);
  const m = 30, w = canvas.width - 2 * m, h = canvas.height - 2 * m;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(m, m, w, h);
  ctx.fillStyle = color;
  for (let i = 0; i < pairs.length; i += 2) {
    const px = m + ((pairs[i] - x0) / (x1 - x0)) * w;
    const py = m + (1 - (pairs[i + 1] - y0) / (y1 - y0)) * h;
    ctx.fillRect(px, py, size, size);
  }
  ctx.fillStyle = "#333";
  ctx.fillText(x0.toPrecision(3), m, canvas.height - 10);
  ctx.fillText(x1.toPrecision(3), m + w - 30, canvas.height - 10);
  ctx.fillText(y1.toPrecision(3), 2, m + 4);
  ctx.fillText(y0.toPrecision(3), 2, m + h);
  return ctx;
}

function wire(id, run) {
  const box = document.getElementById(id);
  const status = box.querySelector(".status");
  box.querySelector("button").addEventListener("click", () => {
    status.className = "status";
    status.textContent = "computing…";
    // let the status paint before the synchronous wasm call
    setTimeout(() => {
      const t = performance.now();
      try {
        const note = run(params(box), box.querySelector("canvas"));
        status.textContent = `${note} in ${((performance.now() - t) / 1000).toFixed(2)} s`;
      } catch (e) {
        status.className = "status error";
        status.textContent = String(e);
      }
    }, 10);
  });
}

wire("butterfly", (p, canvas) => {
  const pts = butterfly(p.kind, p.ratio1, p.ratio2, p.s_max, p.theta_count);
  const period = p.kind === "khm" ? TAU : 2 * TAU;
  scatter(canvas, pts, [0, period], [-Math.PI, Math.PI]);
  return `${pts.length / 2} eigenphases`;
});

wire("diffusion", (p, canvas) => {
  const raw = diffusion(p.kind, p.k1, p.k2, p.hbar, p.n_steps);
  const pts = [];
  for (let i = 0; i < raw.length; i += 2) {
    if (raw[i + 1] > 0) pts.push(Math.log10(raw[i]), Math.log10(raw[i + 1]));
  }
  if (pts.length === 0) throw new Error("variance stays at zero");
  let lo = Infinity, hi = -Infinity;
  for (let i = 1; i < pts.length; i += 2) { lo = Math.min(lo, pts[i]); hi = Math.max(hi, pts[i]); }
  if (hi - lo < 1e-9) { lo -= 1; hi += 1; }
  const ctx = scatter(canvas, pts, [0, Math.log10(p.n_steps) || 1], [lo, hi], { size: 2 });
  // slope of the last decade as a rough exponent
  const n = pts.length, j = Math.max(0, n - 2 * Math.ceil(n / 20));
  const alpha = (pts[n - 1] - pts[j + 1]) / (pts[n - 2] - pts[j] || 1);
  ctx.fillText("log₁₀ kicks →   ↑ log₁₀ σ²", 300, canvas.height - 10);
  return `σ² = ${raw[raw.length - 1].toExponential(3)}, late slope ≈ ${alpha.toFixed(2)}`;
});

wire("portrait", (p, canvas) => {
  const raw = portrait(p.kind, p.k1, p.k2, p.n_orbits, p.n_iter);
  // fold momentum onto one cell for display
  for (let i = 1; i < raw.length; i += 2) raw[i] = (((raw[i] + Math.PI) % TAU) + TAU) % TAU - Math.PI;
  scatter(canvas, raw, [0, TAU], [-Math.PI, Math.PI], { color: "#1a4f9c" });
  return `${raw.length / 2} points`;
});

await init();
for (const b of document.querySelectorAll("button")) b.disabled = false;
