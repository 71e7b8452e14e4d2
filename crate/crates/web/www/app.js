import init, { cap_spectrum, sweep_trajectories, field_map } from "./pkg/stark_cap_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

// Maps a complex-plane box onto a canvas with a margin.
function frame(canvas, re, im, margin = 40) {
  const w = canvas.width - 2 * margin, h = canvas.height - 2 * margin;
  return {
    x: (r) => margin + ((r - re[0]) / (re[1] - re[0])) * w,
    y: (i) => canvas.height - margin - ((i - im[0]) / (im[1] - im[0])) * h,
  };
}

function axes(ctx, f, re, im) {
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  if (re[0] < 0 && re[1] > 0) { ctx.moveTo(f.x(0), f.y(im[0])); ctx.lineTo(f.x(0), f.y(im[1])); }
  if (im[0] < 0 && im[1] > 0) { ctx.moveTo(f.x(re[0]), f.y(0)); ctx.lineTo(f.x(re[1]), f.y(0)); }
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(`Re ${re[0].toFixed(2)} .. ${re[1].toFixed(2)}`, 8, 14);
  ctx.fillText(`Im ${im[0].toFixed(2)} .. ${im[1].toFixed(2)}`, 8, 28);
}

function timed(status, body) {
  const t0 = performance.now();
  try {
    body();
    status.className = "";
    status.textContent = `${(performance.now() - t0).toFixed(0)} ms`;
  } catch (e) {
    status.className = "err";
    status.textContent = String(e);
  }
}

function runSpectrum() {
  timed($("sp-status"), () => {
    const depth = num("sp-depth");
    const potential = depth > 0 ? { kind: "gaussian_well", depth, width: 1, center: 0 } : { kind: "zero" };
    const out = JSON.parse(cap_spectrum(JSON.stringify({
      potential, include_stark: $("sp-stark").checked,
      a: -15, b: 15, h: 0.02, eps: num("sp-eps"), sigma: [0, 0], k: Math.round(num("sp-k")),
    })));
    const zs = out.eigenvalues;
    const re = [Math.min(0, ...zs.map((z) => z.re)) - 0.5, Math.max(...zs.map((z) => z.re)) + 0.5];
    const im = [Math.min(...zs.map((z) => z.im)) - 0.5, Math.max(0, ...zs.map((z) => z.im)) + 0.5];
    const c = $("sp-plot"), ctx = c.getContext("2d");
    ctx.clearRect(0, 0, c.width, c.height);
    const f = frame(c, re, im);
    axes(ctx, f, re, im);
    ctx.fillStyle = "#c03";
    for (const z of zs) { ctx.beginPath(); ctx.arc(f.x(z.re), f.y(z.im), 3, 0, 2 * Math.PI); ctx.fill(); }
    $("sp-table").innerHTML = zs
      .map((z, i) => `<tr><td>${i}</td><td>${z.re.toFixed(6)}</td><td>${z.im.toFixed(6)}</td><td>${out.residuals[i].toExponential(1)}</td></tr>`)
      .join("");
  });
}

function runSweep() {
  timed($("sw-status"), () => {
    const window = { re_min: -2, re_max: 1, im_min: num("sw-im"), im_max: 0 };
    const out = JSON.parse(sweep_trajectories(JSON.stringify({
      potential: { kind: "gaussian_well", depth: num("sw-depth"), width: 1, center: 0 },
      a: num("sw-a"), b: 15, h: num("sw-h"), window,
    })));
    const re = [window.re_min - 0.3, window.re_max + 0.3];
    const im = [window.im_min - 0.1, window.im_max + 0.1];
    const c = $("sw-plot"), ctx = c.getContext("2d");
    ctx.clearRect(0, 0, c.width, c.height);
    const f = frame(c, re, im);
    axes(ctx, f, re, im);
    ctx.strokeStyle = "#000";
    ctx.strokeRect(f.x(window.re_min), f.y(window.im_max),
      f.x(window.re_max) - f.x(window.re_min), f.y(window.im_min) - f.y(window.im_max));
    for (const t of out.trajectories) {
      const hue = (t.id * 137.5) % 360;
      ctx.strokeStyle = ctx.fillStyle = `hsl(${hue},70%,40%)`;
      ctx.beginPath();
      t.points.forEach(([, r, i], k) => (k ? ctx.lineTo(f.x(r), f.y(i)) : ctx.moveTo(f.x(r), f.y(i))));
      ctx.stroke();
    }
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 2;
    for (const e of out.estimates) {
      const [x, y] = [f.x(e.z[0]), f.y(e.z[1])];
      ctx.beginPath();
      ctx.moveTo(x - 6, y - 6); ctx.lineTo(x + 6, y + 6);
      ctx.moveTo(x - 6, y + 6); ctx.lineTo(x + 6, y - 6);
      ctx.stroke();
      ctx.fillStyle = "#000";
      ctx.fillText(`${e.z[0].toFixed(5)} ${e.z[1].toFixed(5)}i`, x + 8, y - 8);
    }
    ctx.lineWidth = 1;
    $("sw-status").dataset.estimates = out.estimates.length;
  });
}

function runField() {
  timed($("fd-status"), () => {
    const extent = num("fd-extent");
    const out = JSON.parse(field_map(JSON.stringify({ k: num("fd-k"), rho: num("fd-rho"), extent, n: 25 })));
    const c = $("fd-plot"), ctx = c.getContext("2d");
    ctx.clearRect(0, 0, c.width, c.height);
    const f = frame(c, [-extent, extent], [-extent, extent], 20);
    const cell = (f.x(extent) - f.x(-extent)) / 24;
    const scale = (0.45 * cell) / Math.max(out.amplitude, 1e-12);
    for (const s of out.samples) {
      const [x, y] = [f.x(s.x[0]), f.y(s.x[1])];
      ctx.fillStyle = s.in_cone ? "#fde8c8" : "#fff";
      ctx.fillRect(x - cell / 2, y - cell / 2, cell, cell);
      ctx.strokeStyle = "#036";
      ctx.beginPath();
      ctx.moveTo(x, y);
      ctx.lineTo(x + scale * s.v[0], y - scale * s.v[1]);
      ctx.stroke();
    }
  });
}

await init();
$("sp-run").onclick = runSpectrum;
$("sw-run").onclick = runSweep;
$("fd-run").onclick = runField;
runSpectrum();
runField();
