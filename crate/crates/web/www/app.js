import init, { renderBasin, compareTrajectories, directionField } from "./pkg/newtonlab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const SIZE = 400;
const COLORS = { classical: "#d62728", adaptive: "#1f77b4", flow: "#111" };
const DEFAULT_RECT = { cubic: [-5, 5, -5, 5], expsin: [-1.5, 1.5, -1.5, 1.5] };

let view = null;

function status(msg) {
  $("status").textContent = msg || "";
}

function rect() {
  return [num("x0"), num("x1"), num("y0"), num("y1")];
}

function toCanvas([x, y]) {
  const [x0, x1, y0, y1] = view.rect;
  return [((x - x0) / (x1 - x0)) * SIZE, ((y1 - y) / (y1 - y0)) * SIZE];
}

function fromCanvas(px, py) {
  const [x0, x1, y0, y1] = view.rect;
  return [x0 + (px / SIZE) * (x1 - x0), y1 - (py / SIZE) * (y1 - y0)];
}

function render() {
  const problem = $("problem").value;
  const n = Math.round(num("res"));
  const r = rect();
  status("sampling…");
  setTimeout(() => {
    try {
      const t = performance.now();
      const rgba = renderBasin(problem, ...r, n, n, $("mode").value, $("shade").checked);
      const img = new ImageData(new Uint8ClampedArray(rgba), n, n);
      const off = new OffscreenCanvas(n, n);
      off.getContext("2d").putImageData(img, 0, 0);
      const ctx = $("basin").getContext("2d");
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(off, 0, 0, SIZE, SIZE);
      view = { problem, rect: r, image: ctx.getImageData(0, 0, SIZE, SIZE) };
      clearOverlay();
      status(`${n}×${n} in ${((performance.now() - t) / 1000).toFixed(2)} s`);
    } catch (e) {
      status(String(e));
    }
  });
}

function clearOverlay() {
  const ctx = $("overlay").getContext("2d");
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, SIZE, SIZE);
  $("labels").textContent = "";
  return ctx;
}

function drawPath(ctx, points, color) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  points.forEach((p, i) => {
    const [cx, cy] = toCanvas(p);
    i ? ctx.lineTo(cx, cy) : ctx.moveTo(cx, cy);
  });
  ctx.stroke();
  for (const p of points) {
    const [cx, cy] = toCanvas(p);
    ctx.fillStyle = color;
    ctx.fillRect(cx - 1.5, cy - 1.5, 3, 3);
  }
}

function compare(ev) {
  if (!view) return;
  const b = $("basin").getBoundingClientRect();
  const [x, y] = fromCanvas(ev.clientX - b.left, ev.clientY - b.top);
  try {
    const cmp = JSON.parse(compareTrajectories(view.problem, x, y, num("tau"), num("dt")));
    const ctx = clearOverlay();
    if (view.image) ctx.putImageData(view.image, 0, 0);
    ctx.lineWidth = 1.5;
    const every = Math.max(1, Math.floor(cmp.flow.iterates.length / 400));
    drawPath(ctx, cmp.flow.iterates.filter((_, i) => i % every === 0), COLORS.flow);
    drawPath(ctx, cmp.classical.iterates, COLORS.classical);
    drawPath(ctx, cmp.adaptive.iterates, COLORS.adaptive);
    const line = (name, d) => `${name.padEnd(10)} ${String(d.label ?? "none").padEnd(6)} ${d.status}, ${d.iterates.length - 1} steps`;
    $("labels").textContent = [
      `start (${x.toFixed(4)}, ${y.toFixed(4)})`,
      line("classical", cmp.classical),
      line("adaptive", cmp.adaptive),
      line("flow", cmp.flow),
      "red: classical, blue: adaptive, black: flow",
    ].join("\n");
  } catch (e) {
    status(String(e));
  }
}

function field() {
  const problem = $("problem").value;
  const r = rect();
  const n = 25;
  try {
    const v = directionField(problem, ...r, n, n, $("kind").value);
    if (!view || view.problem !== problem || view.rect.some((a, i) => a !== r[i])) {
      view = { problem, rect: r, image: null };
    }
    const ctx = clearOverlay();
    ctx.strokeStyle = "#333";
    const len = (SIZE / n) * 0.4;
    for (let i = 0; i < v.length; i += 5) {
      const [cx, cy] = toCanvas([v[i], v[i + 1]]);
      const [vx, vy] = [v[i + 2], v[i + 3]];
      if (Number.isNaN(vx)) continue;
      ctx.beginPath();
      ctx.moveTo(cx - vx * len, cy + vy * len);
      ctx.lineTo(cx + vx * len, cy - vy * len);
      ctx.stroke();
      ctx.fillStyle = "#c00";
      ctx.fillRect(cx + vx * len - 1, cy - vy * len - 1, 2, 2);
    }
    $("labels").textContent = "unit directions; red dots mark arrow heads";
  } catch (e) {
    status(String(e));
  }
}

$("problem").addEventListener("change", () => {
  const [x0, x1, y0, y1] = DEFAULT_RECT[$("problem").value];
  Object.entries({ x0, x1, y0, y1 }).forEach(([k, v]) => ($(k).value = v));
});
$("render").addEventListener("click", render);
$("field").addEventListener("click", field);
$("basin").addEventListener("click", compare);

await init();
render();
