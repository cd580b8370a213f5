import init, { outage_curves, throughput_curves, delay_curve } from "./pkg/harq_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function rows(flat, width) {
  const out = [];
  for (let i = 0; i < flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

// series: [{name, points: [[x, y], ...]}]
function draw(series, { xlabel, ylabel, log }) {
  const c = $("plot"), g = c.getContext("2d");
  const pad = { l: 64, r: 16, t: 12, b: 40 };
  const w = c.width - pad.l - pad.r, h = c.height - pad.t - pad.b;
  g.clearRect(0, 0, c.width, c.height);

  const ty = (y) => (log ? Math.log10(y) : y);
  const pts = series.flatMap((s) => s.points).filter(([x, y]) => Number.isFinite(y) && (!log || y > 0));
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => ty(p[1]));
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (log) { y0 = Math.max(Math.floor(y0), -12); y1 = Math.ceil(y1); }
  if (y1 === y0) y1 = y0 + 1;
  const X = (x) => pad.l + ((x - x0) / (x1 - x0)) * w;
  const Y = (y) => pad.t + h - ((ty(y) - y0) / (y1 - y0)) * h;

  g.strokeStyle = "#999"; g.fillStyle = "#444"; g.font = "12px sans-serif";
  g.strokeRect(pad.l, pad.t, w, h);
  for (let i = 0; i <= 5; i++) {
    const yv = y0 + ((y1 - y0) * i) / 5, py = pad.t + h - (h * i) / 5;
    g.fillText(log ? `1e${yv.toFixed(1).replace(".0", "")}` : yv.toPrecision(3), 4, py + 4);
    const xv = x0 + ((x1 - x0) * i) / 5;
    g.fillText(xv.toPrecision(3), X(xv) - 10, pad.t + h + 16);
  }
  g.fillText(xlabel, pad.l + w / 2 - 20, c.height - 6);
  g.save(); g.translate(12, pad.t + h / 2 + 30); g.rotate(-Math.PI / 2); g.fillText(ylabel, 0, 0); g.restore();

  g.save(); g.beginPath(); g.rect(pad.l, pad.t, w, h); g.clip();
  series.forEach((s, k) => {
    g.strokeStyle = COLORS[k % COLORS.length]; g.lineWidth = 2; g.beginPath();
    let pen = false;
    for (const [x, y] of s.points) {
      // gaps for failed or unstable points
      if (!Number.isFinite(y) || (log && y <= 0)) { pen = false; continue; }
      pen ? g.lineTo(X(x), Y(y)) : g.moveTo(X(x), Y(y));
      pen = true;
    }
    g.stroke();
  });
  g.restore();
  $("legend").innerHTML = series
    .map((s, k) => `<span style="color:${COLORS[k % COLORS.length]}">━ ${s.name}</span>`)
    .join("");
}

const ops = {
  outage() {
    const r = rows(outage_curves(num("lo"), num("hi"), 31, num("r1"), num("m")), 4);
    const col = (i) => r.map((row) => [row[0], row[i]]);
    draw(
      [
        { name: "relay, exact", points: col(1) },
        { name: "relay, min bound", points: col(2) },
        { name: "direct link", points: col(3) },
      ],
      { xlabel: "SNR (dB)", ylabel: "outage after M rounds", log: true },
    );
  },
  throughput() {
    const r = rows(throughput_curves(num("lo"), num("hi"), 31, num("r1"), num("m")), 4);
    const col = (i) => r.map((row) => [row[0], row[i]]);
    draw(
      [
        { name: "avg transmissions", points: col(1) },
        { name: "avg rate (bit/s/Hz)", points: col(2) },
        { name: "energy efficiency", points: col(3) },
      ],
      { xlabel: "SNR (dB)", ylabel: "value", log: false },
    );
  },
  delay() {
    const r = rows(delay_curve(0.005, 1, 100, num("snr"), num("r1"), num("m")), 3);
    draw(
      [
        { name: "waiting time W", points: r.map((row) => [row[0], row[1]]) },
        { name: "sojourn time", points: r.map((row) => [row[0], row[2]]) },
      ],
      { xlabel: "arrival rate (packets per frame)", ylabel: "frames", log: false },
    );
  },
};

function run(op) {
  const status = $("status");
  status.className = "";
  status.textContent = "computing...";
  // let the status paint before the synchronous wasm call
  setTimeout(() => {
    const t = performance.now();
    try {
      ops[op]();
      status.textContent = `${op}: ${(performance.now() - t).toFixed(0)} ms`;
    } catch (e) {
      status.className = "err";
      status.textContent = String(e);
    }
  }, 0);
}

await init();
document.querySelectorAll("button[data-op]").forEach((b) => b.addEventListener("click", () => run(b.dataset.op)));
run("outage");
