import { pathToFileURL } from "node:url";
import { parseCsv, requireColumns, num } from "./csv.js";
import {
  el,
  text,
  svgDoc,
  linearScale,
  logScale,
  axisBottom,
  axisLeft,
  polylinePoints,
  fmt,
} from "./svg.js";
import { runCli } from "./cli.js";

// Calibration fit: one panel per accounting field, observed survey values
// as points with one standard deviation whiskers, the fitted model as a
// curve over farm size. Everything drawn comes straight from the CSV.

const COLS = 3;
const PANEL_W = 220;
const PANEL_H = 160;
const MARGIN = { left: 58, right: 12, top: 26, bottom: 34 };

export function renderCalibration(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, [
    "farm_size",
    "field",
    "observed",
    "stddev",
    "simulated",
  ]);

  const fields = [...new Set(table.rows.map((r) => r["field"]!))].sort();
  const farms = [...new Set(table.rows.map((r) => num(r, "farm_size")))].sort(
    (a, b) => a - b,
  );

  const panels: string[] = [];
  fields.forEach((field, idx) => {
    const rows = table.rows
      .filter((r) => r["field"] === field)
      .sort((a, b) => num(a, "farm_size") - num(b, "farm_size"));
    const px = (idx % COLS) * PANEL_W;
    const py = Math.floor(idx / COLS) * PANEL_H;
    const x0 = px + MARGIN.left;
    const y0 = py + MARGIN.top;
    const plotW = PANEL_W - MARGIN.left - MARGIN.right;
    const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;

    let lo = Infinity;
    let hi = -Infinity;
    for (const r of rows) {
      const obs = num(r, "observed");
      const sd = num(r, "stddev");
      const sim = num(r, "simulated");
      lo = Math.min(lo, obs - sd, sim);
      hi = Math.max(hi, obs + sd, sim);
    }
    const pad = (hi - lo || 1) * 0.1;
    const sx = logScale([farms[0]!, farms[farms.length - 1]!], [x0, x0 + plotW]);
    const sy = linearScale([lo - pad, hi + pad], [y0 + plotH, y0], 4);

    const body: string[] = [];
    body.push(
      el("rect", {
        x: x0,
        y: y0,
        width: plotW,
        height: plotH,
        fill: "none",
        stroke: "#999",
      }),
    );
    body.push(axisBottom(sx, y0 + plotH, (v) => fmt(v)));
    body.push(axisLeft(sy, x0, (v) => fmt(v)));
    body.push(
      text(field, {
        x: x0 + plotW / 2,
        y: py + 14,
        "text-anchor": "middle",
        "font-weight": "bold",
      }),
    );

    const simPts: [number, number][] = rows.map((r) => [
      sx.map(num(r, "farm_size")),
      sy.map(num(r, "simulated")),
    ]);
    body.push(
      el("polyline", {
        class: "model",
        points: polylinePoints(simPts),
        fill: "none",
        stroke: "#b2182b",
        "stroke-width": 1.5,
      }),
    );

    for (const r of rows) {
      const cx = sx.map(num(r, "farm_size"));
      const obs = num(r, "observed");
      const sd = num(r, "stddev");
      body.push(
        el("line", {
          class: "errorbar",
          x1: cx,
          x2: cx,
          y1: sy.map(obs - sd),
          y2: sy.map(obs + sd),
          stroke: "#333",
        }),
      );
      body.push(
        el("circle", {
          class: "obs",
          cx,
          cy: sy.map(obs),
          r: 2.5,
          fill: "#333",
        }),
      );
    }
    panels.push(el("g", { class: "panel", "data-field": field }, ...body));
  });

  const nrows = Math.ceil(fields.length / COLS);
  const width = COLS * PANEL_W + 10;
  const height = nrows * PANEL_H + 40;
  const legend = el(
    "g",
    { class: "legend" },
    el("circle", { cx: 20, cy: height - 18, r: 2.5, fill: "#333" }),
    text("observed ± sd", { x: 28, y: height - 15, fill: "#333" }),
    el("line", {
      x1: 120,
      x2: 140,
      y1: height - 18,
      y2: height - 18,
      stroke: "#b2182b",
      "stroke-width": 1.5,
    }),
    text("model", { x: 144, y: height - 15, fill: "#333" }),
  );
  const xlab = text("farm size (ha)", {
    x: (COLS * PANEL_W) / 2,
    y: height - 15,
    "text-anchor": "middle",
  });
  return svgDoc(width, height, panels.join("\n") + legend + xlab);
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(runCli("calibration", renderCalibration, process.argv.slice(2)));
}
