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
  divergingColor,
  symmetricMax,
  fmt,
} from "./svg.js";
import { runCli } from "./cli.js";

// Income change across the farm size x hedgerow coverage plane, drawn as a
// heatmap with a colour scale symmetric around zero, plus four panels that
// split the income change at each farm's best coverage into its parts.

const CELL_W = 46;
const CELL_H = 30;
const HM_LEFT = 64;
const HM_TOP = 30;

const COMPONENTS = [
  ["delta_yield", "yield change"],
  ["delta_revenue", "revenue change"],
  ["saved_pesticide_cost", "pesticide saving"],
  ["delta_income", "income change"],
] as const;

const DEC_W = 210;
const DEC_H = 140;
const DEC_MARGIN = { left: 56, right: 10, top: 22, bottom: 30 };

export function renderFig5(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, [
    "farm_size",
    "margin_fraction",
    "pct_income",
    "optimal",
    "delta_yield",
    "delta_revenue",
    "saved_pesticide_cost",
    "delta_income",
  ]);

  const farms = [...new Set(table.rows.map((r) => num(r, "farm_size")))].sort(
    (a, b) => a - b,
  );
  const fracs = [
    ...new Set(table.rows.map((r) => num(r, "margin_fraction"))),
  ].sort((a, b) => a - b);
  const vmax = symmetricMax(table.rows.map((r) => num(r, "pct_income")));

  const hmW = farms.length * CELL_W;
  const hmH = fracs.length * CELL_H;
  const body: string[] = [];

  for (const row of table.rows) {
    const fi = farms.indexOf(num(row, "farm_size"));
    const mi = fracs.indexOf(num(row, "margin_fraction"));
    const v = num(row, "pct_income");
    const x = HM_LEFT + fi * CELL_W;
    const y = HM_TOP + (fracs.length - 1 - mi) * CELL_H;
    body.push(
      el("rect", {
        class: "cell",
        "data-farm": num(row, "farm_size"),
        "data-frac": fmt(num(row, "margin_fraction")),
        x,
        y,
        width: CELL_W,
        height: CELL_H,
        fill: divergingColor(v, vmax),
        stroke: "#fff",
        "stroke-width": 0.5,
      }),
    );
    if (num(row, "optimal") === 1) {
      body.push(
        el("rect", {
          class: "optimal",
          x: x + 1.5,
          y: y + 1.5,
          width: CELL_W - 3,
          height: CELL_H - 3,
          fill: "none",
          stroke: "#000",
          "stroke-width": 1.8,
        }),
      );
    }
  }
  farms.forEach((farm, fi) => {
    body.push(
      text(fmt(farm), {
        x: HM_LEFT + fi * CELL_W + CELL_W / 2,
        y: HM_TOP + hmH + 14,
        "text-anchor": "middle",
      }),
    );
  });
  fracs.forEach((frac, mi) => {
    body.push(
      text(fmt(frac), {
        x: HM_LEFT - 6,
        y: HM_TOP + (fracs.length - 1 - mi) * CELL_H + CELL_H / 2 + 3,
        "text-anchor": "end",
      }),
    );
  });
  body.push(
    text("farm size (ha)", {
      x: HM_LEFT + hmW / 2,
      y: HM_TOP + hmH + 30,
      "text-anchor": "middle",
    }),
  );
  body.push(
    el(
      "g",
      { transform: `translate(16 ${HM_TOP + hmH / 2}) rotate(-90)` },
      text("hedged margin fraction", { x: 0, y: 0, "text-anchor": "middle" }),
    ),
  );
  body.push(
    text("income change (%)", {
      x: HM_LEFT + hmW / 2,
      y: HM_TOP - 12,
      "text-anchor": "middle",
      "font-weight": "bold",
    }),
  );

  // colour bar with endpoints at -vmax and +vmax so zero sits in the middle
  const cbY = HM_TOP + hmH + 44;
  const cbW = hmW;
  const slices = 48;
  const cbar: string[] = [];
  for (let i = 0; i < slices; i++) {
    const v = -vmax + ((i + 0.5) / slices) * 2 * vmax;
    cbar.push(
      el("rect", {
        x: HM_LEFT + (i / slices) * cbW,
        y: cbY,
        width: cbW / slices + 0.5,
        height: 10,
        fill: divergingColor(v, vmax),
      }),
    );
  }
  cbar.push(
    el("rect", {
      x: HM_LEFT,
      y: cbY,
      width: cbW,
      height: 10,
      fill: "none",
      stroke: "#333",
    }),
  );
  for (const [v, anchor] of [
    [-vmax, "start"],
    [0, "middle"],
    [vmax, "end"],
  ] as [number, string][]) {
    cbar.push(
      text(`${v > 0 ? "+" : ""}${fmt(v)}%`, {
        x: HM_LEFT + ((v + vmax) / (2 * vmax)) * cbW,
        y: cbY + 22,
        "text-anchor": anchor,
      }),
    );
  }
  body.push(el("g", { class: "colorbar" }, ...cbar));

  // decomposition at each farm's optimal coverage
  const optRows = table.rows
    .filter((r) => num(r, "optimal") === 1)
    .sort((a, b) => num(a, "farm_size") - num(b, "farm_size"));
  const decX0 = HM_LEFT + hmW + 50;
  COMPONENTS.forEach(([col, label], ci) => {
    const px = decX0 + (ci % 2) * DEC_W;
    const py = HM_TOP - 10 + Math.floor(ci / 2) * DEC_H;
    const plotW = DEC_W - DEC_MARGIN.left - DEC_MARGIN.right;
    const plotH = DEC_H - DEC_MARGIN.top - DEC_MARGIN.bottom;
    const x0 = px + DEC_MARGIN.left;
    const y0 = py + DEC_MARGIN.top;
    const vals = optRows.map((r) => num(r, col));
    const lo = Math.min(0, ...vals);
    const hi = Math.max(0, ...vals);
    const pad = (hi - lo || 1) * 0.1;
    const sx = logScale([farms[0]!, farms[farms.length - 1]!], [x0, x0 + plotW]);
    const sy = linearScale([lo - pad, hi + pad], [y0 + plotH, y0], 3);

    const parts: string[] = [];
    parts.push(
      el("rect", {
        x: x0,
        y: y0,
        width: plotW,
        height: plotH,
        fill: "none",
        stroke: "#999",
      }),
    );
    parts.push(
      el("line", {
        x1: x0,
        x2: x0 + plotW,
        y1: sy.map(0),
        y2: sy.map(0),
        stroke: "#bbb",
      }),
    );
    parts.push(axisBottom(sx, y0 + plotH, (v) => fmt(v)));
    parts.push(axisLeft(sy, x0, (v) => fmt(v)));
    parts.push(
      text(label, {
        x: x0 + plotW / 2,
        y: py + 12,
        "text-anchor": "middle",
        "font-weight": "bold",
        "font-size": 10,
      }),
    );
    if (optRows.length > 0) {
      const pts: [number, number][] = optRows.map((r) => [
        sx.map(num(r, "farm_size")),
        sy.map(num(r, col)),
      ]);
      parts.push(
        el("polyline", {
          points: polylinePoints(pts),
          fill: "none",
          stroke: "#2166ac",
          "stroke-width": 1.5,
        }),
      );
      for (const [cx, cy] of pts) {
        parts.push(el("circle", { cx, cy, r: 2.2, fill: "#2166ac" }));
      }
    }
    body.push(el("g", { class: "decomp", "data-component": col }, ...parts));
  });

  const width = decX0 + 2 * DEC_W + 16;
  const height = Math.max(HM_TOP + hmH + 80, HM_TOP - 10 + 2 * DEC_H + 20);
  return svgDoc(width, height, body.join("\n"));
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(runCli("fig5", renderFig5, process.argv.slice(2)));
}
