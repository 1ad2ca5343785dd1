import { pathToFileURL } from "node:url";
import { parseCsv, requireColumns, num, numOrNull } from "./csv.js";
import {
  el,
  text,
  svgDoc,
  linearScale,
  axisBottom,
  axisLeft,
  polylinePoints,
  fmt,
} from "./svg.js";
import { runCli } from "./cli.js";

// Enemy density vs pesticide input, one panel per field size, one curve
// per landscape layout. A dashed vertical marks the pesticide level where
// the hedgerow and grassland curves cross, when the sweep found one.

const LAYOUT_COLOR: Record<string, string> = {
  hedgerow: "#1b7837",
  grassland: "#d95f02",
};

const PANEL_W = 230;
const PANEL_H = 190;
const MARGIN = { left: 52, right: 14, top: 34, bottom: 40 };

interface Curve {
  layout: string;
  points: [number, number][];
}

function groupCurves(
  rows: Record<string, string>[],
): { pts: Map<string, Map<number, number[]>>; layouts: string[] } {
  const pts = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    const layout = row["layout"]!;
    const pi = num(row, "pi");
    const d = num(row, "ne_density");
    if (!pts.has(layout)) pts.set(layout, new Map());
    const byPi = pts.get(layout)!;
    if (!byPi.has(pi)) byPi.set(pi, []);
    byPi.get(pi)!.push(d);
  }
  return { pts, layouts: [...pts.keys()].sort() };
}

export function renderFig3(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["field_size", "layout", "pi", "ne_density", "pi_star"]);

  const sizes = [...new Set(table.rows.map((r) => num(r, "field_size")))].sort(
    (a, b) => a - b,
  );
  const allPi = table.rows.map((r) => num(r, "pi"));
  const allD = table.rows.map((r) => num(r, "ne_density"));
  const piMax = Math.max(...allPi);
  const dMax = Math.max(...allD, 1e-9);

  const panels: string[] = [];
  sizes.forEach((size, idx) => {
    const rows = table.rows.filter((r) => num(r, "field_size") === size);
    const { pts, layouts } = groupCurves(rows);
    const x0 = idx * PANEL_W + MARGIN.left;
    const y0 = MARGIN.top;
    const plotW = PANEL_W - MARGIN.left - MARGIN.right;
    const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;
    const sx = linearScale([0, piMax], [x0, x0 + plotW]);
    const sy = linearScale([0, dMax * 1.05], [y0 + plotH, y0], 4);

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
    body.push(axisBottom(sx, y0 + plotH));
    if (idx === 0) body.push(axisLeft(sy, x0, (v) => fmt(v)));
    body.push(
      text(`field size ${fmt(size)} ha`, {
        x: x0 + plotW / 2,
        y: y0 - 8,
        "text-anchor": "middle",
        "font-weight": "bold",
      }),
    );

    const curves: Curve[] = layouts.map((layout) => {
      const byPi = pts.get(layout)!;
      const points: [number, number][] = [...byPi.entries()]
        .sort((a, b) => a[0] - b[0])
        .map(([pi, ds]) => [
          sx.map(pi),
          sy.map(ds.reduce((s, v) => s + v, 0) / ds.length),
        ]);
      return { layout, points };
    });
    for (const c of curves) {
      const color = LAYOUT_COLOR[c.layout] ?? "#555";
      body.push(
        el("polyline", {
          class: "curve",
          "data-layout": c.layout,
          points: polylinePoints(c.points),
          fill: "none",
          stroke: color,
          "stroke-width": 1.6,
        }),
      );
      for (const [px, py] of c.points) {
        body.push(el("circle", { cx: px, cy: py, r: 2.2, fill: color }));
      }
    }

    // crossing marker, constant per field size when present
    let star: number | null = null;
    for (const r of rows) {
      const v = numOrNull(r, "pi_star");
      if (v !== null) {
        star = v;
        break;
      }
    }
    if (star !== null && star >= 0 && star <= piMax) {
      body.push(
        el("line", {
          class: "crossing",
          x1: sx.map(star),
          x2: sx.map(star),
          y1: y0,
          y2: y0 + plotH,
          stroke: "#333",
          "stroke-dasharray": "4 3",
        }),
      );
      body.push(
        text(`π* = ${fmt(star)}`, {
          x: sx.map(star) + 4,
          y: y0 + 12,
          fill: "#333",
          "font-size": 10,
        }),
      );
    }
    panels.push(el("g", { class: "panel", "data-size": size }, ...body));
  });

  const width = sizes.length * PANEL_W + 20;
  const height = PANEL_H + 30;
  const legend = Object.entries(LAYOUT_COLOR)
    .map(([layout, color], i) =>
      el(
        "g",
        { class: "legend" },
        el("line", {
          x1: MARGIN.left + i * 110,
          x2: MARGIN.left + i * 110 + 18,
          y1: height - 12,
          y2: height - 12,
          stroke: color,
          "stroke-width": 1.6,
        }),
        text(layout, {
          x: MARGIN.left + i * 110 + 22,
          y: height - 9,
          fill: "#333",
        }),
      ),
    )
    .join("");
  const xlab = text("pesticide input (g/ha)", {
    x: (sizes.length * PANEL_W) / 2,
    y: PANEL_H + 2,
    "text-anchor": "middle",
  });
  const ylab = el(
    "g",
    { transform: `translate(14 ${MARGIN.top + (PANEL_H - MARGIN.top - MARGIN.bottom) / 2}) rotate(-90)` },
    text("enemy density (1/m²)", { x: 0, y: 0, "text-anchor": "middle" }),
  );
  return svgDoc(width, height, panels.join("\n") + legend + xlab + ylab);
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(runCli("fig3", renderFig3, process.argv.slice(2)));
}
