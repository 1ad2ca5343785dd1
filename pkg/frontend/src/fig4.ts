import { pathToFileURL } from "node:url";
import { parseCsv, requireColumns, num } from "./csv.js";
import { el, text, svgDoc, linearScale, axisLeft, fmt } from "./svg.js";
import { runCli } from "./cli.js";

// Policy grid outcomes as grouped bars: one panel per (pesticide reduction,
// metric), farm sizes grouped on the x axis, one bar per SNH policy. Bars
// are told apart by outline style (solid, dashed, dotted) and shade.
// Baseline rows with zero change draw as zero-height bars on the axis.

const POLICIES = ["none", "hedgerow", "grassland"] as const;
const POLICY_FILL: Record<string, string> = {
  none: "#bdbdbd",
  hedgerow: "#74add1",
  grassland: "#b8e186",
};
const POLICY_DASH: Record<string, string> = {
  none: "",
  hedgerow: "5 3",
  grassland: "1.5 2.5",
};
const METRICS = [
  ["pct_ne_density", "enemy density"],
  ["pct_production", "production"],
  ["pct_income", "income"],
] as const;

const PANEL_W = 240;
const PANEL_H = 170;
const MARGIN = { left: 58, right: 12, top: 26, bottom: 34 };

export function renderFig4(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, [
    "farm_size",
    "d_pi",
    "snh_policy",
    "pct_ne_density",
    "pct_production",
    "pct_income",
  ]);

  const dpis = [...new Set(table.rows.map((r) => num(r, "d_pi")))].sort(
    (a, b) => b - a,
  );
  const farms = [...new Set(table.rows.map((r) => num(r, "farm_size")))].sort(
    (a, b) => a - b,
  );

  const panels: string[] = [];
  dpis.forEach((dpi, rowIdx) => {
    METRICS.forEach(([metric, label], colIdx) => {
      // shared y extent per metric column so reduction levels compare
      const colVals = table.rows.map((r) => num(r, metric));
      const lo = Math.min(0, ...colVals);
      const hi = Math.max(0, ...colVals);
      const pad = (hi - lo || 1) * 0.08;

      const x0 = colIdx * PANEL_W + MARGIN.left;
      const y0 = rowIdx * PANEL_H + MARGIN.top;
      const plotW = PANEL_W - MARGIN.left - MARGIN.right;
      const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;
      const sy = linearScale([lo - pad, hi + pad], [y0 + plotH, y0], 4);
      const zeroY = sy.map(0);

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
      body.push(axisLeft(sy, x0, (v) => fmt(v)));
      body.push(
        el("line", {
          x1: x0,
          x2: x0 + plotW,
          y1: zeroY,
          y2: zeroY,
          stroke: "#333",
        }),
      );
      if (rowIdx === 0) {
        body.push(
          text(label, {
            x: x0 + plotW / 2,
            y: y0 - 10,
            "text-anchor": "middle",
            "font-weight": "bold",
          }),
        );
      }
      if (colIdx === 0) {
        body.push(
          text(`Δπ = ${fmt(dpi * 100)}%`, {
            x: 12,
            y: y0 + plotH / 2,
            "font-size": 10,
          }),
        );
      }

      const groupW = plotW / farms.length;
      const barW = (groupW * 0.72) / POLICIES.length;
      farms.forEach((farm, gi) => {
        const groupX = x0 + gi * groupW + groupW * 0.14;
        POLICIES.forEach((policy, bi) => {
          const row = table.rows.find(
            (r) =>
              num(r, "farm_size") === farm &&
              num(r, "d_pi") === dpi &&
              r["snh_policy"] === policy,
          );
          if (row === undefined) return;
          const v = num(row, metric);
          const top = Math.min(sy.map(v), zeroY);
          const h = Math.abs(sy.map(v) - zeroY);
          body.push(
            el("rect", {
              class: "bar",
              "data-policy": policy,
              "data-farm": farm,
              "data-dpi": dpi,
              "data-metric": metric,
              x: groupX + bi * barW,
              y: top,
              width: barW - 2,
              height: h,
              fill: POLICY_FILL[policy]!,
              stroke: "#333",
              ...(POLICY_DASH[policy] !== ""
                ? { "stroke-dasharray": POLICY_DASH[policy]! }
                : {}),
            }),
          );
        });
        if (rowIdx === dpis.length - 1) {
          body.push(
            text(`${fmt(farm)} ha`, {
              x: groupX + (groupW * 0.72) / 2,
              y: y0 + plotH + 14,
              "text-anchor": "middle",
            }),
          );
        }
      });
      panels.push(
        el("g", { class: "panel", "data-dpi": dpi, "data-metric": metric }, ...body),
      );
    });
  });

  const width = METRICS.length * PANEL_W + 16;
  const height = dpis.length * PANEL_H + 34;
  const legend = POLICIES.map((policy, i) =>
    el(
      "g",
      { class: "legend" },
      el("rect", {
        x: MARGIN.left + i * 140,
        y: height - 22,
        width: 16,
        height: 10,
        fill: POLICY_FILL[policy]!,
        stroke: "#333",
        ...(POLICY_DASH[policy] !== ""
          ? { "stroke-dasharray": POLICY_DASH[policy]! }
          : {}),
      }),
      text(`${policy} SNH`, {
        x: MARGIN.left + i * 140 + 20,
        y: height - 13,
        fill: "#333",
      }),
    ),
  ).join("");
  return svgDoc(width, height, panels.join("\n") + legend);
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(runCli("fig4", renderFig4, process.argv.slice(2)));
}
