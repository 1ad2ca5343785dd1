import { describe, expect, it } from "vitest";
import { renderFig5 } from "../src/fig5.js";
import { parseCsv, num, SchemaError } from "../src/csv.js";
import { symmetricMax, fmt } from "../src/svg.js";
import { dropColumn, fixture, tags, withAttr } from "./helpers.js";

const csv = fixture("fig5.csv");

describe("renderFig5", () => {
  it("draws one heatmap cell per farm size and margin fraction", () => {
    const svg = renderFig5(csv);
    const cells = withAttr(tags(svg, "rect"), "class", "cell");
    expect(cells).toHaveLength(6 * 8);
    expect(withAttr(cells, "data-farm", "50")).toHaveLength(8);
  });

  it("marks the best coverage once per farm size", () => {
    const svg = renderFig5(csv);
    expect(withAttr(tags(svg, "rect"), "class", "optimal")).toHaveLength(6);
  });

  it("uses a colour scale symmetric around zero", () => {
    const svg = renderFig5(csv);
    const vmax = symmetricMax(
      parseCsv(csv).rows.map((r) => num(r, "pct_income")),
    );
    expect(svg).toContain(`>-${fmt(vmax)}%<`);
    expect(svg).toContain(`>+${fmt(vmax)}%<`);
    expect(svg).toContain(">0%<");
  });

  it("adds the four decomposition panels", () => {
    const svg = renderFig5(csv);
    const decomp = withAttr(tags(svg, "g"), "class", "decomp");
    expect(decomp).toHaveLength(4);
    for (const col of [
      "delta_yield",
      "delta_revenue",
      "saved_pesticide_cost",
      "delta_income",
    ]) {
      expect(withAttr(decomp, "data-component", col)).toHaveLength(1);
    }
  });

  it("rejects input with a missing column", () => {
    expect(() => renderFig5(dropColumn(csv, "optimal"))).toThrow(SchemaError);
    expect(() => renderFig5(dropColumn(csv, "delta_income"))).toThrow(
      /delta_income/,
    );
  });

  it("is deterministic", () => {
    expect(renderFig5(csv)).toBe(renderFig5(csv));
  });
});
