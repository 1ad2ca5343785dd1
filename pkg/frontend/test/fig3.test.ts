import { describe, expect, it } from "vitest";
import { renderFig3 } from "../src/fig3.js";
import { SchemaError } from "../src/csv.js";
import { dropColumn, fixture, tags, withAttr } from "./helpers.js";

const csv = fixture("fig3.csv");
const csvNoCross = fixture("fig3_nocross.csv");

describe("renderFig3", () => {
  it("draws one panel per field size", () => {
    const svg = renderFig3(csv);
    const panels = withAttr(tags(svg, "g"), "class", "panel");
    expect(panels).toHaveLength(3);
    expect(svg).toContain('data-size="1"');
    expect(svg).toContain('data-size="5"');
    expect(svg).toContain('data-size="10"');
  });

  it("draws a hedgerow and a grassland curve in each panel", () => {
    const svg = renderFig3(csv);
    const curves = withAttr(tags(svg, "polyline"), "class", "curve");
    expect(curves).toHaveLength(6);
    expect(withAttr(curves, "data-layout", "hedgerow")).toHaveLength(3);
    expect(withAttr(curves, "data-layout", "grassland")).toHaveLength(3);
  });

  it("marks each crossing with a dashed vertical line", () => {
    const svg = renderFig3(csv);
    const markers = withAttr(tags(svg, "line"), "class", "crossing");
    expect(markers).toHaveLength(3);
    for (const m of markers) {
      expect(m).toContain("stroke-dasharray");
    }
  });

  it("omits the marker when no crossing was found, without failing", () => {
    const svg = renderFig3(csvNoCross);
    expect(withAttr(tags(svg, "line"), "class", "crossing")).toHaveLength(0);
    expect(withAttr(tags(svg, "g"), "class", "panel")).toHaveLength(3);
  });

  it("rejects input with a missing column", () => {
    expect(() => renderFig3(dropColumn(csv, "ne_density"))).toThrow(
      SchemaError,
    );
    expect(() => renderFig3(dropColumn(csv, "pi_star"))).toThrow(/pi_star/);
  });

  it("is deterministic", () => {
    expect(renderFig3(csv)).toBe(renderFig3(csv));
  });
});
