import { describe, expect, it } from "vitest";
import { renderCalibration } from "../src/calibration.js";
import { SchemaError } from "../src/csv.js";
import { dropColumn, fixture, tags, withAttr } from "./helpers.js";

const csv = fixture("calibration_fit.csv");

describe("renderCalibration", () => {
  it("draws one panel per accounting field", () => {
    const svg = renderCalibration(csv);
    const panels = withAttr(tags(svg, "g"), "class", "panel");
    expect(panels).toHaveLength(9);
    expect(withAttr(panels, "data-field", "income")).toHaveLength(1);
    expect(withAttr(panels, "data-field", "yield")).toHaveLength(1);
  });

  it("draws every observation with an error bar", () => {
    const svg = renderCalibration(csv);
    expect(withAttr(tags(svg, "circle"), "class", "obs")).toHaveLength(54);
    expect(withAttr(tags(svg, "line"), "class", "errorbar")).toHaveLength(54);
  });

  it("overlays one model curve per panel", () => {
    const svg = renderCalibration(csv);
    expect(withAttr(tags(svg, "polyline"), "class", "model")).toHaveLength(9);
  });

  it("centres each observation point on its whisker", () => {
    const svg = renderCalibration(csv);
    const whiskers = withAttr(tags(svg, "line"), "class", "errorbar");
    const points = withAttr(tags(svg, "circle"), "class", "obs");
    const attr = (s: string, name: string) =>
      Number(s.match(new RegExp(`${name}="([^"]+)"`))?.[1]);
    whiskers.forEach((w, i) => {
      const y1 = attr(w, "y1");
      const y2 = attr(w, "y2");
      const cy = attr(points[i]!, "cy");
      expect(Math.abs(y1 - y2)).toBeGreaterThan(0);
      expect(Math.abs((y1 + y2) / 2 - cy)).toBeLessThan(0.03);
    });
  });

  it("rejects input with a missing column", () => {
    expect(() => renderCalibration(dropColumn(csv, "stddev"))).toThrow(
      SchemaError,
    );
    expect(() => renderCalibration(dropColumn(csv, "simulated"))).toThrow(
      /simulated/,
    );
  });

  it("is deterministic", () => {
    expect(renderCalibration(csv)).toBe(renderCalibration(csv));
  });
});
