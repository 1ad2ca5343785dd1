// Small SVG builder. Everything returns plain strings so render output is
// a pure function of the input table and is easy to diff in tests.

export type Attrs = Record<string, string | number>;

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Trim float noise so coordinates are stable across platforms.
export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate: ${v}`);
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) =>
      ` ${k}="${escapeXml(typeof v === "number" ? fmt(v) : v)}"`,
    )
    .join("");
}

export function el(tag: string, attrs: Attrs, ...children: string[]): string {
  const body = children.join("");
  if (body === "") return `<${tag}${attrString(attrs)}/>`;
  return `<${tag}${attrString(attrs)}>${body}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return el("text", attrs, escapeXml(content));
}

export function svgDoc(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="sans-serif" font-size="11">\n${body}\n</svg>\n`
  );
}

export interface Scale {
  map(v: number): number;
  ticks(): number[];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickCount = 5,
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  return {
    map: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: () => niceTicks(d0, d1, tickCount),
  };
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 === 0 ? 1 : l1 - l0;
  const [r0, r1] = range;
  return {
    map: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(l0); e <= Math.floor(l1); e++) out.push(10 ** e);
      return out;
    },
  };
}

export function niceTicks(lo: number, hi: number, count: number): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(count, 1);
  const mag = 10 ** Math.floor(Math.log10(Math.abs(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    const r = Math.round(v / step) * step;
    out.push(Math.abs(r) < step * 1e-9 ? 0 : r);
  }
  return out;
}

// Symmetric extent for diverging data: the scale runs [-m, +m] so that
// zero always lands on the neutral colour.
export function symmetricMax(values: number[]): number {
  let m = 0;
  for (const v of values) m = Math.max(m, Math.abs(v));
  return m === 0 ? 1 : m;
}

// Blue-white-red ramp, symmetric around zero. v is clamped to [-vmax, vmax].
export function divergingColor(v: number, vmax: number): string {
  const t = Math.max(-1, Math.min(1, v / vmax));
  const blend = (a: number, b: number) => Math.round(a + (b - a) * Math.abs(t));
  let r: number;
  let g: number;
  let b: number;
  if (t < 0) {
    [r, g, b] = [blend(255, 33), blend(255, 102), blend(255, 172)];
  } else {
    [r, g, b] = [blend(255, 178), blend(255, 24), blend(255, 43)];
  }
  const hex = (n: number) => n.toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

export function axisBottom(scale: Scale, y: number, labelFmt?: (v: number) => string): string {
  const f = labelFmt ?? ((v: number) => String(v));
  const parts: string[] = [];
  for (const t of scale.ticks()) {
    const x = scale.map(t);
    parts.push(el("line", { x1: x, x2: x, y1: y, y2: y + 4, stroke: "#333" }));
    parts.push(
      text(f(t), { x, y: y + 14, "text-anchor": "middle", fill: "#333" }),
    );
  }
  return parts.join("");
}

export function axisLeft(scale: Scale, x: number, labelFmt?: (v: number) => string): string {
  const f = labelFmt ?? ((v: number) => String(v));
  const parts: string[] = [];
  for (const t of scale.ticks()) {
    const y = scale.map(t);
    parts.push(el("line", { x1: x - 4, x2: x, y1: y, y2: y, stroke: "#333" }));
    parts.push(
      text(f(t), {
        x: x - 6,
        y: y + 3,
        "text-anchor": "end",
        fill: "#333",
      }),
    );
  }
  return parts.join("");
}

export function polylinePoints(pts: [number, number][]): string {
  return pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}
