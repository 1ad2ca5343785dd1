import { readFileSync } from "node:fs";

export function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

// All opening tags of a kind, attributes included, for counting and
// attribute assertions without a DOM.
export function tags(svg: string, tag: string): string[] {
  return svg.match(new RegExp(`<${tag}\\b[^>]*`, "g")) ?? [];
}

export function withAttr(elems: string[], attr: string, value: string): string[] {
  return elems.filter((e) => e.includes(`${attr}="${value}"`));
}

// Drop one column from simple (unquoted) CSV text, to provoke schema errors.
export function dropColumn(csvText: string, name: string): string {
  const lines = csvText.trimEnd().split(/\r?\n/);
  const header = lines[0]!.split(",");
  const idx = header.indexOf(name);
  if (idx < 0) throw new Error(`no column ${name} to drop`);
  return (
    lines
      .map((line) => {
        const fields = line.split(",");
        fields.splice(idx, 1);
        return fields.join(",");
      })
      .join("\n") + "\n"
  );
}
