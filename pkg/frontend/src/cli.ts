import { readFileSync, writeFileSync } from "node:fs";
import { SchemaError } from "./csv.js";

// Shared entry point for the figure scripts: read one CSV, write one SVG.
// Exit codes match the simulation CLI: 0 ok, 2 usage, 1 runtime error
// (bad file, schema mismatch), with a single line on stderr.
export function runCli(
  prog: string,
  render: (csvText: string) => string,
  argv: string[],
  stderr: (line: string) => void = (line) => process.stderr.write(line + "\n"),
): number {
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") {
      input = argv[++i];
    } else if (a === "--out") {
      output = argv[++i];
    } else if (a === "--help" || a === "-h") {
      stderr(`usage: ${prog} --in <results.csv> --out <figure.svg>`);
      return 0;
    } else {
      stderr(`${prog}: unknown argument: ${a}`);
      return 2;
    }
  }
  if (input === undefined || output === undefined) {
    stderr(`usage: ${prog} --in <results.csv> --out <figure.svg>`);
    return 2;
  }

  let csvText: string;
  try {
    csvText = readFileSync(input, "utf8");
  } catch (e) {
    stderr(`${prog}: cannot read ${input}: ${(e as Error).message}`);
    return 1;
  }
  let svg: string;
  try {
    svg = render(csvText);
  } catch (e) {
    const kind = e instanceof SchemaError ? "schema error" : "error";
    stderr(`${prog}: ${kind}: ${(e as Error).message}`);
    return 1;
  }
  try {
    writeFileSync(output, svg);
  } catch (e) {
    stderr(`${prog}: cannot write ${output}: ${(e as Error).message}`);
    return 1;
  }
  return 0;
}
