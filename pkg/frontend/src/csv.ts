// Minimal CSV reader for the simulation result files. Handles quoted
// fields, embedded commas/newlines and CRLF endings; no streaming.

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;

  const endField = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    endField();
    records.push(record);
    record = [];
  };

  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
        } else {
          inQuotes = false;
          i += 1;
        }
      } else {
        field += ch;
        i += 1;
      }
    } else if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      endField();
      i += 1;
    } else if (ch === "\n") {
      endRecord();
      i += 1;
    } else if (ch === "\r") {
      if (text[i + 1] === "\n") i += 1;
      endRecord();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || record.length > 0) endRecord();

  if (records.length === 0) throw new SchemaError("empty csv");
  const columns = records[0]!;
  const rows: Record<string, string>[] = [];
  for (const rec of records.slice(1)) {
    if (rec.length === 1 && rec[0] === "") continue;
    if (rec.length !== columns.length) {
      throw new SchemaError(
        `row has ${rec.length} fields, header has ${columns.length}`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => {
      row[c] = rec[j]!;
    });
    rows.push(row);
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const have = new Set(table.columns);
  const missing = needed.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
}

export function num(row: Record<string, string>, col: string): number {
  const raw = row[col];
  if (raw === undefined) throw new SchemaError(`missing column: ${col}`);
  const v = Number(raw);
  if (raw.trim() === "" || Number.isNaN(v)) {
    throw new SchemaError(`column ${col}: not a number: ${JSON.stringify(raw)}`);
  }
  return v;
}

// Same as num() but treats the empty string as absent, which is how the
// sweep output encodes "no crossing found".
export function numOrNull(
  row: Record<string, string>,
  col: string,
): number | null {
  const raw = row[col];
  if (raw === undefined) throw new SchemaError(`missing column: ${col}`);
  if (raw.trim() === "") return null;
  const v = Number(raw);
  if (Number.isNaN(v)) {
    throw new SchemaError(`column ${col}: not a number: ${JSON.stringify(raw)}`);
  }
  return v;
}
