import { readFileSync } from "fs";
import { basename, dirname } from "path";
import Papa from "papaparse";
import { Kind, SchemaError, validateHeader } from "./schema";

export interface Series {
  /** Legend label, derived from the result directory name. */
  name: string;
  /** Column name -> numeric values. */
  columns: Record<string, number[]>;
}

/** Legend label for a results CSV: its parent directory, or the file stem. */
export function seriesName(file: string): string {
  const dir = basename(dirname(file));
  if (dir !== "" && dir !== "." && dir !== "/") return dir;
  return basename(file).replace(/\.csv$/i, "");
}

/** Read and schema-check one results CSV. */
export function readSeries(kind: Kind, file: string): Series {
  const text = readFileSync(file, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${file}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length < 2) {
    throw new SchemaError(`${file}: no data rows`);
  }
  const header = rows[0].map((h) => h.trim());
  validateHeader(kind, header, file);
  const columns: Record<string, number[]> = {};
  for (const name of header) columns[name] = [];
  for (const row of rows.slice(1)) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `${file}: row has ${row.length} fields, expected ${header.length}`
      );
    }
    row.forEach((cell, i) => {
      const v = Number(cell);
      if (Number.isNaN(v)) {
        throw new SchemaError(
          `${file}: non-numeric value '${cell}' in column ${header[i]}`
        );
      }
      columns[header[i]].push(v);
    });
  }
  return { name: seriesName(file), columns };
}
