/** Figure kinds and the CSV column contract each one consumes. */

export const KINDS = [
  "ccdf",
  "psd",
  "af-delay",
  "af-doppler",
  "ber",
  "rmse",
] as const;

export type Kind = (typeof KINDS)[number];

/** Expected header, in order, for each figure kind. */
export const SCHEMAS: Record<Kind, string[]> = {
  ccdf: ["papr_db", "prob"],
  psd: ["bin", "power_db"],
  "af-delay": ["lag", "amp"],
  "af-doppler": ["doppler", "amp"],
  ber: ["snr_db", "ber", "trials"],
  rmse: ["snr_db", "range_rmse_m", "velocity_rmse_mps", "trials"],
};

export class SchemaError extends Error {}

/**
 * Check a CSV header against the published schema for `kind`.
 * Throws a SchemaError naming exactly which columns are missing and which
 * are unexpected, so a mismatched file is diagnosable from the message.
 */
export function validateHeader(kind: Kind, header: string[], file: string): void {
  const want = SCHEMAS[kind];
  const missing = want.filter((c) => !header.includes(c));
  const extra = header.filter((c) => !want.includes(c));
  if (missing.length === 0 && extra.length === 0) return;
  const parts = [`${file}: header does not match the '${kind}' schema`];
  if (missing.length > 0) parts.push(`missing columns: ${missing.join(", ")}`);
  if (extra.length > 0) parts.push(`unexpected columns: ${extra.join(", ")}`);
  parts.push(`expected: ${want.join(", ")}`);
  throw new SchemaError(parts.join("; "));
}
