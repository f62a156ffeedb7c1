import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { readSeries } from "../src/csv";
import { PLOT_FLOOR, buildScene, figureSpec } from "../src/figure";
import { renderFigure } from "../src/render";
import { Kind } from "../src/schema";
import { main } from "../src/cli";

const GOLDEN = join(__dirname, "..", "golden");
const PNG_MAGIC = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CASES: [Kind, string[]][] = [
  ["ccdf", ["papr_afbm/ccdf.csv", "papr_afdm/ccdf.csv"]],
  ["psd", ["psd_afbm/psd.csv"]],
  ["af-delay", ["af_afbm/af_delay.csv"]],
  ["af-doppler", ["af_afbm/af_doppler.csv"]],
  ["ber", ["ber_afbm/ber.csv", "ber_afdm/ber.csv"]],
  ["rmse", ["sense_afbm/rmse.csv"]],
];

describe("figure rendering", () => {
  const dir = mkdtempSync(join(tmpdir(), "plotfigs-render-"));

  it.each(CASES)("renders a %s figure to PNG and SVG", (kind, files) => {
    const series = files.map((f) => readSeries(kind, join(GOLDEN, f)));
    const png = join(dir, `${kind}.png`);
    renderFigure(kind, series, png);
    const bytes = readFileSync(png);
    expect(bytes.subarray(0, 8).equals(PNG_MAGIC)).toBe(true);
    expect(bytes.length).toBeGreaterThan(2000);

    const svg = join(dir, `${kind}.svg`);
    renderFigure(kind, series, svg);
    const text = readFileSync(svg, "utf8");
    expect(text).toContain("<svg");
    expect(text).toContain("<polyline");
    expect(text).toContain("</svg>");
  });

  it("is deterministic: identical inputs give identical bytes", () => {
    const series = [readSeries("ber", join(GOLDEN, "ber_afbm/ber.csv"))];
    const a = join(dir, "det_a.png");
    const b = join(dir, "det_b.png");
    renderFigure("ber", series, a);
    renderFigure("ber", series, b);
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });

  it("clips zero BER values at the plot floor with a footnote", () => {
    const f = join(dir, "zero.csv");
    writeFileSync(f, "snr_db,ber,trials\n0,0.1,10\n10,0,10\n");
    const spec = figureSpec("ber", [readSeries("ber", f)]);
    expect(Math.min(...spec.curves[0].y)).toBe(PLOT_FLOOR);
    expect(spec.footnote).toContain("clipped");
    const scene = buildScene(spec);
    const note = scene.items.find(
      (i) => i.type === "text" && i.text.includes("clipped")
    );
    expect(note).toBeDefined();
  });

  it("uses a dashed second curve per series for RMSE", () => {
    const series = [readSeries("rmse", join(GOLDEN, "sense_afbm/rmse.csv"))];
    const spec = figureSpec("rmse", series);
    expect(spec.curves).toHaveLength(2);
    expect(spec.curves[0].dash).toBeUndefined();
    expect(spec.curves[1].dash).toBeDefined();
    expect(spec.curves[1].label).toContain("velocity");
  });

  it("rejects an unknown output extension", () => {
    const series = [readSeries("ber", join(GOLDEN, "ber_afbm/ber.csv"))];
    expect(() => renderFigure("ber", series, join(dir, "fig.bmp"))).toThrowError(
      /unsupported output format/
    );
  });
});

describe("cli", () => {
  const dir = mkdtempSync(join(tmpdir(), "plotfigs-cli-"));

  it("renders a figure end to end", () => {
    const out = join(dir, "fig.png");
    const code = main([
      "--kind", "ber",
      "--in", join(GOLDEN, "ber_afbm/ber.csv"), join(GOLDEN, "ber_afdm/ber.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out).subarray(0, 8).equals(PNG_MAGIC)).toBe(true);
  });

  it("exits 2 on a schema mismatch and names the columns", () => {
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "snr_db,bit_errors\n0,5\n");
    const code = main(["--kind", "ber", "--in", bad, "--out", join(dir, "x.png")]);
    expect(code).toBe(2);
  });
});
