import { writeFileSync } from "fs";
import { extname } from "path";
import { PNG } from "pngjs";
import { Series } from "./csv";
import { buildScene, figureSpec } from "./figure";
import { renderRaster } from "./raster";
import { Kind } from "./schema";
import { renderSvg } from "./svg";

/** Render one figure to `out`; the extension picks the backend (.png/.svg). */
export function renderFigure(kind: Kind, series: Series[], out: string): void {
  const scene = buildScene(figureSpec(kind, series));
  const ext = extname(out).toLowerCase();
  if (ext === ".svg") {
    writeFileSync(out, renderSvg(scene));
    return;
  }
  if (ext !== ".png") {
    throw new Error(`unsupported output format '${ext}', use .png or .svg`);
  }
  const raster = renderRaster(scene);
  const png = new PNG({ width: raster.width, height: raster.height });
  png.data = Buffer.from(raster.data.buffer, 0, raster.data.length);
  writeFileSync(out, PNG.sync.write(png));
}
