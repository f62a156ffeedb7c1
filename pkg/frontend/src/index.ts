export { KINDS, Kind, SCHEMAS, SchemaError, validateHeader } from "./schema";
export { Series, readSeries, seriesName } from "./csv";
export { figureSpec, buildScene, PLOT_FLOOR } from "./figure";
export { renderFigure } from "./render";
export { renderSvg } from "./svg";
export { renderRaster, dashSegments } from "./raster";
export { linearScale, logScale, linearTicks, tickLabel, extent } from "./scales";
