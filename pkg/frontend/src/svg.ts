import { Scene } from "./scene";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const fmt = (v: number) => String(Math.round(v * 100) / 100);

/** Serialize a scene as a standalone SVG document. */
export function renderSvg(scene: Scene): string {
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
      `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`
  );
  out.push(
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" ` +
      `fill="${scene.background}"/>`
  );
  for (const item of scene.items) {
    if (item.type === "rect") {
      out.push(
        `<rect x="${fmt(item.x)}" y="${fmt(item.y)}" width="${fmt(item.w)}" ` +
          `height="${fmt(item.h)}" fill="${item.fill}"/>`
      );
    } else if (item.type === "polyline") {
      const pts = item.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      const dash = item.dash ? ` stroke-dasharray="${item.dash.join(",")}"` : "";
      out.push(
        `<polyline points="${pts}" fill="none" stroke="${item.color}" ` +
          `stroke-width="${item.width}"${dash}/>`
      );
    } else {
      const anchor = { start: "start", middle: "middle", end: "end" }[item.anchor];
      const rot = item.rotated
        ? ` transform="rotate(-90 ${fmt(item.x)} ${fmt(item.y)})"`
        : "";
      out.push(
        `<text x="${fmt(item.x)}" y="${fmt(item.y)}" font-family="sans-serif" ` +
          `font-size="${item.size}" fill="${item.color}" ` +
          `text-anchor="${anchor}"${rot}>${esc(item.text)}</text>`
      );
    }
  }
  out.push("</svg>");
  return out.join("\n");
}
