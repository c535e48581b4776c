/**
 * Minimal deterministic SVG assembly.  All numbers are formatted with a
 * fixed precision so that re-rendering the same CSV yields a byte-identical
 * file (no timestamps, no library-version-dependent output).
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`cannot format non-finite value ${v}`);
  }
  if (v === 0) return "0";
  const s = v.toPrecision(8);
  // strip trailing zeros so output is independent of how the value was reached
  return String(Number(s));
}

export interface SvgNode {
  tag: string;
  attrs: Record<string, string | number>;
  children?: SvgNode[];
  text?: string;
}

export function renderNode(node: SvgNode): string {
  const attrs = Object.entries(node.attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  const open = attrs.length > 0 ? `<${node.tag} ${attrs}>` : `<${node.tag}>`;
  const inner =
    (node.text ?? "") + (node.children ?? []).map(renderNode).join("");
  return `${open}${inner}</${node.tag}>`;
}

export function svgDocument(
  width: number,
  height: number,
  children: SvgNode[],
): string {
  const root: SvgNode = {
    tag: "svg",
    attrs: {
      xmlns: "http://www.w3.org/2000/svg",
      width,
      height,
      viewBox: `0 0 ${width} ${height}`,
    },
    children,
  };
  return `<?xml version="1.0" encoding="UTF-8"?>\n${renderNode(root)}\n`;
}

export function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`)
    .join("");
}

/** Blue-white-red diverging colour map on [-1, 1], deterministic. */
export function divergingColor(t: number): string {
  const clamped = Math.max(-1, Math.min(1, t));
  const mix = (a: number, b: number, s: number) => Math.round(a + (b - a) * s);
  let rgb: [number, number, number];
  if (clamped < 0) {
    const s = clamped + 1; // 0 at -1, 1 at 0
    rgb = [mix(33, 255, s), mix(102, 255, s), mix(172, 255, s)];
  } else {
    const s = clamped; // 0 at 0, 1 at 1
    rgb = [mix(255, 178, s), mix(255, 24, s), mix(255, 43, s)];
  }
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}
