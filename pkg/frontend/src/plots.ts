import { scaleLinear, scaleLog } from "d3-scale";
import type { ModeTable, PolarSurface, RadialProfile } from "./csv.js";
import { divergingColor, fmt, pathFrom, svgDocument, type SvgNode } from "./svg.js";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 24, right: 20, bottom: 44, left: 64 };

function axisTicks(scale: (v: number) => number, values: number[], vertical: boolean): SvgNode[] {
  const nodes: SvgNode[] = [];
  for (const v of values) {
    const pos = scale(v);
    nodes.push({
      tag: "line",
      attrs: vertical
        ? { x1: MARGIN.left - 5, x2: MARGIN.left, y1: pos, y2: pos, stroke: "#333" }
        : { x1: pos, x2: pos, y1: HEIGHT - MARGIN.bottom, y2: HEIGHT - MARGIN.bottom + 5, stroke: "#333" },
    });
    nodes.push({
      tag: "text",
      attrs: vertical
        ? { x: MARGIN.left - 8, y: pos + 4, "text-anchor": "end", "font-size": 11, "font-family": "sans-serif" }
        : { x: pos, y: HEIGHT - MARGIN.bottom + 18, "text-anchor": "middle", "font-size": 11, "font-family": "sans-serif" },
      text: fmt(v),
    });
  }
  return nodes;
}

function frame(title: string): SvgNode[] {
  return [
    {
      tag: "rect",
      attrs: {
        x: MARGIN.left,
        y: MARGIN.top,
        width: WIDTH - MARGIN.left - MARGIN.right,
        height: HEIGHT - MARGIN.top - MARGIN.bottom,
        fill: "none",
        stroke: "#333",
      },
    },
    {
      tag: "text",
      attrs: { x: WIDTH / 2, y: 16, "text-anchor": "middle", "font-size": 13, "font-family": "sans-serif" },
      text: title,
    },
  ];
}

/** Line plot of a radial (or half-line) profile u against its abscissa. */
export function renderRadialProfile(profile: RadialProfile, title: string): string {
  const rMax = Math.max(...profile.r);
  const uMin = Math.min(0, ...profile.u);
  const uMax = Math.max(...profile.u);
  const x = scaleLinear([0, rMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLinear([uMin, uMax * 1.05], [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const points = profile.r.map((r, i) => [x(r), y(profile.u[i]!)] as [number, number]);
  const children: SvgNode[] = [
    ...frame(title),
    ...axisTicks(x, [0, rMax / 2, rMax], false),
    ...axisTicks(y, [0, uMax / 2, uMax], true),
    { tag: "path", attrs: { d: pathFrom(points), fill: "none", stroke: "#1f5fa8", "stroke-width": 1.6 } },
  ];
  return svgDocument(WIDTH, HEIGHT, children);
}

/**
 * Polar heatmap of a planar profile sampled on an (r, theta) grid.  Each
 * grid cell becomes an annular-sector polygon coloured by a diverging map
 * normalised to the largest |u| in the file.
 */
export function renderPolarSurface(surface: PolarSurface, title: string): string {
  const rs = [...new Set(surface.r)].sort((a, b) => a - b);
  const thetas = [...new Set(surface.theta)].sort((a, b) => a - b);
  if (rs.length * thetas.length !== surface.r.length) {
    throw new Error("polar data is not a full (r, theta) grid");
  }
  const value = new Map<string, number>();
  surface.r.forEach((r, i) => value.set(`${r},${surface.theta[i]}`, surface.u[i]!));
  const uAbs = Math.max(...surface.u.map(Math.abs));
  const size = Math.min(WIDTH, HEIGHT);
  const cx = WIDTH / 2;
  const cy = HEIGHT / 2 + 8;
  const rMax = rs[rs.length - 1]!;
  const radius = scaleLinear([0, rMax], [0, size / 2 - 36]);
  const cells: SvgNode[] = [];
  const dTheta = (2 * Math.PI) / thetas.length;
  for (let ir = 0; ir + 1 < rs.length; ir += 1) {
    for (let it = 0; it < thetas.length; it += 1) {
      const r0 = radius(rs[ir]!);
      const r1 = radius(rs[ir + 1]!);
      const t0 = thetas[it]!;
      const t1 = t0 + dTheta;
      const u = value.get(`${rs[ir]!},${t0}`) ?? 0;
      const corner = (rr: number, tt: number): [number, number] => [
        cx + rr * Math.cos(tt),
        cy - rr * Math.sin(tt),
      ];
      const pts = [corner(r0, t0), corner(r1, t0), corner(r1, t1), corner(r0, t1)];
      cells.push({
        tag: "polygon",
        attrs: {
          points: pts.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" "),
          fill: divergingColor(uAbs > 0 ? u / uAbs : 0),
          stroke: "none",
        },
      });
    }
  }
  const children: SvgNode[] = [
    {
      tag: "text",
      attrs: { x: WIDTH / 2, y: 16, "text-anchor": "middle", "font-size": 13, "font-family": "sans-serif" },
      text: title,
    },
    ...cells,
    { tag: "circle", attrs: { cx, cy, r: radius(rMax), fill: "none", stroke: "#333" } },
  ];
  return svgDocument(WIDTH, HEIGHT, children);
}

export interface DecayPoint {
  eigenvalue: number;
  norm: number;
}

/**
 * Aggregate the coefficient table by eigenvalue: for each distinct
 * eigenvalue, the Euclidean norm of all coefficients sharing it.
 */
export function aggregateDecay(table: ModeTable): DecayPoint[] {
  const sums = new Map<number, number>();
  table.eigenvalue.forEach((lambda, i) => {
    const c = table.coefficient[i]!;
    sums.set(lambda, (sums.get(lambda) ?? 0) + c * c);
  });
  return [...sums.entries()]
    .map(([eigenvalue, s]) => ({ eigenvalue, norm: Math.sqrt(s) }))
    .sort((a, b) => a.eigenvalue - b.eigenvalue);
}

/** Log-scale plot of per-eigenvalue coefficient norms. */
export function renderDecay(table: ModeTable, title: string): string {
  const points = aggregateDecay(table).filter((p) => p.norm > 0);
  const lambdaMax = points[points.length - 1]!.eigenvalue;
  const norms = points.map((p) => p.norm);
  const x = scaleLinear([0, lambdaMax], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLog([Math.min(...norms), Math.max(...norms)], [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const xy = points.map((p) => [x(p.eigenvalue), y(p.norm)] as [number, number]);
  const dots: SvgNode[] = xy.map(([px, py]) => ({
    tag: "circle",
    attrs: { cx: px, cy: py, r: 2.2, fill: "#a8321f" },
  }));
  const children: SvgNode[] = [
    ...frame(title),
    ...axisTicks(x, [0, lambdaMax / 2, lambdaMax], false),
    { tag: "path", attrs: { d: pathFrom(xy), fill: "none", stroke: "#ccc", "stroke-width": 0.8 } },
    ...dots,
  ];
  return svgDocument(WIDTH, HEIGHT, children);
}
