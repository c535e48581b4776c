import type { ModeTable, PolarSurface, RadialProfile } from "./csv.js";
import { aggregateDecay } from "./plots.js";

/**
 * Qualitative shape checks used to sanity-check figures before rendering.
 * These look only at the CSV data; they prove nothing and recompute
 * nothing — rigorous statements live in the certificates, not here.
 */

/**
 * A "positive bump": u > 0 everywhere sampled, maximum attained at the
 * origin, and decaying to (near) zero at the edge of the grid.
 */
export function isPositiveBump(profile: RadialProfile): boolean {
  const { r, u } = profile;
  if (u.some((v) => v <= 0)) return false;
  const iMax = u.indexOf(Math.max(...u));
  if (r[iMax]! > r[r.length - 1]! * 0.1) return false;
  return u[u.length - 1]! < u[iMax]! * 1e-2;
}

/**
 * Fraction of adjacent aggregated-norm pairs that decrease; 1.0 means a
 * perfectly monotone decay trend.
 */
export function decayMonotoneFraction(table: ModeTable): number {
  const points = aggregateDecay(table).filter((p) => p.norm > 0);
  let down = 0;
  for (let i = 1; i < points.length; i += 1) {
    if (points[i]!.norm <= points[i - 1]!.norm) down += 1;
  }
  return points.length > 1 ? down / (points.length - 1) : 1;
}

/**
 * Signed lobe structure of a planar profile: returns the number of sign
 * changes of u along the angular direction at the radius where |u| peaks.
 */
export function angularSignChanges(surface: PolarSurface): number {
  let iPeak = 0;
  surface.u.forEach((v, i) => {
    if (Math.abs(v) > Math.abs(surface.u[iPeak]!)) iPeak = i;
  });
  const rPeak = surface.r[iPeak]!;
  const ring = surface.theta
    .map((theta, i) => ({ theta, u: surface.u[i]!, r: surface.r[i]! }))
    .filter((p) => p.r === rPeak)
    .sort((a, b) => a.theta - b.theta);
  let changes = 0;
  for (let i = 0; i < ring.length; i += 1) {
    const a = ring[i]!.u;
    const b = ring[(i + 1) % ring.length]!.u;
    if (a !== 0 && b !== 0 && Math.sign(a) !== Math.sign(b)) changes += 1;
  }
  return changes;
}
