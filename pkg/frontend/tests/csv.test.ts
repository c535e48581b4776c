import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { readModeTable, readPolarSurface, readRadialProfile, SchemaError } from "../src/csv.js";

const EXPORTS = fileURLToPath(new URL("../../exports", import.meta.url));
const tmp = mkdtempSync(join(tmpdir(), "figcsv-"));

function writeTmp(name: string, content: string): string {
  const p = join(tmp, name);
  writeFileSync(p, content);
  return p;
}

describe("radial profile parsing", () => {
  it("reads an exported radial CSV with metadata", () => {
    const prof = readRadialProfile(join(EXPORTS, "heat_d3_p2_n150.profile.csv"));
    expect(prof.abscissa).toBe("r");
    expect(prof.r.length).toBe(prof.u.length);
    expect(prof.r[0]).toBe(0);
    expect(prof.meta["d"]).toBe(3);
    expect(prof.u[0]).toBeCloseTo(1.5745649245709676, 12);
  });

  it("accepts the half-line header x,u", () => {
    const prof = readRadialProfile(join(EXPORTS, "burgers_n400.profile.csv"));
    expect(prof.abscissa).toBe("x");
    expect(prof.u[0]!).toBeGreaterThan(1);
  });

  it("rejects a wrong header", () => {
    const p = writeTmp("bad_header.csv", "a,b\n1,2\n");
    expect(() => readRadialProfile(p)).toThrow(SchemaError);
  });

  it("rejects non-numeric cells", () => {
    const p = writeTmp("bad_cell.csv", "r,u\n0.0,oops\n");
    expect(() => readRadialProfile(p)).toThrow(/non-numeric/);
  });

  it("rejects ragged rows", () => {
    const p = writeTmp("ragged.csv", "r,u\n0.0,1.0\n0.1\n");
    expect(() => readRadialProfile(p)).toThrow(/fields/);
  });

  it("rejects a file with only a header", () => {
    const p = writeTmp("empty.csv", "r,u\n");
    expect(() => readRadialProfile(p)).toThrow(/no data rows/);
  });

  it("rejects malformed metadata JSON", () => {
    const p = writeTmp("badmeta.csv", "# {not json\nr,u\n0,1\n");
    expect(() => readRadialProfile(p)).toThrow(/metadata/);
  });
});

describe("polar surface parsing", () => {
  it("reads the planar export with its angular grid", () => {
    const surf = readPolarSurface(join(EXPORTS, "nonradial_n60.profile.csv"));
    const radii = new Set(surf.r);
    const angles = new Set(surf.theta);
    expect(radii.size * angles.size).toBe(surf.u.length);
    expect(surf.meta["d"]).toBe(2);
  });

  it("rejects a radial file passed as polar", () => {
    expect(() => readPolarSurface(join(EXPORTS, "heat_d3_p2_n150.profile.csv"))).toThrow(SchemaError);
  });
});

describe("mode table parsing", () => {
  it("reads modes with eigenvalues and coefficients", () => {
    const table = readModeTable(join(EXPORTS, "heat_d3_p2_n150.modes.csv"));
    expect(table.mode[0]).toBe(0);
    expect(table.eigenvalue[0]).toBeCloseTo(1.5, 12);
    expect(table.mode.length).toBe(151);
  });

  it("rejects a profile file passed as modes", () => {
    expect(() => readModeTable(join(EXPORTS, "heat_d3_p2_n150.profile.csv"))).toThrow(SchemaError);
  });
});
