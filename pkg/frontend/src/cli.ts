import { writeFileSync } from "node:fs";
import { basename } from "node:path";
import { readModeTable, readPolarSurface, readRadialProfile, SchemaError } from "./csv.js";
import { renderDecay, renderPolarSurface, renderRadialProfile } from "./plots.js";

const USAGE = `usage: figure-scripts <radial-profile|polar-surface|decay> --in <csv> --out <svg> [--title <text>]

Renders one SVG figure from a solver CSV export.  The kind must match the
CSV schema: radial-profile expects columns (r|x),u; polar-surface expects
r,theta,u; decay expects mode,eigenvalue,coefficient.`;

function parseArgs(argv: string[]): { kind: string; input: string; output: string; title: string } {
  const kind = argv[0];
  if (!kind || kind.startsWith("-")) throw new SchemaError(USAGE);
  let input = "";
  let output = "";
  let title = "";
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new SchemaError(`missing value for ${flag}`);
    if (flag === "--in") input = value;
    else if (flag === "--out") output = value;
    else if (flag === "--title") title = value;
    else throw new SchemaError(`unknown flag ${flag}`);
  }
  if (!input || !output) throw new SchemaError(USAGE);
  return { kind, input, output, title: title || basename(input) };
}

export function runCli(argv: string[]): number {
  let args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 3;
  }
  try {
    let svg: string;
    if (args.kind === "radial-profile") {
      svg = renderRadialProfile(readRadialProfile(args.input), args.title);
    } else if (args.kind === "polar-surface") {
      svg = renderPolarSurface(readPolarSurface(args.input), args.title);
    } else if (args.kind === "decay") {
      svg = renderDecay(readModeTable(args.input), args.title);
    } else {
      console.error(`unknown plot kind "${args.kind}"\n${USAGE}`);
      return 3;
    }
    writeFileSync(args.output, svg);
    console.log(`${args.kind} -> ${args.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(runCli(process.argv.slice(2)));
}
