#!/usr/bin/env node
/**
 * plotkit render --spec <file.json>
 *
 * The spec declares the figure kind, input CSVs, axis scales and the output
 * path prefix; both an SVG and a PNG are written next to each other.
 * Exit codes: 0 ok, 1 usage, 2 bad spec or schema-mismatched input.
 */
import { SchemaError } from "./csv.js";
import { loadSpec, render } from "./render.js";

function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error("usage: plotkit render --spec <file.json>");
    return 1;
  }
  const flagIdx = rest.indexOf("--spec");
  if (flagIdx === -1 || flagIdx + 1 >= rest.length) {
    console.error("usage: plotkit render --spec <file.json>");
    return 1;
  }
  const specPath = rest[flagIdx + 1];
  try {
    const spec = loadSpec(specPath);
    const { svgPath, pngPath } = render(spec);
    console.log(`wrote ${svgPath}`);
    console.log(`wrote ${pngPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      console.error(`plotkit: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
