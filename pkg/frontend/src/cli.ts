#!/usr/bin/env node
import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { FigureError } from "./errors.js";
import { RECIPES, recipeFor } from "./recipes.js";
import { renderFigure } from "./render.js";

const USAGE = `usage: render_figs --fig <id> --in <csv> --out <svg>
figures: ${RECIPES.map((r) => r.id).join(", ")}`;

interface Args {
  fig: string;
  input: string;
  output: string;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag || !flag.startsWith("--") || value === undefined) {
      throw new RangeError(USAGE);
    }
    values[flag.slice(2)] = value;
  }
  const { fig, in: input, out: output } = values;
  if (!fig || !input || !output) throw new RangeError(USAGE);
  return { fig, input, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const recipe = recipeFor(args.fig);
    const csv = readFileSync(args.input, "utf8");
    writeFileSync(args.output, renderFigure(recipe, csv));
    return 0;
  } catch (err) {
    if (err instanceof FigureError || (err as NodeJS.ErrnoException).code) {
      console.error(`render_figs: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ? pathToFileURL(realpathSync(process.argv[1])).href : "";
if (import.meta.url === entry) {
  process.exit(main(process.argv.slice(2)));
}
