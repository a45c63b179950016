import { Table, numericColumn, stringColumn } from "./csv.js";
import { EmptyInput, UnknownFigure } from "./errors.js";

/** One plotted curve after extraction from a table. */
export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export type SeriesSource =
  | { kind: "columns"; columns: Array<{ column: string; label: string }> }
  | { kind: "grouped"; groupBy: string; yColumn: string };

export interface FigureRecipe {
  id: string;
  title: string;
  xColumn: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  source: SeriesSource;
}

export const RECIPES: FigureRecipe[] = [
  {
    id: "fig2",
    title: "Storage protocol populations",
    xColumn: "t_s",
    xLabel: "time (s)",
    yLabel: "population",
    logY: false,
    source: {
      kind: "columns",
      columns: [
        { column: "alkali_population", label: "alkali" },
        { column: "noble_population", label: "noble gas" },
      ],
    },
  },
  {
    id: "fig3",
    title: "Transfer efficiency by pulse shape",
    xColumn: "omega2T_over_gamma",
    xLabel: "drive strength Ω²T/Γ",
    yLabel: "roundtrip efficiency",
    logY: false,
    source: { kind: "grouped", groupBy: "shape", yColumn: "efficiency_numeric" },
  },
  {
    id: "fig3-inset",
    title: "Exchange efficiency vs diffusion",
    xColumn: "sweep_value",
    xLabel: "alkali diffusion coefficient",
    yLabel: "one-leg efficiency",
    logY: false,
    source: {
      kind: "columns",
      columns: [
        { column: "eta_numeric", label: "numeric" },
        { column: "eta_analytic", label: "analytic" },
      ],
    },
  },
  {
    id: "fig4",
    title: "Entanglement distribution rate",
    xColumn: "distance_km",
    xLabel: "distance (km)",
    yLabel: "rate (Hz)",
    logY: true,
    source: { kind: "grouped", groupBy: "protocol", yColumn: "rate_hz" },
  },
];

export function recipeFor(id: string): FigureRecipe {
  const recipe = RECIPES.find((r) => r.id === id);
  if (!recipe) throw new UnknownFigure(id, RECIPES.map((r) => r.id));
  return recipe;
}

/** Pull the recipe's curves out of a parsed table, keeping finite points only. */
export function extractSeries(recipe: FigureRecipe, table: Table): Series[] {
  const xs = numericColumn(table, recipe.xColumn);
  const out: Series[] = [];
  if (recipe.source.kind === "columns") {
    for (const { column, label } of recipe.source.columns) {
      const ys = numericColumn(table, column);
      out.push(cleanSeries(label, xs, ys));
    }
  } else {
    const keys = stringColumn(table, recipe.source.groupBy);
    const ys = numericColumn(table, recipe.source.yColumn);
    const order: string[] = [];
    const grouped = new Map<string, { x: number[]; y: number[] }>();
    for (let i = 0; i < keys.length; i++) {
      const key = keys[i]!;
      let bucket = grouped.get(key);
      if (!bucket) {
        bucket = { x: [], y: [] };
        grouped.set(key, bucket);
        order.push(key);
      }
      bucket.x.push(xs[i]!);
      bucket.y.push(ys[i]!);
    }
    for (const key of order) {
      const bucket = grouped.get(key)!;
      out.push(cleanSeries(key, bucket.x, bucket.y));
    }
  }
  const kept = out.filter((s) => s.x.length > 0);
  if (kept.length === 0) throw new EmptyInput("no finite points in any series");
  return kept;
}

function cleanSeries(label: string, xs: number[], ys: number[]): Series {
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i < ys.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
      x.push(xs[i]!);
      y.push(ys[i]!);
    }
  }
  return { label, x, y };
}
