export { EmptyInput, FigureError, MissingColumn, UnknownFigure } from "./errors.js";
export { columnIndex, numericColumn, parseCsv, stringColumn } from "./csv.js";
export type { Table } from "./csv.js";
export { RECIPES, extractSeries, recipeFor } from "./recipes.js";
export type { FigureRecipe, Series, SeriesSource } from "./recipes.js";
export { formatTick, linearScale, logScale } from "./scale.js";
export type { Scale } from "./scale.js";
export { renderFigure } from "./render.js";
export { main } from "./cli.js";
