import { parseCsv } from "./csv.js";
import { FigureRecipe, Series, extractSeries } from "./recipes.js";
import { Scale, formatTick, linearScale, logScale } from "./scale.js";

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 40, right: 24, bottom: 48, left: 64 };
const PALETTE = ["#1b6ca8", "#d1495b", "#3a7d44", "#8668ad", "#c77d2e", "#4a4a48"];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function num(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function domainOf(values: number[], logY: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (logY && v <= 0) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return logY ? [0.1, 10] : [0, 1];
  if (lo === hi) return logY ? [lo / 10, hi * 10] : [lo - 1, hi + 1];
  if (logY) return [lo, hi];
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

function polyline(series: Series, sx: Scale, sy: Scale, logY: boolean, color: string): string {
  const points: string[] = [];
  for (let i = 0; i < series.x.length; i++) {
    const y = series.y[i]!;
    if (logY && y <= 0) continue; // a log axis cannot place these
    points.push(`${num(sx.map(series.x[i]!))},${num(sy.map(y))}`);
  }
  return `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${points.join(" ")}"/>`;
}

/** Render one figure to a standalone SVG document string. */
export function renderFigure(recipe: FigureRecipe, csvText: string): string {
  const table = parseCsv(csvText);
  const series = extractSeries(recipe, table);

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  const plotX: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const plotY: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  const sx = linearScale(domainOf(xs, false), plotX, 6);
  const sy = recipe.logY
    ? logScale(domainOf(ys, true), plotY)
    : linearScale(domainOf(ys, false), plotY);

  const body: string[] = [];
  body.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  body.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" font-weight="bold">${esc(recipe.title)}</text>`);

  for (const t of sx.ticks()) {
    const px = num(sx.map(t));
    body.push(`<line x1="${px}" y1="${plotY[0]}" x2="${px}" y2="${plotY[0] + 5}" stroke="#333"/>`);
    body.push(`<text x="${px}" y="${plotY[0] + 18}" text-anchor="middle" font-size="11">${esc(formatTick(t))}</text>`);
  }
  for (const t of sy.ticks()) {
    const py = num(sy.map(t));
    body.push(`<line x1="${plotX[0] - 5}" y1="${py}" x2="${plotX[0]}" y2="${py}" stroke="#333"/>`);
    body.push(`<line x1="${plotX[0]}" y1="${py}" x2="${plotX[1]}" y2="${py}" stroke="#eee"/>`);
    body.push(`<text x="${plotX[0] - 8}" y="${Number(py) + 4}" text-anchor="end" font-size="11">${esc(formatTick(t))}</text>`);
  }
  body.push(`<line x1="${plotX[0]}" y1="${plotY[0]}" x2="${plotX[1]}" y2="${plotY[0]}" stroke="#333"/>`);
  body.push(`<line x1="${plotX[0]}" y1="${plotY[0]}" x2="${plotX[0]}" y2="${plotY[1]}" stroke="#333"/>`);
  body.push(`<text x="${(plotX[0] + plotX[1]) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="12">${esc(recipe.xLabel)}</text>`);
  body.push(`<text x="18" y="${(plotY[0] + plotY[1]) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${(plotY[0] + plotY[1]) / 2})">${esc(recipe.yLabel)}</text>`);

  series.forEach((s, i) => {
    body.push(polyline(s, sx, sy, recipe.logY, PALETTE[i % PALETTE.length]!));
  });
  series.forEach((s, i) => {
    const ly = MARGIN.top + 8 + i * 16;
    const lx = plotX[1] - 150;
    body.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="1.8"/>`);
    body.push(`<text x="${lx + 28}" y="${ly + 4}" font-size="11">${esc(s.label)}</text>`);
  });

  return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">\n${body.join("\n")}\n</svg>\n`;
}
