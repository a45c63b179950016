export class FigureError extends Error {}

export class MissingColumn extends FigureError {
  constructor(column: string, available: readonly string[]) {
    super(`missing column "${column}"; input has: ${available.join(", ")}`);
  }
}

export class EmptyInput extends FigureError {
  constructor(detail: string) {
    super(`no data rows: ${detail}`);
  }
}

export class UnknownFigure extends FigureError {
  constructor(id: string, known: readonly string[]) {
    super(`unknown figure "${id}"; expected one of ${known.join(", ")}`);
  }
}
