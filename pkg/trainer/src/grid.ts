/** Grid search over the loss weight: train once per lambda, judge each run
 * by its best checkpoint's dev F1, ties to the first grid entry. */

import { PromptPair } from "./data.js";
import { DevExample, selectCheckpoint, SelectionReport } from "./select.js";
import { train, TrainConfig } from "./train.js";

export interface GridRow {
  lambda: number;
  devF1: number;
  bestEpoch: number;
}

export interface GridResult {
  bestLambda: number;
  rows: GridRow[];
}

export function gridSearchLambda(
  config: TrainConfig,
  pairs: PromptPair[],
  devSet: DevExample[],
  grid?: number[],
): GridResult {
  const lambdas = grid ?? config.lambdaGrid;
  if (lambdas.length === 0) throw new Error("lambda grid must be non-empty");
  const rows: GridRow[] = [];
  let best = 0;
  for (let i = 0; i < lambdas.length; i++) {
    const lambda = lambdas[i]!;
    const result = train({ ...config, lambda }, pairs);
    const selection: SelectionReport = selectCheckpoint(
      result.checkpoints,
      devSet,
      result.model,
      result.tokenizer,
      config.maxGenerationLength,
      config.maxInputLen,
    );
    rows.push({ lambda, devF1: selection.bestF1, bestEpoch: selection.bestEpoch });
    if (rows[i]!.devF1 > rows[best]!.devF1) best = i;
  }
  return { bestLambda: rows[best]!.lambda, rows };
}
