/** The training loop over the union of ori and aug prompt pairs.
 *
 * An epoch is one pass over the shuffled ori batches; each step pairs the
 * next ori batch with the next batch from an independently shuffled,
 * cycling aug stream. The two streams draw from separate generators, so a
 * lambda = 0 run walks the exact parameter trajectory of an ori-only run
 * with the same seed.
 */

import { Adam } from "./adam.js";
import { BatchStream, PromptPair, splitByKind } from "./data.js";
import { combinedLoss, LossBreakdown } from "./loss.js";
import { Architecture, EncoderDecoder } from "./model.js";
import { SplitMix64 } from "./rng.js";
import { backward } from "./tensor.js";
import { Tokenizer } from "./tokenizer.js";

export interface TrainConfig {
  lambda: number;
  lambdaGrid: number[];
  learningRate: number;
  batchSize: number;
  maxGenerationLength: number;
  epochs: number;
  seed: number;
  architecture: Architecture;
  embedDim: number;
  hiddenDim: number;
  maxInputLen: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  lambda: 1.0,
  lambdaGrid: [0.01, 0.05, 0.1, 0.5, 1.0, 10.0],
  learningRate: 2e-5,
  batchSize: 2,
  maxGenerationLength: 100,
  epochs: 25,
  seed: 0,
  architecture: "gotta",
  embedDim: 24,
  hiddenDim: 32,
  maxInputLen: 512,
};

// Stream-splitting constant, so ori and aug shuffles never share draws.
const AUG_STREAM_SALT = 0x9e3779b97f4a7c15n;

export interface Checkpoint {
  epoch: number;
  params: Record<string, number[]>;
}

export interface TrainResult {
  model: EncoderDecoder;
  tokenizer: Tokenizer;
  metrics: LossBreakdown[];
  epochMeanLoss: number[];
  checkpoints: Checkpoint[];
}

export function validateConfig(config: TrainConfig): void {
  if (config.lambda < 0) throw new Error(`lambda must be positive, got ${config.lambda}`);
  if (config.hiddenDim > 64) throw new Error("hiddenDim is capped at 64 for the desk-scale model");
  if (config.epochs < 1) throw new Error("epochs must be >= 1");
  if (config.batchSize < 1) throw new Error("batchSize must be >= 1");
}

export function buildTokenizer(pairs: PromptPair[]): Tokenizer {
  const texts: string[] = [];
  for (const p of pairs) {
    texts.push(p.input);
    texts.push(p.target);
  }
  return new Tokenizer(texts);
}

export interface TrainOptions {
  oriOnly?: boolean;
  tokenizer?: Tokenizer;
  onEpoch?: (epoch: number, meanLoss: number) => void;
}

export function train(
  config: TrainConfig,
  pairs: PromptPair[],
  options: TrainOptions = {},
): TrainResult {
  validateConfig(config);
  const { ori, aug } = splitByKind(pairs);
  if (ori.length === 0) throw new Error("training needs at least one ori pair");
  const augPairs = options.oriOnly ? [] : aug;

  const tokenizer = options.tokenizer ?? buildTokenizer(pairs);
  const model = new EncoderDecoder({
    vocabSize: tokenizer.size,
    embedDim: config.embedDim,
    hiddenDim: config.hiddenDim,
    architecture: config.architecture,
    seed: config.seed,
  });
  const optimizer = new Adam(model.parameters(), config.learningRate);

  const oriStream = new BatchStream(ori, config.batchSize, new SplitMix64(config.seed));
  const augStream = new BatchStream(
    augPairs,
    config.batchSize,
    new SplitMix64((BigInt(config.seed) ^ AUG_STREAM_SALT) & ((1n << 64n) - 1n)),
  );

  const metrics: LossBreakdown[] = [];
  const epochMeanLoss: number[] = [];
  const checkpoints: Checkpoint[] = [];
  let step = 0;
  for (let epoch = 1; epoch <= config.epochs; epoch++) {
    let epochLoss = 0;
    const stepsThisEpoch = oriStream.batchesPerPass;
    for (let s = 0; s < stepsThisEpoch; s++) {
      const batchOri = oriStream.nextBatch();
      const batchAug = augStream.empty ? [] : augStream.nextBatch();
      const { breakdown, totalNode } = combinedLoss(
        model,
        tokenizer,
        batchOri,
        batchAug,
        config.lambda,
        config.maxInputLen,
      );
      if (totalNode !== null) {
        optimizer.zeroGrad();
        backward(totalNode);
        optimizer.step();
      }
      step += 1;
      metrics.push({ step, epoch, ...breakdown });
      epochLoss += breakdown.lossTotal;
    }
    const meanLoss = epochLoss / stepsThisEpoch;
    epochMeanLoss.push(meanLoss);
    checkpoints.push({ epoch, params: model.snapshot() });
    options.onEpoch?.(epoch, meanLoss);
  }

  return { model, tokenizer, metrics, epochMeanLoss, checkpoints };
}
