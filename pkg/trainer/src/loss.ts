/** The weighted dual-task generative objective.
 *
 * Each task's loss is the per-token mean negative log-likelihood over its
 * batch; the combined loss is lossOri + lambda * lossAug. Teacher-forced
 * likelihoods sum log P(y_i | y_<i, x) over exactly the target's tokens.
 */

import { PromptPair } from "./data.js";
import { EncoderDecoder } from "./model.js";
import { Tensor, addScaled, scale, sumScalars } from "./tensor.js";
import { Tokenizer } from "./tokenizer.js";

export interface LossBreakdown {
  step: number;
  epoch: number;
  lossOri: number;
  lossAug: number;
  lossTotal: number;
  lambda: number;
}

let warnedTruncation = false;

/** Truncate over-length inputs from the tail; the context is the last
 * segment, so this drops context characters, never the question or the
 * answer slot. */
export function truncateInput(ids: number[], maxLen: number): number[] {
  if (ids.length <= maxLen) return ids;
  if (!warnedTruncation) {
    console.warn(`input of ${ids.length} tokens truncated to ${maxLen}; further truncations are silent`);
    warnedTruncation = true;
  }
  return ids.slice(0, maxLen);
}

/** Teacher-forced summed token log-likelihood of target given input. */
export function sequenceLogLikelihood(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  inputText: string,
  targetText: string,
  decoder: "main" | "aux" = "main",
  maxInputLen = 512,
): number {
  const { node } = sequenceNllNode(model, tokenizer, inputText, targetText, decoder, maxInputLen);
  return node === null ? 0 : -node.value;
}

function sequenceNllNode(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  inputText: string,
  targetText: string,
  decoder: "main" | "aux",
  maxInputLen: number,
): { node: Tensor | null; tokens: number } {
  const targetIds = tokenizer.encode(targetText);
  if (targetIds.length === 0) return { node: null, tokens: 0 };
  const inputIds = truncateInput(tokenizer.encode(inputText), maxInputLen);
  const ctx = model.encode(inputIds);
  return {
    node: model.sequenceNllNode(decoder, ctx, targetIds, tokenizer.bos),
    tokens: targetIds.length,
  };
}

export interface BatchLoss {
  node: Tensor | null; // per-token mean NLL over the batch
  tokens: number;
}

export function batchLoss(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  batch: PromptPair[],
  maxInputLen = 512,
): BatchLoss {
  const nodes: Tensor[] = [];
  let tokens = 0;
  for (const pair of batch) {
    const { node, tokens: pairTokens } = sequenceNllNode(
      model,
      tokenizer,
      pair.input,
      pair.target,
      model.decoderFor(pair.kind),
      maxInputLen,
    );
    if (node !== null) {
      nodes.push(node);
      tokens += pairTokens;
    }
  }
  if (nodes.length === 0 || tokens === 0) return { node: null, tokens: 0 };
  return { node: scale(sumScalars(nodes), 1 / tokens), tokens };
}

export interface CombinedLoss {
  breakdown: Omit<LossBreakdown, "step" | "epoch">;
  totalNode: Tensor | null;
}

/** lossTotal = lossOri + lambda * lossAug.
 *
 * With lambda = 0 (baseline/ablation mode) the total IS the ori node, so
 * the backward pass and the resulting parameter trajectory are identical
 * to training on ori pairs alone.
 */
export function combinedLoss(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  batchOri: PromptPair[],
  batchAug: PromptPair[],
  lambda: number,
  maxInputLen = 512,
): CombinedLoss {
  if (lambda < 0) throw new Error(`lambda must be >= 0, got ${lambda}`);
  const ori = batchLoss(model, tokenizer, batchOri, maxInputLen);
  const aug = batchLoss(model, tokenizer, batchAug, maxInputLen);
  const lossOri = ori.node?.value ?? 0;
  const lossAug = aug.node?.value ?? 0;

  let totalNode: Tensor | null;
  if (lambda === 0 || aug.node === null) {
    totalNode = ori.node;
  } else if (ori.node === null) {
    totalNode = scale(aug.node, lambda);
  } else {
    totalNode = addScaled(ori.node, aug.node, lambda);
  }
  const lossTotal = lossOri + lambda * lossAug;
  return {
    breakdown: { lossOri, lossAug, lossTotal, lambda },
    totalNode,
  };
}
