/** Checkpoint selection by dev-set token F1.
 *
 * Generated text follows the shared prompt template, so the answer is the
 * segment between the literal "Answer:" and "Context:" markers; when
 * "Context:" never appears, everything after "Answer:" counts. Scoring is
 * the same bag-of-words F1 contract the evaluation pipeline uses:
 * lowercase, strip punctuation, drop English articles, multiset overlap,
 * max over gold references.
 */

import { PromptPair } from "./data.js";
import { Checkpoint } from "./train.js";
import { EncoderDecoder } from "./model.js";
import { Tokenizer } from "./tokenizer.js";
import { truncateInput } from "./loss.js";

const ARTICLES = new Set(["a", "an", "the"]);
const PUNCT = /[!-/:-@[-`{-~]/g; // ASCII punctuation, as in the reference scorer

export function normalizeAnswer(s: string): string[] {
  return s
    .toLowerCase()
    .replace(PUNCT, "")
    .split(/\s+/)
    .filter((tok) => tok !== "" && !ARTICLES.has(tok));
}

export function tokenF1(pred: string, gold: string): number {
  const predTokens = normalizeAnswer(pred);
  const goldTokens = normalizeAnswer(gold);
  if (predTokens.length === 0 && goldTokens.length === 0) return 1;
  if (predTokens.length === 0 || goldTokens.length === 0) return 0;
  const counts = new Map<string, number>();
  for (const tok of goldTokens) counts.set(tok, (counts.get(tok) ?? 0) + 1);
  let overlap = 0;
  for (const tok of predTokens) {
    const remaining = counts.get(tok) ?? 0;
    if (remaining > 0) {
      counts.set(tok, remaining - 1);
      overlap += 1;
    }
  }
  if (overlap === 0) return 0;
  const precision = overlap / predTokens.length;
  const recall = overlap / goldTokens.length;
  return (2 * precision * recall) / (precision + recall);
}

export function scoreExample(pred: string, golds: string[]): number {
  if (golds.length === 0) throw new Error("golds must be non-empty");
  return Math.max(...golds.map((g) => tokenF1(pred, g)));
}

export function extractAnswer(generated: string): string {
  const answerAt = generated.indexOf("Answer:");
  if (answerAt < 0) return "";
  const afterAnswer = generated.slice(answerAt + "Answer:".length);
  const contextAt = afterAnswer.indexOf("Context:");
  const segment = contextAt >= 0 ? afterAnswer.slice(0, contextAt) : afterAnswer;
  return segment.trim();
}

export interface DevExample {
  qid: string;
  input: string;
  golds: string[];
}

/** Dev examples from ori prompt pairs (the pair's answer is the gold). */
export function devExamplesFrom(pairs: PromptPair[]): DevExample[] {
  return pairs
    .filter((p) => p.kind === "ori" && typeof p.answer === "string")
    .map((p) => ({ qid: p.source_qid ?? p.id, input: p.input, golds: [p.answer!] }));
}

export interface SelectionReport {
  bestIndex: number;
  bestEpoch: number;
  bestF1: number;
  scores: number[]; // mean dev F1 per checkpoint, in order
}

export function predictAnswers(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  devSet: DevExample[],
  maxGenerationLength: number,
  maxInputLen = 512,
): Record<string, string> {
  const out: Record<string, string> = {};
  for (const example of devSet) {
    let answer = "";
    try {
      const ids = truncateInput(tokenizer.encode(example.input), maxInputLen);
      answer = extractAnswer(model.generate("main", ids, tokenizer, maxGenerationLength));
    } catch {
      answer = ""; // generation failure scores zero, never aborts selection
    }
    out[example.qid] = answer;
  }
  return out;
}

export function meanDevF1(
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  devSet: DevExample[],
  maxGenerationLength: number,
  maxInputLen = 512,
): number {
  if (devSet.length === 0) throw new Error("dev set must be non-empty");
  const predictions = predictAnswers(model, tokenizer, devSet, maxGenerationLength, maxInputLen);
  let total = 0;
  for (const example of devSet) total += scoreExample(predictions[example.qid] ?? "", example.golds);
  return total / devSet.length;
}

/** Highest mean dev F1 wins; ties go to the earliest epoch. */
export function selectCheckpoint(
  checkpoints: Checkpoint[],
  devSet: DevExample[],
  model: EncoderDecoder,
  tokenizer: Tokenizer,
  maxGenerationLength = 100,
  maxInputLen = 512,
): SelectionReport {
  if (checkpoints.length === 0) throw new Error("no checkpoints to select from");
  const scores: number[] = [];
  let bestIndex = 0;
  for (let i = 0; i < checkpoints.length; i++) {
    model.restore(checkpoints[i]!.params);
    const f1 = meanDevF1(model, tokenizer, devSet, maxGenerationLength, maxInputLen);
    scores.push(f1);
    if (f1 > scores[bestIndex]!) bestIndex = i;
  }
  model.restore(checkpoints[bestIndex]!.params);
  return {
    bestIndex,
    bestEpoch: checkpoints[bestIndex]!.epoch,
    bestF1: scores[bestIndex]!,
    scores,
  };
}
