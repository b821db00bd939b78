/** Prompt-pair file loading and batch streams.
 *
 * The JSONL format is the cross-component contract with the augmentation
 * pipeline: one object per line with at least {id, kind, input, target}.
 * The file is machine-generated, so any malformed line aborts the run.
 */

import { readFileSync } from "node:fs";

import { SplitMix64 } from "./rng.js";

export interface PromptPair {
  id: string;
  kind: "ori" | "aug";
  input: string;
  target: string;
  question?: string;
  answer?: string;
  context?: string;
  source_qid?: string;
  template?: string;
}

export function parsePromptLines(content: string, source = "<memory>"): PromptPair[] {
  const pairs: PromptPair[] = [];
  const lines = content.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (line === "") continue;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch (err) {
      throw new Error(`${source}:${i + 1}: malformed prompt line: ${(err as Error).message}`);
    }
    const obj = record as Record<string, unknown>;
    if (
      typeof obj !== "object" ||
      obj === null ||
      typeof obj["input"] !== "string" ||
      typeof obj["target"] !== "string" ||
      (obj["kind"] !== "ori" && obj["kind"] !== "aug")
    ) {
      throw new Error(`${source}:${i + 1}: malformed prompt line: missing input/target/kind`);
    }
    pairs.push(obj as unknown as PromptPair);
  }
  return pairs;
}

export function loadPromptFile(path: string): PromptPair[] {
  return parsePromptLines(readFileSync(path, "utf-8"), path);
}

export function splitByKind(pairs: PromptPair[]): { ori: PromptPair[]; aug: PromptPair[] } {
  return {
    ori: pairs.filter((p) => p.kind === "ori"),
    aug: pairs.filter((p) => p.kind === "aug"),
  };
}

/** Reshuffling batch stream over a fixed item list.
 *
 * Each pass over the items is a fresh Fisher-Yates shuffle from the
 * stream's own generator, so two streams never perturb each other: the
 * ori stream of a lambda=0 run consumes exactly the draws it would
 * consume with no aug stream present at all.
 */
export class BatchStream<T> {
  private readonly items: T[];
  private readonly batchSize: number;
  private readonly rng: SplitMix64;
  private order: T[] = [];
  private cursor = 0;

  constructor(items: T[], batchSize: number, rng: SplitMix64) {
    if (batchSize < 1) throw new Error("batchSize must be >= 1");
    this.items = items;
    this.batchSize = batchSize;
    this.rng = rng;
  }

  get empty(): boolean {
    return this.items.length === 0;
  }

  /** Number of batches in one full pass. */
  get batchesPerPass(): number {
    return Math.ceil(this.items.length / this.batchSize);
  }

  nextBatch(): T[] {
    if (this.items.length === 0) return [];
    if (this.cursor >= this.order.length) {
      this.order = this.rng.shuffle([...this.items]);
      this.cursor = 0;
    }
    const batch = this.order.slice(this.cursor, this.cursor + this.batchSize);
    this.cursor += this.batchSize;
    return batch;
  }
}
