/** Miniature randomly initialized encoder-decoder.
 *
 * Encoder: mean of input character embeddings through two tanh layers,
 * producing a context vector. Decoder: two stacked Elman RNN layers fed
 * the previous target character's embedding, with the context vector
 * injected into the first layer at every step, then a linear projection
 * to vocabulary logits.
 *
 * The "gotta" architecture runs every sample through the one shared
 * decoder. The "mtl" ablation keeps the shared encoder but gives the
 * augmented task its own exclusive decoder.
 */

import { SplitMix64 } from "./rng.js";
import {
  Tensor,
  add,
  backward,
  embedMean,
  embedRow,
  matvec,
  nllFromLogits,
  sumScalars,
  tanhT,
} from "./tensor.js";
import { Tokenizer } from "./tokenizer.js";

export type Architecture = "gotta" | "mtl";
export type DecoderKey = "main" | "aux";

export interface ModelConfig {
  vocabSize: number;
  embedDim: number;
  hiddenDim: number;
  architecture: Architecture;
  seed: number;
}

interface DecoderParams {
  wx1: Tensor;
  wh1: Tensor;
  wc1: Tensor;
  b1: Tensor;
  wx2: Tensor;
  wh2: Tensor;
  b2: Tensor;
  wo: Tensor;
  bo: Tensor;
}

function initTensor(rows: number, cols: number, rng: SplitMix64, scaleFactor: number): Tensor {
  const t = new Tensor(rows, cols);
  for (let i = 0; i < t.size; i++) t.data[i] = (rng.nextFloat() * 2 - 1) * scaleFactor;
  return t;
}

function initDecoder(cfg: ModelConfig, rng: SplitMix64): DecoderParams {
  const { vocabSize, embedDim, hiddenDim } = cfg;
  const s = 1 / Math.sqrt(hiddenDim);
  return {
    wx1: initTensor(hiddenDim, embedDim, rng, s),
    wh1: initTensor(hiddenDim, hiddenDim, rng, s),
    wc1: initTensor(hiddenDim, hiddenDim, rng, s),
    b1: new Tensor(hiddenDim),
    wx2: initTensor(hiddenDim, hiddenDim, rng, s),
    wh2: initTensor(hiddenDim, hiddenDim, rng, s),
    b2: new Tensor(hiddenDim),
    wo: initTensor(vocabSize, hiddenDim, rng, s),
    bo: new Tensor(vocabSize),
  };
}

export class EncoderDecoder {
  readonly config: ModelConfig;
  embedding: Tensor;
  encW1: Tensor;
  encB1: Tensor;
  encW2: Tensor;
  encB2: Tensor;
  decoders: Partial<Record<DecoderKey, DecoderParams>>;

  constructor(config: ModelConfig) {
    this.config = config;
    const rng = new SplitMix64(config.seed);
    const { vocabSize, embedDim, hiddenDim } = config;
    this.embedding = initTensor(vocabSize, embedDim, rng, 1 / Math.sqrt(embedDim));
    const s = 1 / Math.sqrt(hiddenDim);
    this.encW1 = initTensor(hiddenDim, embedDim, rng, s);
    this.encB1 = new Tensor(hiddenDim);
    this.encW2 = initTensor(hiddenDim, hiddenDim, rng, s);
    this.encB2 = new Tensor(hiddenDim);
    this.decoders = { main: initDecoder(config, rng) };
    if (config.architecture === "mtl") {
      this.decoders.aux = initDecoder(config, rng);
    }
  }

  decoderFor(kind: "ori" | "aug"): DecoderKey {
    return this.config.architecture === "mtl" && kind === "aug" ? "aux" : "main";
  }

  namedParameters(): Array<[string, Tensor]> {
    const named: Array<[string, Tensor]> = [
      ["embedding", this.embedding],
      ["enc.w1", this.encW1],
      ["enc.b1", this.encB1],
      ["enc.w2", this.encW2],
      ["enc.b2", this.encB2],
    ];
    for (const key of ["main", "aux"] as DecoderKey[]) {
      const dec = this.decoders[key];
      if (!dec) continue;
      for (const [name, tensor] of Object.entries(dec)) {
        named.push([`dec.${key}.${name}`, tensor]);
      }
    }
    return named;
  }

  parameters(): Tensor[] {
    return this.namedParameters().map(([, t]) => t);
  }

  parameterCount(): number {
    return this.parameters().reduce((acc, t) => acc + t.size, 0);
  }

  encode(inputIds: number[]): Tensor {
    const bag = embedMean(this.embedding, inputIds);
    const h1 = tanhT(add(matvec(this.encW1, bag), this.encB1));
    return tanhT(add(matvec(this.encW2, h1), this.encB2));
  }

  /** Teacher-forced summed log-likelihood of the target ids (a scalar node
   * holding the NLL; the log-likelihood is its negation). */
  sequenceNllNode(decoder: DecoderKey, ctx: Tensor, targetIds: number[], bosId: number): Tensor {
    const dec = this.decoders[decoder];
    if (!dec) throw new Error(`decoder ${decoder} not present in this architecture`);
    const hidden = this.config.hiddenDim;
    let s1: Tensor = new Tensor(hidden);
    let s2: Tensor = new Tensor(hidden);
    let prev = bosId;
    const losses: Tensor[] = [];
    for (const target of targetIds) {
      const e = embedRow(this.embedding, prev);
      s1 = tanhT(add(matvec(dec.wx1, e), matvec(dec.wh1, s1), matvec(dec.wc1, ctx), dec.b1));
      s2 = tanhT(add(matvec(dec.wx2, s1), matvec(dec.wh2, s2), dec.b2));
      const logits = add(matvec(dec.wo, s2), dec.bo);
      losses.push(nllFromLogits(logits, target));
      prev = target;
    }
    return sumScalars(losses);
  }

  /** Greedy decode up to maxLen tokens; stops early on EOS. */
  generate(decoder: DecoderKey, inputIds: number[], tokenizer: Tokenizer, maxLen: number): string {
    const dec = this.decoders[decoder];
    if (!dec) throw new Error(`decoder ${decoder} not present in this architecture`);
    const ctx = this.encode(inputIds);
    const hidden = this.config.hiddenDim;
    let s1: Tensor = new Tensor(hidden);
    let s2: Tensor = new Tensor(hidden);
    let prev = tokenizer.bos;
    const out: number[] = [];
    for (let step = 0; step < maxLen; step++) {
      const e = embedRow(this.embedding, prev);
      s1 = tanhT(add(matvec(dec.wx1, e), matvec(dec.wh1, s1), matvec(dec.wc1, ctx), dec.b1));
      s2 = tanhT(add(matvec(dec.wx2, s1), matvec(dec.wh2, s2), dec.b2));
      const logits = add(matvec(dec.wo, s2), dec.bo);
      let best = 0;
      for (let i = 1; i < logits.size; i++) {
        if (logits.data[i]! > logits.data[best]!) best = i;
      }
      if (best === tokenizer.eos) break;
      out.push(best);
      prev = best;
    }
    return tokenizer.decode(out);
  }

  snapshot(): Record<string, number[]> {
    const out: Record<string, number[]> = {};
    for (const [name, t] of this.namedParameters()) out[name] = [...t.data];
    return out;
  }

  restore(snapshot: Record<string, number[]>): void {
    for (const [name, t] of this.namedParameters()) {
      const values = snapshot[name];
      if (!values || values.length !== t.size) {
        throw new Error(`snapshot missing or mis-sized parameter ${name}`);
      }
      t.data.set(values);
      t.zeroGrad();
    }
  }
}

export { backward };
