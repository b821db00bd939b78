import { describe, expect, it } from "vitest";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { loadPromptFile, PromptPair, splitByKind } from "../src/data.js";
import { combinedLoss } from "../src/loss.js";
import { EncoderDecoder } from "../src/model.js";
import { buildTokenizer, DEFAULT_CONFIG, train, TrainConfig } from "../src/train.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function fixturePairs(): PromptPair[] {
  return loadPromptFile(join(FIXTURES, "prompts.jsonl"));
}

function smokeConfig(overrides: Partial<TrainConfig> = {}): TrainConfig {
  return {
    ...DEFAULT_CONFIG,
    learningRate: 0.01,
    batchSize: 8,
    epochs: 5,
    seed: 1,
    embedDim: 12,
    hiddenDim: 16,
    ...overrides,
  };
}

describe("config defaults", () => {
  it("carries the documented default hyperparameters", () => {
    expect(DEFAULT_CONFIG.lambdaGrid).toEqual([0.01, 0.05, 0.1, 0.5, 1.0, 10.0]);
    expect(DEFAULT_CONFIG.learningRate).toBe(2e-5);
    expect(DEFAULT_CONFIG.batchSize).toBe(2);
    expect(DEFAULT_CONFIG.maxGenerationLength).toBe(100);
    expect(DEFAULT_CONFIG.epochs).toBe(25);
  });

  it("rejects negative lambda and oversized hidden dims", () => {
    expect(() => train(smokeConfig({ lambda: -0.1 }), fixturePairs())).toThrow(/lambda/);
    expect(() => train(smokeConfig({ hiddenDim: 65 }), fixturePairs())).toThrow(/hiddenDim/);
  });
});

describe("loss composition during training", () => {
  it("holds the identity at every logged step", () => {
    const result = train(smokeConfig({ lambda: 0.5, epochs: 3, batchSize: 2 }), fixturePairs());
    expect(result.metrics.length).toBeGreaterThan(0);
    for (const m of result.metrics) {
      expect(Math.abs(m.lossTotal - (m.lossOri + m.lambda * m.lossAug))).toBeLessThan(1e-9);
    }
  });
});

describe("baseline reduction", () => {
  it("lambda 0 walks the exact ori-only trajectory", () => {
    const pairs = fixturePairs();
    const config = smokeConfig({ lambda: 0, epochs: 3, batchSize: 2 });
    const union = train(config, pairs);
    const oriOnly = train(config, pairs, { oriOnly: true });
    expect(union.metrics.length).toBe(oriOnly.metrics.length);
    for (let i = 0; i < union.metrics.length; i++) {
      expect(union.metrics[i]!.lossOri).toBe(oriOnly.metrics[i]!.lossOri);
      expect(union.metrics[i]!.lossTotal).toBe(oriOnly.metrics[i]!.lossOri);
    }
    const a = union.model.snapshot();
    const b = oriOnly.model.snapshot();
    for (const name of Object.keys(a)) {
      expect(a[name]).toEqual(b[name]);
    }
  });
});

describe("multi-task architecture", () => {
  it("has exactly one extra decoder's worth of parameters", () => {
    const tokenizer = buildTokenizer(fixturePairs());
    const base = { vocabSize: tokenizer.size, embedDim: 12, hiddenDim: 16, seed: 2 };
    const gotta = new EncoderDecoder({ ...base, architecture: "gotta" });
    const mtl = new EncoderDecoder({ ...base, architecture: "mtl" });
    const decoderSize = Object.values(gotta.decoders.main!).reduce((acc, t) => acc + t.size, 0);
    expect(mtl.parameterCount() - gotta.parameterCount()).toBe(decoderSize);
  });

  it("matches the shared-decoder loss when both decoders start identical", () => {
    const pairs = fixturePairs();
    const tokenizer = buildTokenizer(pairs);
    const base = { vocabSize: tokenizer.size, embedDim: 12, hiddenDim: 16, seed: 3 };
    const gotta = new EncoderDecoder({ ...base, architecture: "gotta" });
    const mtl = new EncoderDecoder({ ...base, architecture: "mtl" });
    // same seed: shared blocks already identical; clone main into aux
    for (const [name, tensor] of Object.entries(mtl.decoders.main!)) {
      mtl.decoders.aux![name as keyof typeof mtl.decoders.aux].data.set(tensor.data);
    }
    const { ori, aug } = splitByKind(pairs);
    const batchOri = ori.slice(0, 2);
    const batchAug = aug.slice(0, 2);
    const lossGotta = combinedLoss(gotta, tokenizer, batchOri, batchAug, 1.0).breakdown;
    const lossMtl = combinedLoss(mtl, tokenizer, batchOri, batchAug, 1.0).breakdown;
    expect(lossMtl.lossOri).toBe(lossGotta.lossOri);
    expect(lossMtl.lossAug).toBe(lossGotta.lossAug);
    expect(lossMtl.lossTotal).toBe(lossGotta.lossTotal);
  });

  it("routes aug pairs to the exclusive decoder", () => {
    const tokenizer = buildTokenizer(fixturePairs());
    const mtl = new EncoderDecoder({
      vocabSize: tokenizer.size,
      embedDim: 12,
      hiddenDim: 16,
      seed: 3,
      architecture: "mtl",
    });
    expect(mtl.decoderFor("ori")).toBe("main");
    expect(mtl.decoderFor("aug")).toBe("aux");
    const gotta = new EncoderDecoder({
      vocabSize: tokenizer.size,
      embedDim: 12,
      hiddenDim: 16,
      seed: 3,
      architecture: "gotta",
    });
    expect(gotta.decoderFor("aug")).toBe("main");
  });
});

describe("training smoke", () => {
  it("saves one checkpoint per epoch and is seed-deterministic", () => {
    const config = smokeConfig({ epochs: 4, lambda: 1.0 });
    const pairs = fixturePairs().slice(0, 10);
    const a = train(config, pairs);
    const b = train(config, pairs);
    expect(a.checkpoints.map((c) => c.epoch)).toEqual([1, 2, 3, 4]);
    expect(a.epochMeanLoss).toEqual(b.epochMeanLoss);
  });
});
