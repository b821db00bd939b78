/** Command line:
 *
 *   node dist/cli.js train --prompts train.jsonl --out runs/exp1 \
 *       [--dev dev.jsonl] [--lambda 1.0] [--epochs 25] [--seed 0] \
 *       [--arch gotta|mtl] [--batch-size 2] [--lr 2e-5]
 *
 *   node dist/cli.js grid --prompts train.jsonl --dev dev.jsonl \
 *       --out runs/grid1 [--grid 0.01,0.05,0.1,0.5,1.0,10.0]
 *
 * train writes metrics.jsonl (one loss breakdown per step), a
 * checkpoints/ directory, predictions.json for the selected checkpoint
 * (eval-pipeline format: qid -> string), and selection.json. grid writes
 * grid.json with one row per lambda.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { loadPromptFile } from "./data.js";
import { gridSearchLambda } from "./grid.js";
import { devExamplesFrom, predictAnswers, selectCheckpoint } from "./select.js";
import { DEFAULT_CONFIG, train, TrainConfig } from "./train.js";

interface Args {
  command: string;
  options: Map<string, string>;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  if (!command) throw new Error("usage: cli.js <train|grid> --prompts FILE --out DIR [...]");
  const options = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i]!;
    const value = rest[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`bad argument pair: ${flag} ${value ?? ""}`);
    }
    options.set(flag.slice(2), value);
  }
  return { command, options };
}

function requireOption(options: Map<string, string>, name: string): string {
  const value = options.get(name);
  if (value === undefined) throw new Error(`--${name} is required`);
  return value;
}

function configFrom(options: Map<string, string>): TrainConfig {
  const config = { ...DEFAULT_CONFIG };
  if (options.has("lambda")) config.lambda = Number(options.get("lambda"));
  if (options.has("epochs")) config.epochs = Number(options.get("epochs"));
  if (options.has("seed")) config.seed = Number(options.get("seed"));
  if (options.has("batch-size")) config.batchSize = Number(options.get("batch-size"));
  if (options.has("lr")) config.learningRate = Number(options.get("lr"));
  if (options.has("hidden")) config.hiddenDim = Number(options.get("hidden"));
  if (options.has("arch")) {
    const arch = options.get("arch");
    if (arch !== "gotta" && arch !== "mtl") throw new Error(`--arch must be gotta or mtl`);
    config.architecture = arch;
  }
  return config;
}

function runTrain(options: Map<string, string>): void {
  const promptsPath = requireOption(options, "prompts");
  const outDir = requireOption(options, "out");
  const config = configFrom(options);
  const pairs = loadPromptFile(promptsPath);
  const devPath = options.get("dev");
  const devSet = devExamplesFrom(devPath ? loadPromptFile(devPath) : pairs);

  mkdirSync(join(outDir, "checkpoints"), { recursive: true });
  const result = train(config, pairs, {
    onEpoch: (epoch, meanLoss) => {
      console.log(`epoch ${epoch}/${config.epochs} | mean loss ${meanLoss.toFixed(4)}`);
    },
  });

  writeFileSync(
    join(outDir, "metrics.jsonl"),
    result.metrics.map((m) => JSON.stringify(m)).join("\n") + "\n",
  );
  for (const ckpt of result.checkpoints) {
    writeFileSync(
      join(outDir, "checkpoints", `ckpt-${String(ckpt.epoch).padStart(3, "0")}.json`),
      JSON.stringify(ckpt),
    );
  }
  const selection = selectCheckpoint(
    result.checkpoints,
    devSet,
    result.model,
    result.tokenizer,
    config.maxGenerationLength,
    config.maxInputLen,
  );
  writeFileSync(join(outDir, "selection.json"), JSON.stringify(selection, null, 2) + "\n");
  const predictions = predictAnswers(
    result.model,
    result.tokenizer,
    devSet,
    config.maxGenerationLength,
    config.maxInputLen,
  );
  writeFileSync(join(outDir, "predictions.json"), JSON.stringify(predictions, null, 2) + "\n");
  console.log(
    `selected checkpoint epoch ${selection.bestEpoch} (dev F1 ${selection.bestF1.toFixed(4)})`,
  );
}

function runGrid(options: Map<string, string>): void {
  const promptsPath = requireOption(options, "prompts");
  const devPath = requireOption(options, "dev");
  const outDir = requireOption(options, "out");
  const config = configFrom(options);
  const grid = options.has("grid")
    ? options.get("grid")!.split(",").map(Number)
    : config.lambdaGrid;
  const pairs = loadPromptFile(promptsPath);
  const devSet = devExamplesFrom(loadPromptFile(devPath));

  mkdirSync(outDir, { recursive: true });
  const result = gridSearchLambda(config, pairs, devSet, grid);
  writeFileSync(join(outDir, "grid.json"), JSON.stringify(result, null, 2) + "\n");
  for (const row of result.rows) {
    console.log(`lambda ${row.lambda} | dev F1 ${row.devF1.toFixed(4)} | epoch ${row.bestEpoch}`);
  }
  console.log(`best lambda: ${result.bestLambda}`);
}

export function main(argv: string[]): number {
  try {
    const { command, options } = parseArgs(argv);
    if (command === "train") runTrain(options);
    else if (command === "grid") runGrid(options);
    else throw new Error(`unknown command ${command}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") ?? false;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
