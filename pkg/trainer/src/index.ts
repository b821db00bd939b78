export { SplitMix64 } from "./rng.js";
export { Tensor, backward } from "./tensor.js";
export { Tokenizer } from "./tokenizer.js";
export { EncoderDecoder, type Architecture, type ModelConfig } from "./model.js";
export { Adam } from "./adam.js";
export {
  BatchStream,
  loadPromptFile,
  parsePromptLines,
  splitByKind,
  type PromptPair,
} from "./data.js";
export {
  batchLoss,
  combinedLoss,
  sequenceLogLikelihood,
  truncateInput,
  type LossBreakdown,
} from "./loss.js";
export {
  DEFAULT_CONFIG,
  buildTokenizer,
  train,
  validateConfig,
  type Checkpoint,
  type TrainConfig,
  type TrainResult,
} from "./train.js";
export {
  devExamplesFrom,
  extractAnswer,
  meanDevF1,
  normalizeAnswer,
  predictAnswers,
  scoreExample,
  selectCheckpoint,
  tokenF1,
  type DevExample,
  type SelectionReport,
} from "./select.js";
export { gridSearchLambda, type GridResult, type GridRow } from "./grid.js";
