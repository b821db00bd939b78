/** Reverse-mode autodiff over dense Float64 tensors.
 *
 * Just enough machinery for a miniature encoder-decoder: vectors, matrices,
 * matrix-vector products, pointwise tanh, embedding lookups, and a fused
 * log-softmax negative log-likelihood. Each op returns a new node that
 * records its parents and a backward closure; `backward(root)` runs the
 * closures in reverse topological order, accumulating into `.grad`.
 */

export class Tensor {
  data: Float64Array;
  grad: Float64Array;
  readonly rows: number;
  readonly cols: number;
  parents: Tensor[] = [];
  backFn: (() => void) | null = null;

  constructor(rows: number, cols = 1, data?: Float64Array) {
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
    this.grad = new Float64Array(rows * cols);
  }

  get size(): number {
    return this.rows * this.cols;
  }

  get value(): number {
    if (this.size !== 1) throw new Error("value is only defined for scalars");
    return this.data[0]!;
  }

  zeroGrad(): void {
    this.grad.fill(0);
  }
}

export function scalar(x: number): Tensor {
  const t = new Tensor(1, 1);
  t.data[0] = x;
  return t;
}

/** y = W x, W is rows x cols, x a cols-vector. */
export function matvec(W: Tensor, x: Tensor): Tensor {
  if (W.cols !== x.rows || x.cols !== 1) {
    throw new Error(`shape mismatch: (${W.rows}x${W.cols}) @ (${x.rows}x${x.cols})`);
  }
  const out = new Tensor(W.rows);
  for (let i = 0; i < W.rows; i++) {
    let acc = 0;
    const base = i * W.cols;
    for (let j = 0; j < W.cols; j++) acc += W.data[base + j]! * x.data[j]!;
    out.data[i] = acc;
  }
  out.parents = [W, x];
  out.backFn = () => {
    for (let i = 0; i < W.rows; i++) {
      const g = out.grad[i]!;
      if (g === 0) continue;
      const base = i * W.cols;
      for (let j = 0; j < W.cols; j++) {
        W.grad[base + j]! += g * x.data[j]!;
        x.grad[j]! += g * W.data[base + j]!;
      }
    }
  };
  return out;
}

/** Elementwise sum of same-shaped tensors. */
export function add(...terms: Tensor[]): Tensor {
  if (terms.length === 0) throw new Error("add needs at least one term");
  const first = terms[0]!;
  const out = new Tensor(first.rows, first.cols);
  for (const t of terms) {
    if (t.size !== first.size) throw new Error("shape mismatch in add");
    for (let i = 0; i < t.size; i++) out.data[i]! += t.data[i]!;
  }
  out.parents = [...terms];
  out.backFn = () => {
    for (const t of terms) {
      for (let i = 0; i < t.size; i++) t.grad[i]! += out.grad[i]!;
    }
  };
  return out;
}

export function tanhT(x: Tensor): Tensor {
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < x.size; i++) out.data[i] = Math.tanh(x.data[i]!);
  out.parents = [x];
  out.backFn = () => {
    for (let i = 0; i < x.size; i++) {
      const y = out.data[i]!;
      x.grad[i]! += out.grad[i]! * (1 - y * y);
    }
  };
  return out;
}

export function scale(x: Tensor, k: number): Tensor {
  const out = new Tensor(x.rows, x.cols);
  for (let i = 0; i < x.size; i++) out.data[i] = x.data[i]! * k;
  out.parents = [x];
  out.backFn = () => {
    for (let i = 0; i < x.size; i++) x.grad[i]! += out.grad[i]! * k;
  };
  return out;
}

/** One row of an embedding table as a column vector. */
export function embedRow(table: Tensor, row: number): Tensor {
  if (row < 0 || row >= table.rows) throw new Error(`row ${row} out of range`);
  const out = new Tensor(table.cols);
  const base = row * table.cols;
  for (let j = 0; j < table.cols; j++) out.data[j] = table.data[base + j]!;
  out.parents = [table];
  out.backFn = () => {
    for (let j = 0; j < table.cols; j++) table.grad[base + j]! += out.grad[j]!;
  };
  return out;
}

/** Mean of several embedding rows; the encoder's bag-of-characters input. */
export function embedMean(table: Tensor, rows: number[]): Tensor {
  if (rows.length === 0) return new Tensor(table.cols);
  const out = new Tensor(table.cols);
  for (const r of rows) {
    const base = r * table.cols;
    for (let j = 0; j < table.cols; j++) out.data[j]! += table.data[base + j]!;
  }
  const inv = 1 / rows.length;
  for (let j = 0; j < table.cols; j++) out.data[j]! *= inv;
  out.parents = [table];
  out.backFn = () => {
    for (const r of rows) {
      const base = r * table.cols;
      for (let j = 0; j < table.cols; j++) table.grad[base + j]! += out.grad[j]! * inv;
    }
  };
  return out;
}

/** Fused -log softmax(logits)[target], numerically stabilized. */
export function nllFromLogits(logits: Tensor, target: number): Tensor {
  if (target < 0 || target >= logits.size) throw new Error(`target ${target} out of range`);
  let max = -Infinity;
  for (let i = 0; i < logits.size; i++) max = Math.max(max, logits.data[i]!);
  let sumExp = 0;
  for (let i = 0; i < logits.size; i++) sumExp += Math.exp(logits.data[i]! - max);
  const lse = max + Math.log(sumExp);
  const out = new Tensor(1);
  out.data[0] = lse - logits.data[target]!;
  out.parents = [logits];
  out.backFn = () => {
    const g = out.grad[0]!;
    if (g === 0) return;
    for (let i = 0; i < logits.size; i++) {
      const p = Math.exp(logits.data[i]! - lse);
      logits.grad[i]! += g * (p - (i === target ? 1 : 0));
    }
  };
  return out;
}

/** Scalar a + k * b; the dual-task loss combiner. */
export function addScaled(a: Tensor, b: Tensor, k: number): Tensor {
  if (a.size !== 1 || b.size !== 1) throw new Error("addScaled expects scalars");
  const out = new Tensor(1);
  out.data[0] = a.data[0]! + k * b.data[0]!;
  out.parents = [a, b];
  out.backFn = () => {
    a.grad[0]! += out.grad[0]!;
    b.grad[0]! += out.grad[0]! * k;
  };
  return out;
}

export function sumScalars(terms: Tensor[]): Tensor {
  const out = new Tensor(1);
  for (const t of terms) {
    if (t.size !== 1) throw new Error("sumScalars expects scalars");
    out.data[0]! += t.data[0]!;
  }
  out.parents = [...terms];
  out.backFn = () => {
    for (const t of terms) t.grad[0]! += out.grad[0]!;
  };
  return out;
}

/** Backprop from a scalar root through the recorded graph. */
export function backward(root: Tensor): void {
  if (root.size !== 1) throw new Error("backward starts from a scalar");
  const order: Tensor[] = [];
  const seen = new Set<Tensor>();
  const stack: Array<[Tensor, number]> = [[root, 0]];
  while (stack.length > 0) {
    const top = stack[stack.length - 1]!;
    const [node, childIdx] = top;
    if (childIdx < node.parents.length) {
      top[1] += 1;
      const child = node.parents[childIdx]!;
      if (!seen.has(child)) {
        seen.add(child);
        stack.push([child, 0]);
      }
    } else {
      stack.pop();
      order.push(node);
    }
  }
  root.grad[0] = 1;
  for (let i = order.length - 1; i >= 0; i--) {
    const node = order[i]!;
    if (node.backFn) node.backFn();
  }
}
