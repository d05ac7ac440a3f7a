/**
 * Add-k smoothed byte-level n-gram model.
 *
 * Counts are kept for every context length from 0 (unigrams) up to
 * order - 1, and prediction uses the longest context available. The
 * shorter-context tables cover positions near the start of a request
 * context; in particular, unconditioned draws follow the smoothed corpus
 * unigram distribution rather than collapsing to uniform.
 */

import type { Rng } from "./rng";

export const VOCAB_SIZE = 256;

interface ContextCounts {
  tokens: Map<number, number>;
  total: number;
}

export class NgramTable {
  readonly order: number;
  readonly smoothing: number;
  /** levels[len] maps a joined context of that length to its token counts. */
  private readonly levels: Array<Map<string, ContextCounts>>;

  constructor(corpus: number[], order = 3, smoothing = 0.1) {
    if (order < 1) throw new Error(`order must be >= 1, got ${order}`);
    if (smoothing <= 0) throw new Error(`smoothing must be positive, got ${smoothing}`);
    if (corpus.length === 0) throw new Error("corpus is empty");
    for (const t of corpus) {
      if (!Number.isInteger(t) || t < 0 || t >= VOCAB_SIZE) {
        throw new Error(`corpus token ${t} outside [0, ${VOCAB_SIZE})`);
      }
    }
    this.order = order;
    this.smoothing = smoothing;
    this.levels = [];
    for (let len = 0; len < order; len++) {
      const level = new Map<string, ContextCounts>();
      for (let i = len; i < corpus.length; i++) {
        const key = corpus.slice(i - len, i).join(",");
        let entry = level.get(key);
        if (!entry) {
          entry = { tokens: new Map(), total: 0 };
          level.set(key, entry);
        }
        const tok = corpus[i];
        entry.tokens.set(tok, (entry.tokens.get(tok) ?? 0) + 1);
        entry.total += 1;
      }
      this.levels.push(level);
    }
  }

  private lookup(context: number[]): ContextCounts {
    const len = Math.min(context.length, this.order - 1);
    const key = context.slice(context.length - len).join(",");
    return this.levels[len].get(key) ?? { tokens: new Map(), total: 0 };
  }

  /** Smoothed conditional P(token | context) with add-k over the byte vocab. */
  conditional(context: number[], token: number): number {
    const entry = this.lookup(context);
    const k = this.smoothing;
    return ((entry.tokens.get(token) ?? 0) + k) / (entry.total + k * VOCAB_SIZE);
  }

  /** Draw one token from the smoothed conditional. */
  sampleToken(context: number[], rng: Rng): number {
    const entry = this.lookup(context);
    const k = this.smoothing;
    let u = rng() * (entry.total + k * VOCAB_SIZE);
    for (let t = 0; t < VOCAB_SIZE; t++) {
      u -= (entry.tokens.get(t) ?? 0) + k;
      if (u < 0) return t;
    }
    return VOCAB_SIZE - 1; // fp tail guard
  }

  /** Autoregressively sample a chunk continuing the given context. */
  sampleChunk(context: number[], chunkLen: number, rng: Rng): number[] {
    const ctx = context.slice();
    const out: number[] = [];
    for (let i = 0; i < chunkLen; i++) {
      const tok = this.sampleToken(ctx, rng);
      out.push(tok);
      ctx.push(tok);
    }
    return out;
  }
}
