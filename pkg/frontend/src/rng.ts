/**
 * Deterministic seeded PRNG (sfc32) for reproducible sampling.
 *
 * Request seeds arrive as JSON numbers; the toolkit client keeps them below
 * 2^53 so they parse exactly as IEEE doubles. The seed is split into two
 * 32-bit words that initialize the sfc32 state, and the generator is warmed
 * up so nearby seeds decorrelate.
 */

export type Rng = () => number;

/** Build a uniform [0, 1) generator from a non-negative integer seed. */
export function makeRng(seed: number): Rng {
  const lo = seed >>> 0;
  const hi = Math.floor(seed / 0x1_0000_0000) >>> 0;
  let a = lo ^ 0x9e3779b9;
  let b = hi ^ 0x85ebca6b;
  let c = (lo + 0xc2b2ae35) >>> 0;
  let d = (hi + 0x27d4eb2f) >>> 0;
  const next = () => {
    a >>>= 0; b >>>= 0; c >>>= 0; d >>>= 0;
    const t = (a + b) | 0;
    a = b ^ (b >>> 9);
    b = (c + (c << 3)) | 0;
    c = (c << 21) | (c >>> 11);
    d = (d + 1) | 0;
    const out = (t + d) | 0;
    c = (c + out) | 0;
    return (out >>> 0) / 4294967296;
  };
  for (let i = 0; i < 12; i++) next(); // warmup
  return next;
}
