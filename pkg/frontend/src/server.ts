/**
 * Stdio JSON server exposing the n-gram model as a black-box sampler.
 *
 * Protocol (one JSON document per LF line, UTF-8):
 *   hello:    {"hello": {"k": <int>, "vocab_size": 256}}        (first line out)
 *   request:  {"id": <int>, "context": [<int>...], "num_samples": <int>, "seed": <int>}
 *   response: {"id": <int>, "samples": [[<int> x k] x num_samples]}
 *   error:    {"id": <int|null>, "error": "<message>"}          (process continues)
 *
 * Sampling is seeded per request, so identical requests always produce
 * identical responses, across process restarts included. EOF on stdin ends
 * the process cleanly.
 */

import * as fs from "fs";
import * as readline from "readline";

import { NgramTable, VOCAB_SIZE } from "./ngram";
import { makeRng } from "./rng";

interface Flags {
  corpus: string;
  k: number;
  order: number;
  smoothing: number;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = { corpus: "", k: 4, order: 3, smoothing: 0.1 };
  for (let i = 0; i < argv.length; i += 2) {
    const name = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${name}`);
    switch (name) {
      case "--corpus": flags.corpus = value; break;
      case "--k": flags.k = Number(value); break;
      case "--order": flags.order = Number(value); break;
      case "--smoothing": flags.smoothing = Number(value); break;
      default: throw new Error(`unknown flag ${name}`);
    }
  }
  if (!flags.corpus) throw new Error("--corpus is required");
  if (!Number.isInteger(flags.k) || flags.k < 1) throw new Error("--k must be a positive integer");
  return flags;
}

function emit(doc: unknown): void {
  process.stdout.write(JSON.stringify(doc) + "\n");
}

function validTokenArray(value: unknown): value is number[] {
  return Array.isArray(value) &&
    value.every((t) => Number.isInteger(t) && t >= 0 && t < VOCAB_SIZE);
}

export function main(): void {
  let flags: Flags;
  try {
    flags = parseFlags(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`refsampler: ${(err as Error).message}\n`);
    process.exit(2);
  }

  const corpus = Array.from(fs.readFileSync(flags.corpus));
  const table = new NgramTable(corpus, flags.order, flags.smoothing);
  emit({ hello: { k: flags.k, vocab_size: VOCAB_SIZE } });

  const lines = readline.createInterface({ input: process.stdin, terminal: false });
  lines.on("line", (line) => {
    if (line.trim() === "") return;
    let doc: Record<string, unknown>;
    try {
      doc = JSON.parse(line);
    } catch {
      emit({ id: null, error: "request line is not valid JSON" });
      return;
    }
    const id = typeof doc.id === "number" ? doc.id : null;
    const numSamples = doc.num_samples;
    const seed = doc.seed;
    if (id === null || !Number.isInteger(numSamples) || (numSamples as number) < 1) {
      emit({ id, error: "request needs integer id and positive num_samples" });
      return;
    }
    if (typeof seed !== "number" || !Number.isFinite(seed) || seed < 0) {
      emit({ id, error: "request needs a non-negative integer seed" });
      return;
    }
    if (!validTokenArray(doc.context)) {
      emit({ id, error: `context must hold token ids in [0, ${VOCAB_SIZE})` });
      return;
    }
    const rng = makeRng(seed);
    const samples: number[][] = [];
    for (let s = 0; s < (numSamples as number); s++) {
      samples.push(table.sampleChunk(doc.context, flags.k, rng));
    }
    emit({ id, samples });
  });
  lines.on("close", () => process.exit(0));
}

if (require.main === module) {
  main();
}
