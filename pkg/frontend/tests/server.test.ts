import { spawn, type ChildProcessWithoutNullStreams } from "child_process";
import * as fs from "fs";
import * as path from "path";
import * as readline from "readline";
import { afterEach, describe, expect, it } from "vitest";

const DIST = path.join(__dirname, "..", "dist", "server.js");
const CORPUS = path.join(__dirname, "..", "fixtures", "tiny_corpus.txt");

class Client {
  proc: ChildProcessWithoutNullStreams;
  private lines: readline.Interface;
  private pending: Array<(line: string) => void> = [];
  private buffered: string[] = [];

  constructor(args: string[]) {
    this.proc = spawn("node", [DIST, ...args]);
    this.lines = readline.createInterface({ input: this.proc.stdout });
    this.lines.on("line", (line) => {
      const waiter = this.pending.shift();
      if (waiter) waiter(line);
      else this.buffered.push(line);
    });
  }

  next(timeoutMs = 5000): Promise<string> {
    const queued = this.buffered.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out")), timeoutMs);
      this.pending.push((line) => {
        clearTimeout(timer);
        resolve(line);
      });
    });
  }

  send(doc: unknown): void {
    this.proc.stdin.write(JSON.stringify(doc) + "\n");
  }

  sendRaw(line: string): void {
    this.proc.stdin.write(line + "\n");
  }

  close(): void {
    this.proc.stdin.end();
    this.proc.kill();
  }
}

describe.skipIf(!fs.existsSync(DIST))("server protocol (requires npm run build)", () => {
  let client: Client;
  afterEach(() => client?.close());

  it("hands shake and answers deterministically", async () => {
    client = new Client(["--corpus", CORPUS, "--k", "4"]);
    const hello = JSON.parse(await client.next());
    expect(hello.hello).toEqual({ k: 4, vocab_size: 256 });

    client.send({ id: 0, context: [], num_samples: 2, seed: 777 });
    const first = JSON.parse(await client.next());
    expect(first.id).toBe(0);
    expect(first.samples).toHaveLength(2);
    expect(first.samples[0]).toHaveLength(4);

    client.send({ id: 1, context: [], num_samples: 2, seed: 777 });
    const second = JSON.parse(await client.next());
    expect(second.samples).toEqual(first.samples);
  });

  it("reports errors and survives bad input", async () => {
    client = new Client(["--corpus", CORPUS, "--k", "2"]);
    await client.next(); // handshake

    client.sendRaw("not json at all");
    const err1 = JSON.parse(await client.next());
    expect(err1.error).toMatch(/not valid JSON/);

    client.send({ id: 5, context: [300], num_samples: 1, seed: 0 });
    const err2 = JSON.parse(await client.next());
    expect(err2.id).toBe(5);
    expect(err2.error).toMatch(/token ids/);

    client.send({ id: 6, context: [104, 101], num_samples: 1, seed: 3 });
    const ok = JSON.parse(await client.next());
    expect(ok.id).toBe(6);
    expect(ok.samples[0]).toHaveLength(2);
  });
});
