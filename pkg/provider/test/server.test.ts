import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { LineClient, startServer, type RunningServer } from "./helpers.js";

const FIXTURE = Array.from({ length: 20 }, (_, i) => `fixture sentence ${i} about topic ${i % 5}`);

let server: RunningServer;
let client: LineClient;

beforeAll(async () => {
  server = await startServer();
  client = await LineClient.connect(server.port);
});

afterAll(() => {
  client?.close();
  server?.stop();
});

describe("handshake", () => {
  it("reports protocol, dimension and model ids", async () => {
    const hello = await client.request("hello");
    expect(hello.ok).toBe(true);
    expect(hello.protocol).toBe(1);
    expect(hello.dim).toBeGreaterThan(0);
    expect(hello.embed_model).toBeTruthy();
    expect(hello.sentiment_model).toBeTruthy();
  });
});

describe("embed op", () => {
  it("answers one vector per input, in order, at the declared dimension", async () => {
    const hello = await client.request("hello");
    const response = await client.request("embed", { batch: FIXTURE });
    expect(response.ok).toBe(true);
    expect(response.results).toHaveLength(FIXTURE.length);
    for (const item of response.results) {
      expect(item.ok).toBe(true);
      expect(item.vector).toHaveLength(hello.dim);
    }
    // order preservation: batch result equals the singleton result
    for (const idx of [0, 7, 19]) {
      const solo = await client.request("embed", { batch: [FIXTURE[idx]] });
      expect(response.results[idx].vector).toEqual(solo.results[0].vector);
    }
  });

  it("is deterministic within 1e-6 across repeated batches", async () => {
    const first = await client.request("embed", { batch: FIXTURE });
    const second = await client.request("embed", { batch: FIXTURE });
    for (let i = 0; i < FIXTURE.length; i++) {
      const a = first.results[i].vector as number[];
      const b = second.results[i].vector as number[];
      for (let j = 0; j < a.length; j++) {
        expect(Math.abs(a[j] - b[j])).toBeLessThan(1e-6);
      }
    }
  });

  it("isolates per-item failures without aborting the batch", async () => {
    const response = await client.raw(
      JSON.stringify({ id: 99, op: "embed", batch: ["fine", 42, "also fine"] }),
    );
    expect(response.ok).toBe(true);
    expect(response.results[0].ok).toBe(true);
    expect(response.results[1].ok).toBe(false);
    expect(response.results[1].error).toMatch(/string/);
    expect(response.results[2].ok).toBe(true);
  });
});

describe("sentiment op", () => {
  it("returns 3-score tuples summing to one", async () => {
    const response = await client.request("sentiment", { batch: FIXTURE });
    expect(response.results).toHaveLength(FIXTURE.length);
    for (const item of response.results) {
      expect(item.scores).toHaveLength(3);
      const total = item.scores[0] + item.scores[1] + item.scores[2];
      expect(Math.abs(total - 1)).toBeLessThan(1e-3);
    }
  });

  it("is deterministic within 1e-6", async () => {
    const first = await client.request("sentiment", { batch: FIXTURE });
    const second = await client.request("sentiment", { batch: FIXTURE });
    for (let i = 0; i < FIXTURE.length; i++) {
      for (let j = 0; j < 3; j++) {
        expect(Math.abs(first.results[i].scores[j] - second.results[i].scores[j])).toBeLessThan(1e-6);
      }
    }
  });

  it("ranks a strongly positive sentence above a strongly negative one", async () => {
    const response = await client.request("sentiment", {
      batch: ["what a wonderful great amazing day", "a terrible awful tragic disaster"],
    });
    const [positive, negative] = response.results.map((r: any) => r.scores);
    expect(positive[2]).toBeGreaterThan(negative[2]);
    expect(negative[0]).toBeGreaterThan(positive[0]);
  });
});

describe("protocol violations", () => {
  it("answers bad JSON with an error line carrying a null id", async () => {
    const response = await client.raw("this is not json");
    expect(response.ok).toBe(false);
    expect(response.id).toBeNull();
  });

  it("rejects unknown ops and missing ids without closing the stream", async () => {
    const unknown = await client.raw(JSON.stringify({ id: 1, op: "summon" }));
    expect(unknown.ok).toBe(false);
    const noId = await client.raw(JSON.stringify({ op: "hello" }));
    expect(noId.ok).toBe(false);
    expect(noId.id).toBeNull();
    // stream still alive
    const hello = await client.request("hello");
    expect(hello.ok).toBe(true);
  });

  it("rejects empty and oversized batches", async () => {
    const empty = await client.request("embed", { batch: [] });
    expect(empty.ok).toBe(false);
    const oversized = await client.request("embed", { batch: Array(257).fill("x") });
    expect(oversized.ok).toBe(false);
    expect(oversized.error).toMatch(/256/);
  });
});
