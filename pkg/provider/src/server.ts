/**
 * Line-protocol provider server: one JSON request per line, one JSON
 * response line per request, batches answered in order with per-item
 * error isolation. Protocol violations produce an error line; nothing
 * crashes the stream.
 */

import * as net from "node:net";
import { parseArgs } from "node:util";
import {
  EMBED_DIM,
  EMBED_MODEL_ID,
  SENTIMENT_MODEL_ID,
  embed,
  sentiment,
} from "./backend.js";
import { MAX_BATCH, PROTOCOL_VERSION, type ItemResult, type Response } from "./protocol.js";

function handleLine(line: string): Response {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return { id: null, ok: false, error: "request is not valid JSON" };
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return { id: null, ok: false, error: "request must be a JSON object" };
  }
  const req = parsed as Record<string, unknown>;
  const id =
    typeof req.id === "number" || typeof req.id === "string" ? req.id : null;
  if (id === null) {
    return { id: null, ok: false, error: "request needs a numeric or string id" };
  }
  const op = req.op;
  if (op === "hello") {
    return {
      id,
      ok: true,
      op: "hello",
      protocol: PROTOCOL_VERSION,
      dim: EMBED_DIM,
      embed_model: EMBED_MODEL_ID,
      sentiment_model: SENTIMENT_MODEL_ID,
    };
  }
  if (op !== "embed" && op !== "sentiment") {
    return { id, ok: false, error: `unknown op ${JSON.stringify(op)}` };
  }
  const batch = req.batch;
  if (!Array.isArray(batch) || batch.length === 0) {
    return { id, ok: false, error: "batch must be a non-empty list" };
  }
  if (batch.length > MAX_BATCH) {
    return { id, ok: false, error: `batch exceeds ${MAX_BATCH} items` };
  }
  const results: ItemResult[] = batch.map((item) => {
    if (typeof item !== "string") {
      return { ok: false, error: "batch item must be a string" };
    }
    try {
      return op === "embed"
        ? { ok: true, vector: embed(item) }
        : { ok: true, scores: sentiment(item) };
    } catch (err) {
      return { ok: false, error: String(err) };
    }
  });
  return { id, ok: true, op, results };
}

export function createServer(): net.Server {
  return net.createServer((socket) => {
    let buffer = "";
    socket.on("data", (chunk) => {
      buffer += chunk.toString("utf-8");
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (!line) continue;
        socket.write(JSON.stringify(handleLine(line)) + "\n");
      }
    });
    socket.on("error", () => socket.destroy());
  });
}

function main(): void {
  const { values } = parseArgs({
    options: {
      port: { type: "string", default: "7878" },
      host: { type: "string", default: "127.0.0.1" },
      "embed-model": { type: "string", default: EMBED_MODEL_ID },
      "sentiment-model": { type: "string", default: SENTIMENT_MODEL_ID },
    },
  });
  if (values["embed-model"] !== EMBED_MODEL_ID) {
    console.error(`unknown embed model ${values["embed-model"]}; bundled: ${EMBED_MODEL_ID}`);
    process.exit(2);
  }
  if (values["sentiment-model"] !== SENTIMENT_MODEL_ID) {
    console.error(
      `unknown sentiment model ${values["sentiment-model"]}; bundled: ${SENTIMENT_MODEL_ID}`,
    );
    process.exit(2);
  }
  const server = createServer();
  server.listen(Number(values.port), values.host, () => {
    const address = server.address() as net.AddressInfo;
    console.log(`LISTENING ${address.port}`);
  });
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main();
}
