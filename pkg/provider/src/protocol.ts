/** Wire types for the newline-delimited JSON protocol (see PROTOCOL.md). */

export const PROTOCOL_VERSION = 1;
export const MAX_BATCH = 256;

export type Op = "hello" | "embed" | "sentiment";

export interface Request {
  id: number | string;
  op: Op;
  batch?: unknown[];
}

export interface HelloResponse {
  id: number | string;
  ok: true;
  op: "hello";
  protocol: number;
  dim: number;
  embed_model: string;
  sentiment_model: string;
}

export type ItemResult =
  | { ok: true; vector: number[] }
  | { ok: true; scores: [number, number, number] }
  | { ok: false; error: string };

export interface BatchResponse {
  id: number | string;
  ok: true;
  op: "embed" | "sentiment";
  results: ItemResult[];
}

export interface ErrorResponse {
  id: number | string | null;
  ok: false;
  error: string;
}

export type Response = HelloResponse | BatchResponse | ErrorResponse;
