/**
 * Reference model backends. Both are deterministic so conformance tests can
 * pin exact behavior; heavier neural backends can be added behind the same
 * two-function interface.
 */

export const EMBED_MODEL_ID = "ref-hash-embed-v1";
export const SENTIMENT_MODEL_ID = "ref-lex-sent-v1";
export const EMBED_DIM = 384;

/** FNV-1a 32-bit; stable across platforms. */
function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

function words(text: string): string[] {
  return text.toLowerCase().match(/[a-z0-9_]+/g) ?? [];
}

/**
 * Hashed bag of word unigrams, word bigrams and character trigrams,
 * log-tf weighted, L2-normalized.
 */
export function embed(text: string, dim: number = EMBED_DIM): number[] {
  const features = new Map<string, number>();
  const ws = words(text);
  for (const w of ws) features.set("w:" + w, (features.get("w:" + w) ?? 0) + 1);
  for (let i = 0; i + 1 < ws.length; i++) {
    const key = "b:" + ws[i] + " " + ws[i + 1];
    features.set(key, (features.get(key) ?? 0) + 1);
  }
  const flat = ws.join(" ");
  for (let i = 0; i + 2 < flat.length; i++) {
    const key = "c:" + flat.slice(i, i + 3);
    features.set(key, (features.get(key) ?? 0) + 1);
  }
  const vec = new Array<number>(dim).fill(0);
  for (const [key, tf] of features) {
    const h = fnv1a(key);
    const bucket = h % dim;
    const sign = (h & 0x80000000) !== 0 ? -1 : 1;
    vec[bucket] += sign * (1 + Math.log(tf));
  }
  let norm = 0;
  for (const v of vec) norm += v * v;
  norm = Math.sqrt(norm);
  if (norm > 0) for (let i = 0; i < dim; i++) vec[i] /= norm;
  return vec;
}

const NEGATORS = new Set(["not", "no", "never", "cant", "wont", "dont"]);

const POLARITY: Record<string, number> = {
  good: 0.7, great: 0.9, excellent: 1.0, amazing: 0.9, wonderful: 0.9,
  love: 0.8, loving: 0.7, happy: 0.8, joy: 0.8, glad: 0.7, hope: 0.5,
  hopeful: 0.6, thanks: 0.7, thank: 0.7, grateful: 0.8, proud: 0.7,
  best: 0.8, better: 0.5, win: 0.6, success: 0.8, safe: 0.5, calm: 0.4,
  relief: 0.6, enjoy: 0.6, beautiful: 0.7, brilliant: 0.9, fantastic: 0.9,
  positive: 0.4, helpful: 0.6, kind: 0.5, support: 0.4, free: 0.3,
  bad: -0.7, terrible: -0.9, horrible: -0.9, awful: -0.9, worst: -0.9,
  worse: -0.6, sad: -0.7, angry: -0.8, fear: -0.7, afraid: -0.7,
  scared: -0.8, panic: -0.7, anxious: -0.7, stress: -0.6, sick: -0.6,
  death: -0.9, dead: -0.9, die: -0.9, died: -0.9, kill: -0.9,
  crisis: -0.7, disaster: -0.8, chaos: -0.7, fail: -0.7, failure: -0.8,
  hate: -0.8, blame: -0.6, lies: -0.7, corrupt: -0.8, useless: -0.7,
  pain: -0.7, suffer: -0.8, struggle: -0.6, lost: -0.5, wrong: -0.5,
  worried: -0.7, worry: -0.6, tragic: -0.9, cruel: -0.8, grim: -0.7,
  stupid: -0.7, ridiculous: -0.6, pathetic: -0.8, furious: -0.8, mess: -0.6,
};

/** Mean token polarity with single-token negation flips. */
function meanPolarity(text: string): number {
  const ws = words(text);
  if (ws.length === 0) return 0;
  let total = 0;
  for (let i = 0; i < ws.length; i++) {
    let polarity = POLARITY[ws[i]];
    if (polarity === undefined) continue;
    if (i > 0 && NEGATORS.has(ws[i - 1])) polarity = -polarity;
    total += polarity;
  }
  return total / ws.length;
}

const BAND = 0.05;

/** [negative, neutral, positive], summing to 1. */
export function sentiment(text: string): [number, number, number] {
  const s = Math.max(-1, Math.min(1, meanPolarity(text)));
  if (s > BAND) {
    const pos = 0.4 + 0.5 * ((s - BAND) / (1 - BAND));
    const rest = 1 - pos;
    const neu = 0.7 * rest;
    return [rest - neu, neu, pos];
  }
  if (s < -BAND) {
    const neg = 0.4 + 0.5 * ((-s - BAND) / (1 - BAND));
    const rest = 1 - neg;
    const neu = 0.7 * rest;
    return [neg, neu, rest - neu];
  }
  const lean = s / BAND; // in [-1, 1]
  return [0.15 * (1 - lean), 0.7, 0.15 * (1 + lean)];
}
