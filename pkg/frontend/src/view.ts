// Pure presentation math: score -> color, attention -> underline opacity.

const WHITE = { r: 0xff, g: 0xff, b: 0xff };
const RED = { r: 0xb7, g: 0x1c, b: 0x1c }; // #B71C1C at score 100

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

/** Linear RGB interpolation from #FFFFFF (score 0) to #B71C1C (score 100). */
export function toxicityColor(score: number): string {
  const t = clamp(score, 0, 100) / 100;
  const channel = (from: number, to: number) => Math.round(from + (to - from) * t);
  const hex = (v: number) => v.toString(16).padStart(2, "0").toUpperCase();
  return `#${hex(channel(WHITE.r, RED.r))}${hex(channel(WHITE.g, RED.g))}${hex(channel(WHITE.b, RED.b))}`;
}

/** Fraction of the radial progress arc that is filled. */
export function arcFraction(score: number): number {
  return clamp(score, 0, 100) / 100;
}

/**
 * Underline opacity for one word: attention normalized by the sentence
 * maximum so the dominant word is fully opaque, with a 0.05 floor so every
 * word stays discoverable.
 */
export function underlineOpacity(attention: number, maxAttention: number): number {
  if (maxAttention <= 0) return 1;
  return Math.max(0.05, attention / maxAttention);
}

export function maxAttention(attentions: readonly number[]): number {
  return attentions.reduce((acc, a) => Math.max(acc, a), 0);
}
