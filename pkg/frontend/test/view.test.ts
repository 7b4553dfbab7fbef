import { describe, expect, it } from "vitest";

import { arcFraction, maxAttention, toxicityColor, underlineOpacity } from "../src/view.js";

describe("toxicityColor", () => {
  it("is exactly white at score 0", () => {
    expect(toxicityColor(0)).toBe("#FFFFFF");
  });

  it("is exactly #B71C1C at score 100", () => {
    expect(toxicityColor(100)).toBe("#B71C1C");
  });

  it("interpolates each channel linearly", () => {
    // midpoint: round(255 + (end - 255) / 2) per channel
    expect(toxicityColor(50)).toBe("#DB8E8E");
  });

  it("clamps out-of-range scores to the endpoints", () => {
    expect(toxicityColor(-5)).toBe("#FFFFFF");
    expect(toxicityColor(250)).toBe("#B71C1C");
  });

  it("darkens monotonically with the score", () => {
    let previous = 256;
    for (let score = 0; score <= 100; score += 5) {
      const green = parseInt(toxicityColor(score).slice(3, 5), 16);
      expect(green).toBeLessThanOrEqual(previous);
      previous = green;
    }
  });
});

describe("arcFraction", () => {
  it("maps score to the filled fraction", () => {
    expect(arcFraction(0)).toBe(0);
    expect(arcFraction(100)).toBe(1);
    expect(arcFraction(37)).toBeCloseTo(0.37, 12);
  });
});

describe("underlineOpacity", () => {
  it("equals attention over the sentence max within 1e-6", () => {
    const attentions = [0.03, 0.4, 0.27, 0.3];
    const top = maxAttention(attentions);
    for (const a of attentions) {
      const opacity = underlineOpacity(a, top);
      expect(Math.abs(opacity - Math.max(0.05, a / top))).toBeLessThan(1e-6);
    }
  });

  it("gives the max-attention word full opacity", () => {
    expect(underlineOpacity(0.4, 0.4)).toBe(1);
  });

  it("applies the 0.05 floor", () => {
    expect(underlineOpacity(0.001, 0.9)).toBe(0.05);
  });

  it("is monotone in attention within one response", () => {
    const attentions = [0.01, 0.05, 0.2, 0.5, 0.24];
    const top = maxAttention(attentions);
    const sorted = [...attentions].sort((x, y) => x - y);
    const opacities = sorted.map((a) => underlineOpacity(a, top));
    for (let i = 1; i < opacities.length; i++) {
      expect(opacities[i]!).toBeGreaterThanOrEqual(opacities[i - 1]!);
    }
  });

  it("treats a single-word sentence as fully opaque", () => {
    expect(underlineOpacity(1, 1)).toBe(1);
  });
});
