import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type {
  AlternativesPayload,
  Api,
  FlagRequest,
  FlagResponse,
  ScorePayload,
} from "../src/api.js";
import { Controller } from "../src/controller.js";

interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (err: unknown) => void;
}

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

function payloadFor(text: string, score = 42): ScorePayload {
  const words = text.split(" ").filter((w) => w.length > 0);
  let offset = 0;
  return {
    score,
    probability: score / 100,
    model_version: "rcst1-test",
    words: words.map((w) => {
      const start = offset;
      offset += w.length + 1;
      return { text: w, start, end: start + w.length, attention: 1 / words.length };
    }),
  };
}

class MockApi implements Api {
  scoreCalls: string[] = [];
  altCalls: Array<{ text: string; wordIndex: number; k: number }> = [];
  flagCalls: FlagRequest[] = [];
  scoreQueue: Array<Deferred<ScorePayload>> = [];
  altResult: AlternativesPayload = { candidates: [] };
  altShouldFail = false;
  flagResult: FlagResponse = { ok: true, id: "flag-1" };
  flagShouldFail = false;
  autoResolveScore = true;

  score(text: string): Promise<ScorePayload> {
    this.scoreCalls.push(text);
    if (this.autoResolveScore) {
      return Promise.resolve(payloadFor(text));
    }
    const d = deferred<ScorePayload>();
    this.scoreQueue.push(d);
    return d.promise;
  }

  alternatives(text: string, wordIndex: number, k: number): Promise<AlternativesPayload> {
    this.altCalls.push({ text, wordIndex, k });
    if (this.altShouldFail) return Promise.reject(new Error("boom"));
    return Promise.resolve(this.altResult);
  }

  flag(request: FlagRequest): Promise<FlagResponse> {
    this.flagCalls.push(request);
    if (this.flagShouldFail) return Promise.reject(new Error("flag failed"));
    return Promise.resolve(this.flagResult);
  }
}

async function flush(): Promise<void> {
  // settle pending promise chains
  for (let i = 0; i < 5; i++) await Promise.resolve();
}

describe("debounced scoring", () => {
  let api: MockApi;
  let controller: Controller;

  beforeEach(() => {
    vi.useFakeTimers();
    api = new MockApi();
    controller = new Controller(api);
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("emits exactly one request per keystroke burst", async () => {
    controller.onEdit("t");
    vi.advanceTimersByTime(150);
    controller.onEdit("to");
    vi.advanceTimersByTime(150);
    controller.onEdit("tox");
    expect(api.scoreCalls).toHaveLength(0);
    vi.advanceTimersByTime(400);
    await flush();
    expect(api.scoreCalls).toEqual(["tox"]);
  });

  it("waits the full debounce window", async () => {
    controller.onEdit("hello");
    vi.advanceTimersByTime(399);
    expect(api.scoreCalls).toHaveLength(0);
    vi.advanceTimersByTime(1);
    await flush();
    expect(api.scoreCalls).toHaveLength(1);
  });

  it("never requests for empty or whitespace text", async () => {
    controller.onEdit("");
    controller.onEdit("   ");
    vi.advanceTimersByTime(1000);
    await flush();
    expect(api.scoreCalls).toHaveLength(0);
  });

  it("clearing the textbox resets to neutral without a request", async () => {
    controller.onEdit("toxic words");
    vi.advanceTimersByTime(400);
    await flush();
    expect(controller.state.lastScore).not.toBeNull();
    controller.onEdit("");
    vi.advanceTimersByTime(1000);
    await flush();
    expect(controller.state.lastScore).toBeNull();
    expect(controller.state.scoredText).toBeNull();
    expect(api.scoreCalls).toHaveLength(1); // only the first edit ever hit the API
  });

  it("discards stale responses by sequence number", async () => {
    api.autoResolveScore = false;
    controller.onEdit("first");
    vi.advanceTimersByTime(400);
    controller.onEdit("second");
    vi.advanceTimersByTime(400);
    expect(api.scoreQueue).toHaveLength(2);
    // resolve out of order: newest first, then the stale one
    api.scoreQueue[1]!.resolve(payloadFor("second", 70));
    await flush();
    api.scoreQueue[0]!.resolve(payloadFor("first", 10));
    await flush();
    expect(controller.state.lastScore?.score).toBe(70);
    expect(controller.state.scoredText).toBe("second");
  });

  it("clearing the textbox supersedes an in-flight response", async () => {
    api.autoResolveScore = false;
    controller.onEdit("toxic");
    vi.advanceTimersByTime(400);
    controller.onEdit("");
    api.scoreQueue[0]!.resolve(payloadFor("toxic", 90));
    await flush();
    expect(controller.state.lastScore).toBeNull();
  });

  it("keeps the last good score on network failure", async () => {
    api.autoResolveScore = false;
    controller.onEdit("good text");
    vi.advanceTimersByTime(400);
    api.scoreQueue[0]!.resolve(payloadFor("good text", 12));
    await flush();
    controller.onEdit("good text more");
    vi.advanceTimersByTime(400);
    api.scoreQueue[1]!.reject(new Error("network down"));
    await flush();
    expect(controller.state.lastScore?.score).toBe(12);
    expect(controller.state.error).toBe("network down");
  });

  it("every displayed score string appears verbatim in an API response", async () => {
    const seen: number[] = [];
    api.autoResolveScore = false;
    controller.onEdit("abc");
    vi.advanceTimersByTime(400);
    const payload = payloadFor("abc", 63);
    seen.push(payload.score);
    api.scoreQueue[0]!.resolve(payload);
    await flush();
    expect(seen).toContain(controller.state.lastScore!.score);
  });
});

describe("suggestion menu", () => {
  let api: MockApi;
  let controller: Controller;

  beforeEach(() => {
    vi.useFakeTimers();
    api = new MockApi();
    controller = new Controller(api);
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  async function scoreText(text: string): Promise<void> {
    controller.onEdit(text);
    vi.advanceTimersByTime(400);
    await flush();
  }

  it("lists candidates in exactly the payload order", async () => {
    await scoreText("an idiotic video");
    api.altResult = {
      candidates: [
        { replacement: "nonsensical", similarity: 0.9, text: "an nonsensical video", score: 8, probability: 0.08 },
        { replacement: "silly", similarity: 0.7, text: "an silly video", score: 30, probability: 0.3 },
        { replacement: null, similarity: null, text: "an video", score: 4, probability: 0.04 },
      ],
    };
    await controller.onHoverWord(1);
    const items = controller.state.openMenu?.candidates ?? [];
    expect(items.map((c) => c.replacement)).toEqual(["nonsensical", "silly", null]);
  });

  it("requests alternatives for the scored text with the configured k", async () => {
    await scoreText("an idiotic video");
    await controller.onHoverWord(2);
    expect(api.altCalls).toEqual([{ text: "an idiotic video", wordIndex: 2, k: 5 }]);
  });

  it("ignores hovers outside the scored words", async () => {
    await scoreText("two words");
    await controller.onHoverWord(7);
    expect(api.altCalls).toHaveLength(0);
    expect(controller.state.openMenu).toBeNull();
  });

  it("ignores hovers before any score exists", async () => {
    await controller.onHoverWord(0);
    expect(api.altCalls).toHaveLength(0);
  });

  it("marks the menu failed on fetch error so the UI can offer retry", async () => {
    await scoreText("an idiotic video");
    api.altShouldFail = true;
    await controller.onHoverWord(1);
    expect(controller.state.openMenu).toEqual({ wordIndex: 1, candidates: null, failed: true });
  });

  it("selecting a candidate replaces the text and rescored immediately", async () => {
    await scoreText("an idiotic video");
    expect(api.scoreCalls).toEqual(["an idiotic video"]);
    controller.selectCandidate({
      replacement: "nonsensical",
      similarity: 0.9,
      text: "an nonsensical video",
      score: 8,
      probability: 0.08,
    });
    await flush();
    // immediate: no debounce wait needed
    expect(api.scoreCalls).toEqual(["an idiotic video", "an nonsensical video"]);
    expect(controller.state.text).toBe("an nonsensical video");
    expect(controller.state.lastScore?.score).toBe(42); // from the mock response
    expect(controller.state.openMenu).toBeNull();
  });
});

describe("flagging", () => {
  let api: MockApi;
  let controller: Controller;

  beforeEach(() => {
    vi.useFakeTimers();
    api = new MockApi();
    controller = new Controller(api);
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("does nothing before any score exists", async () => {
    await controller.submitFlag("false_positive");
    expect(api.flagCalls).toHaveLength(0);
    expect(controller.state.flagStatus).toBe("idle");
  });

  it("posts the exact scored text and score", async () => {
    api.autoResolveScore = false;
    controller.onEdit("this song go hard");
    vi.advanceTimersByTime(400);
    api.scoreQueue[0]!.resolve(payloadFor("this song go hard", 88));
    await flush();
    await controller.submitFlag("false_positive", "clearly fine");
    expect(api.flagCalls).toEqual([
      {
        text: "this song go hard",
        model_score: 88,
        verdict: "false_positive",
        comment: "clearly fine",
      },
    ]);
    expect(controller.state.flagStatus).toBe("sent");
    expect(controller.state.lastFlagId).toBe("flag-1");
  });

  it("omits the comment field when empty", async () => {
    controller.onEdit("hello there");
    vi.advanceTimersByTime(400);
    await flush();
    await controller.submitFlag("false_negative");
    expect(api.flagCalls[0]).toEqual({
      text: "hello there",
      model_score: 42,
      verdict: "false_negative",
    });
  });

  it("stays idle on failure so the form remains usable", async () => {
    controller.onEdit("hello there");
    vi.advanceTimersByTime(400);
    await flush();
    api.flagShouldFail = true;
    await controller.submitFlag("false_positive", "kept");
    expect(controller.state.flagStatus).toBe("idle");
    expect(controller.state.error).toBe("flag failed");
  });

  it("editing after a sent flag resets the status", async () => {
    controller.onEdit("hello there");
    vi.advanceTimersByTime(400);
    await flush();
    await controller.submitFlag("false_positive");
    expect(controller.state.flagStatus).toBe("sent");
    controller.onEdit("hello there again");
    expect(controller.state.flagStatus).toBe("idle");
  });
});
