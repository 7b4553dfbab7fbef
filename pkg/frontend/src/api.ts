// Typed client for the scoring service. The UI performs no toxicity
// arithmetic of its own: every number shown comes from these payloads.

export interface WordSpan {
  text: string;
  start: number; // UTF-8 byte offset into the scored text
  end: number;
  attention: number;
}

export interface ScorePayload {
  score: number;
  probability: number;
  model_version: string;
  words: WordSpan[];
}

export interface Candidate {
  replacement: string | null; // null encodes the delete edit
  similarity: number | null;
  text: string;
  score: number;
  probability: number;
}

export interface AlternativesPayload {
  candidates: Candidate[];
}

export type Verdict = "false_positive" | "false_negative";

export interface FlagRequest {
  text: string;
  model_score: number;
  verdict: Verdict;
  comment?: string;
}

export interface FlagResponse {
  ok: boolean;
  id: string;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface Api {
  score(text: string): Promise<ScorePayload>;
  alternatives(text: string, wordIndex: number, k: number): Promise<AlternativesPayload>;
  flag(request: FlagRequest): Promise<FlagResponse>;
}

async function post<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    let code = "http_error";
    let message = `request failed with status ${response.status}`;
    try {
      const err = (await response.json()) as { code?: string; message?: string };
      if (err.code) code = err.code;
      if (err.message) message = err.message;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(code, message);
  }
  return (await response.json()) as T;
}

export class HttpApi implements Api {
  constructor(private readonly base: string = "") {}

  score(text: string): Promise<ScorePayload> {
    return post(`${this.base}/api/score`, { text });
  }

  alternatives(text: string, wordIndex: number, k: number): Promise<AlternativesPayload> {
    return post(`${this.base}/api/alternatives`, { text, word_index: wordIndex, k });
  }

  flag(request: FlagRequest): Promise<FlagResponse> {
    return post(`${this.base}/api/flag`, request);
  }
}
