// UI state machine. One instance owns all mutable state; every transition
// funnels through here so the invariants are checkable against a mocked API:
// no request with empty text, stale score responses are dropped by sequence
// number, the suggestion menu preserves server order, and the displayed
// score is always verbatim from the last score response.

import type { Api, AlternativesPayload, Candidate, ScorePayload, Verdict } from "./api.js";

export interface MenuState {
  wordIndex: number;
  candidates: Candidate[] | null; // null while loading
  failed: boolean;
}

export type FlagStatus = "idle" | "sent";

export interface UiState {
  text: string;
  lastScore: ScorePayload | null;
  /** The exact text lastScore was computed for. */
  scoredText: string | null;
  pending: boolean;
  hoveredWord: number | null;
  openMenu: MenuState | null;
  flagStatus: FlagStatus;
  lastFlagId: string | null;
  error: string | null;
}

export interface ControllerOptions {
  debounceMs?: number;
  suggestionCount?: number;
  onChange?: (state: UiState) => void;
}

const DEFAULT_DEBOUNCE_MS = 400;
const DEFAULT_SUGGESTION_COUNT = 5;

export class Controller {
  readonly state: UiState = {
    text: "",
    lastScore: null,
    scoredText: null,
    pending: false,
    hoveredWord: null,
    openMenu: null,
    flagStatus: "idle",
    lastFlagId: null,
    error: null,
  };

  private readonly debounceMs: number;
  private readonly suggestionCount: number;
  private readonly onChange: (state: UiState) => void;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;

  constructor(
    private readonly api: Api,
    options: ControllerOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.suggestionCount = options.suggestionCount ?? DEFAULT_SUGGESTION_COUNT;
    this.onChange = options.onChange ?? (() => {});
  }

  private emit(): void {
    this.onChange(this.state);
  }

  private cancelTimer(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  /** Text change: schedule scoring after the debounce window. */
  onEdit(text: string): void {
    this.state.text = text;
    this.state.flagStatus = "idle";
    this.state.openMenu = null;
    this.state.hoveredWord = null;
    this.cancelTimer();
    if (text.trim() === "") {
      // cleared textbox: reset to neutral, supersede anything in flight
      this.sequence += 1;
      this.state.lastScore = null;
      this.state.scoredText = null;
      this.state.pending = false;
      this.state.error = null;
      this.emit();
      return;
    }
    this.state.pending = true;
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.requestScore();
    }, this.debounceMs);
    this.emit();
  }

  private async requestScore(): Promise<void> {
    const seq = ++this.sequence;
    const text = this.state.text;
    try {
      const payload = await this.api.score(text);
      if (seq !== this.sequence) return; // superseded by a newer request
      this.state.lastScore = payload;
      this.state.scoredText = text;
      this.state.pending = false;
      this.state.error = null;
      this.emit();
    } catch (err) {
      if (seq !== this.sequence) return;
      // keep the last good score; surface the failure unobtrusively
      this.state.pending = false;
      this.state.error = err instanceof Error ? err.message : String(err);
      this.emit();
    }
  }

  /** Hovering a scored word opens its suggestion menu. */
  async onHoverWord(wordIndex: number): Promise<void> {
    const score = this.state.lastScore;
    const scoredText = this.state.scoredText;
    if (!score || scoredText === null) return;
    if (wordIndex < 0 || wordIndex >= score.words.length) return;
    this.state.hoveredWord = wordIndex;
    this.state.openMenu = { wordIndex, candidates: null, failed: false };
    this.emit();
    try {
      const payload: AlternativesPayload = await this.api.alternatives(
        scoredText,
        wordIndex,
        this.suggestionCount,
      );
      if (!this.isMenuCurrent(wordIndex, scoredText)) return;
      // server order preserved verbatim
      this.state.openMenu = { wordIndex, candidates: payload.candidates, failed: false };
      this.emit();
    } catch {
      if (!this.isMenuCurrent(wordIndex, scoredText)) return;
      this.state.openMenu = { wordIndex, candidates: null, failed: true };
      this.emit();
    }
  }

  private isMenuCurrent(wordIndex: number, scoredText: string): boolean {
    return this.state.openMenu?.wordIndex === wordIndex && this.state.scoredText === scoredText;
  }

  closeMenu(): void {
    if (this.state.openMenu === null && this.state.hoveredWord === null) return;
    this.state.openMenu = null;
    this.state.hoveredWord = null;
    this.emit();
  }

  /** Applying a candidate replaces the text and rescoring is immediate. */
  selectCandidate(candidate: Candidate): void {
    this.cancelTimer();
    this.state.text = candidate.text;
    this.state.openMenu = null;
    this.state.hoveredWord = null;
    this.state.flagStatus = "idle";
    this.state.pending = true;
    this.emit();
    void this.requestScore();
  }

  /** Flag the scored text exactly as the model saw and scored it. */
  async submitFlag(verdict: Verdict, comment?: string): Promise<void> {
    const score = this.state.lastScore;
    const scoredText = this.state.scoredText;
    if (!score || scoredText === null) return;
    try {
      const response = await this.api.flag({
        text: scoredText,
        model_score: score.score,
        verdict,
        ...(comment ? { comment } : {}),
      });
      this.state.flagStatus = "sent";
      this.state.lastFlagId = response.id;
      this.state.error = null;
      this.emit();
    } catch (err) {
      // leave flagStatus at idle so the form stays available for retry
      this.state.error = err instanceof Error ? err.message : String(err);
      this.emit();
    }
  }
}
