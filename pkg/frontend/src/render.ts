// DOM rendering. Reads UiState, writes elements; all event handling is wired
// in main.ts. Word underlines are positioned by slicing the scored text at
// the byte offsets the service reported.

import type { Candidate, ScorePayload } from "./api.js";
import type { UiState } from "./controller.js";
import { arcFraction, maxAttention, toxicityColor, underlineOpacity } from "./view.js";

export interface Elements {
  scoreArc: SVGCircleElement;
  scoreFill: SVGCircleElement;
  scoreNumber: HTMLElement;
  annotated: HTMLElement;
  menu: HTMLElement;
  flagPanel: HTMLElement;
  flagButtons: HTMLButtonElement[];
  flagStatus: HTMLElement;
  errorBanner: HTMLElement;
}

const ARC_CIRCUMFERENCE = 2 * Math.PI * 52; // matches r=52 in index.html

export interface RenderCallbacks {
  onHoverWord(index: number): void;
  onSelectCandidate(candidate: Candidate): void;
  onRetryMenu(index: number): void;
}

function segmentsFromPayload(scoredText: string, payload: ScorePayload): Array<
  { kind: "plain"; text: string } | { kind: "word"; text: string; index: number; attention: number }
> {
  const raw = new TextEncoder().encode(scoredText);
  const decoder = new TextDecoder();
  const segments: Array<
    { kind: "plain"; text: string } | { kind: "word"; text: string; index: number; attention: number }
  > = [];
  let cursor = 0;
  payload.words.forEach((word, index) => {
    if (word.start > cursor) {
      segments.push({ kind: "plain", text: decoder.decode(raw.slice(cursor, word.start)) });
    }
    segments.push({ kind: "word", text: word.text, index, attention: word.attention });
    cursor = word.end;
  });
  if (cursor < raw.length) {
    segments.push({ kind: "plain", text: decoder.decode(raw.slice(cursor)) });
  }
  return segments;
}

export function render(state: UiState, el: Elements, callbacks: RenderCallbacks): void {
  const score = state.lastScore;

  // radial progress bar
  if (score) {
    const fraction = arcFraction(score.score);
    el.scoreArc.style.strokeDasharray = `${ARC_CIRCUMFERENCE}`;
    el.scoreArc.style.strokeDashoffset = `${ARC_CIRCUMFERENCE * (1 - fraction)}`;
    el.scoreFill.style.fill = toxicityColor(score.score);
    el.scoreNumber.textContent = String(score.score);
    el.scoreNumber.style.color = score.score > 55 ? "#ffffff" : "#222222";
  } else {
    el.scoreArc.style.strokeDasharray = `${ARC_CIRCUMFERENCE}`;
    el.scoreArc.style.strokeDashoffset = `${ARC_CIRCUMFERENCE}`;
    el.scoreFill.style.fill = "#FFFFFF";
    el.scoreNumber.textContent = "–";
    el.scoreNumber.style.color = "#222222";
  }

  // annotated text with attention underlines
  el.annotated.replaceChildren();
  if (score && state.scoredText !== null) {
    const top = maxAttention(score.words.map((w) => w.attention));
    for (const segment of segmentsFromPayload(state.scoredText, score)) {
      if (segment.kind === "plain") {
        el.annotated.appendChild(document.createTextNode(segment.text));
      } else {
        const span = document.createElement("span");
        span.className = "word";
        span.textContent = segment.text;
        span.dataset.index = String(segment.index);
        const opacity = underlineOpacity(segment.attention, top);
        span.style.borderBottom = `3px solid rgba(65, 105, 225, ${opacity.toFixed(4)})`;
        span.title = `attention ${segment.attention.toFixed(3)}`;
        span.addEventListener("mouseenter", () => callbacks.onHoverWord(segment.index));
        el.annotated.appendChild(span);
      }
    }
  } else {
    const hint = document.createElement("span");
    hint.className = "hint";
    hint.textContent = state.pending ? "scoring…" : "scored words appear here";
    el.annotated.appendChild(hint);
  }

  // suggestion menu
  el.menu.replaceChildren();
  if (state.openMenu) {
    const menu = state.openMenu;
    el.menu.classList.remove("hidden");
    const wordEl = el.annotated.querySelector<HTMLElement>(`[data-index="${menu.wordIndex}"]`);
    if (wordEl) {
      el.menu.style.left = `${wordEl.offsetLeft}px`;
      el.menu.style.top = `${wordEl.offsetTop + wordEl.offsetHeight + 4}px`;
    }
    if (menu.failed) {
      const retry = document.createElement("button");
      retry.textContent = "failed to load — retry";
      retry.className = "retry";
      retry.addEventListener("click", () => callbacks.onRetryMenu(menu.wordIndex));
      el.menu.appendChild(retry);
    } else if (menu.candidates === null) {
      const loading = document.createElement("div");
      loading.className = "loading";
      loading.textContent = "loading…";
      el.menu.appendChild(loading);
    } else {
      for (const candidate of menu.candidates) {
        const item = document.createElement("button");
        item.className = "candidate";
        const label = document.createElement("span");
        label.textContent = candidate.replacement === null ? "(remove word)" : candidate.replacement;
        const chip = document.createElement("span");
        chip.className = "chip";
        chip.textContent = String(candidate.score);
        chip.style.background = toxicityColor(candidate.score);
        chip.style.color = candidate.score > 55 ? "#ffffff" : "#222222";
        item.append(label, chip);
        item.addEventListener("click", () => callbacks.onSelectCandidate(candidate));
        el.menu.appendChild(item);
      }
    }
  } else {
    el.menu.classList.add("hidden");
  }

  // flagging
  const canFlag = score !== null && state.flagStatus !== "sent";
  for (const button of el.flagButtons) {
    button.disabled = !canFlag;
  }
  if (state.flagStatus === "sent" && state.lastFlagId) {
    el.flagStatus.textContent = `flag recorded (id ${state.lastFlagId})`;
  } else {
    el.flagStatus.textContent = "";
  }

  // error banner
  if (state.error) {
    el.errorBanner.textContent = state.error;
    el.errorBanner.classList.remove("hidden");
  } else {
    el.errorBanner.classList.add("hidden");
  }
}
