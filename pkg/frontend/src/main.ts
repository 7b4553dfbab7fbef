import { HttpApi } from "./api.js";
import { Controller } from "./controller.js";
import { render, type Elements } from "./render.js";

function mustGet<T extends Element>(selector: string): T {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el;
}

const elements: Elements = {
  scoreArc: mustGet<SVGCircleElement>("#score-arc"),
  scoreFill: mustGet<SVGCircleElement>("#score-fill"),
  scoreNumber: mustGet<HTMLElement>("#score-number"),
  annotated: mustGet<HTMLElement>("#annotated"),
  menu: mustGet<HTMLElement>("#menu"),
  flagPanel: mustGet<HTMLElement>("#flag-panel"),
  flagButtons: [
    mustGet<HTMLButtonElement>("#flag-fp"),
    mustGet<HTMLButtonElement>("#flag-fn"),
  ],
  flagStatus: mustGet<HTMLElement>("#flag-status"),
  errorBanner: mustGet<HTMLElement>("#error-banner"),
};

const textbox = mustGet<HTMLTextAreaElement>("#textbox");
const comment = mustGet<HTMLInputElement>("#flag-comment");

const controller = new Controller(new HttpApi(), {
  onChange: (state) =>
    render(state, elements, {
      onHoverWord: (index) => void controller.onHoverWord(index),
      onSelectCandidate: (candidate) => {
        textbox.value = candidate.text;
        controller.selectCandidate(candidate);
      },
      onRetryMenu: (index) => void controller.onHoverWord(index),
    }),
});

textbox.addEventListener("input", () => controller.onEdit(textbox.value));
mustGet<HTMLButtonElement>("#flag-fp").addEventListener("click", () => {
  void controller.submitFlag("false_positive", comment.value || undefined);
});
mustGet<HTMLButtonElement>("#flag-fn").addEventListener("click", () => {
  void controller.submitFlag("false_negative", comment.value || undefined);
});
document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (!elements.menu.contains(target) && !target.closest(".word")) {
    controller.closeMenu();
  }
});

controller.onEdit("");
