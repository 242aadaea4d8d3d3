import type { ReviewFlow } from "./flow.js";
import { RULE_KEYS } from "./types.js";

export interface KeyboardHooks {
  toggleBoxes(): void;
  zoomIn(): void;
  zoomOut(): void;
}

// 1/2/3 answer yes per rule, q/w/e answer no, Enter submits,
// b toggles box overlays, +/- drive the synchronized zoom.
export function handleKey(key: string, flow: ReviewFlow, hooks: KeyboardHooks): boolean {
  const yesIndex = ["1", "2", "3"].indexOf(key);
  if (yesIndex >= 0) {
    flow.setRule(RULE_KEYS[yesIndex], "yes");
    return true;
  }
  const noIndex = ["q", "w", "e"].indexOf(key.toLowerCase());
  if (noIndex >= 0) {
    flow.setRule(RULE_KEYS[noIndex], "no");
    return true;
  }
  if (key === "Enter") {
    if (flow.canSubmit()) void flow.submit();
    return true;
  }
  if (key.toLowerCase() === "b") {
    hooks.toggleBoxes();
    return true;
  }
  if (key === "+" || key === "=") {
    hooks.zoomIn();
    return true;
  }
  if (key === "-") {
    hooks.zoomOut();
    return true;
  }
  return false;
}

export function bindKeyboard(
  target: { addEventListener(type: "keydown", cb: (event: KeyboardEvent) => void): void },
  flow: ReviewFlow,
  hooks: KeyboardHooks,
): void {
  target.addEventListener("keydown", (event) => {
    if (handleKey(event.key, flow, hooks)) event.preventDefault();
  });
}
