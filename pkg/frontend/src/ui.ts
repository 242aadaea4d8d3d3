import type { ReviewApi } from "./api.js";
import type { FlowState, ReviewFlow } from "./flow.js";
import { RULE_KEYS, RULE_LABELS, type GtBox, type RuleKey } from "./types.js";

const ZOOM_STEPS = [1, 1.5, 2, 3, 4];

/**
 * DOM view: original and edited image side by side under a shared zoom,
 * toggleable ground-truth box overlays, one tri-state row per protocol rule,
 * progress plus the service-reported session stats, and an inline error
 * banner with retry. Renders purely from FlowState.
 */
export class ReviewScreen {
  private showBoxes = true;
  private zoomIndex = 0;
  private lastState: FlowState | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ReviewApi,
    private readonly flow: ReviewFlow,
  ) {
    flow.onChange((state) => this.render(state));
  }

  toggleBoxes(): void {
    this.showBoxes = !this.showBoxes;
    if (this.lastState) this.render(this.lastState);
  }

  zoomIn(): void {
    this.zoomIndex = Math.min(this.zoomIndex + 1, ZOOM_STEPS.length - 1);
    this.applyZoom();
  }

  zoomOut(): void {
    this.zoomIndex = Math.max(this.zoomIndex - 1, 0);
    this.applyZoom();
  }

  private applyZoom(): void {
    const zoom = ZOOM_STEPS[this.zoomIndex];
    for (const pane of Array.from(
      this.root.querySelectorAll<HTMLElement>(".image-pane .zoomable"),
    )) {
      pane.style.transform = `scale(${zoom})`;
    }
  }

  render(state: FlowState): void {
    this.lastState = state;
    this.root.textContent = "";

    const header = el("header", { class: "topbar" });
    header.append(
      el("span", { class: "progress", id: "progress" }, `${state.reviewed} / ${state.total}`),
      el(
        "span",
        { class: "stats", id: "session-stats" },
        state.stats
          ? `good rate ${state.stats.good_rate.toFixed(2)}% over ${state.stats.n_reviewed}`
          : "no reviews yet",
      ),
    );
    this.root.append(header);

    if (state.phase === "error") {
      const banner = el("div", { class: "error-banner", id: "error-banner" });
      banner.append(
        el("span", {}, state.error ?? "something went wrong"),
        button("Retry", "retry-button", () => void this.flow.retry()),
      );
      this.root.append(banner);
      return;
    }

    if (state.phase === "loading") {
      this.root.append(el("div", { class: "notice", id: "loading" }, "loading..."));
      return;
    }

    if (state.phase === "done") {
      this.root.append(
        el(
          "div",
          { class: "notice", id: "done" },
          `session complete: ${state.reviewed} of ${state.total} reviewed`,
        ),
      );
      return;
    }

    const item = state.item!;
    const panes = el("div", { class: "panes" });
    panes.append(
      this.imagePane("Original", this.api.imageUrl(item.edited_id, "source"), item.boxes),
      this.imagePane("Edited", this.api.imageUrl(item.edited_id, "edited"), item.boxes),
    );
    this.root.append(panes);

    const controls = el("div", { class: "controls" });
    controls.append(
      button(this.showBoxes ? "Hide boxes (b)" : "Show boxes (b)", "boxes-button", () =>
        this.toggleBoxes(),
      ),
      button("Zoom + ", "zoom-in", () => this.zoomIn()),
      button("Zoom -", "zoom-out", () => this.zoomOut()),
      el("span", { class: "item-id" }, `${item.edited_id} (SS${item.sea_state})`),
    );
    this.root.append(controls);

    const rules = el("div", { class: "rules" });
    RULE_KEYS.forEach((rule, index) => {
      rules.append(this.ruleRow(rule, index, state));
    });
    this.root.append(rules);

    const submit = button("Submit verdict (Enter)", "submit-button", () =>
      void this.flow.submit(),
    );
    submit.disabled = !this.flow.canSubmit();
    this.root.append(submit);
    this.applyZoom();
  }

  private ruleRow(rule: RuleKey, index: number, state: FlowState): HTMLElement {
    const row = el("div", { class: "rule-row", "data-rule": rule });
    const value = state.toggles[rule];
    row.append(el("span", { class: "rule-label" }, `${index + 1}. ${RULE_LABELS[rule]}`));
    const yes = button(`Yes (${index + 1})`, `${rule}-yes`, () =>
      this.flow.setRule(rule, "yes"),
    );
    const no = button(`No (${"qwe"[index]})`, `${rule}-no`, () =>
      this.flow.setRule(rule, "no"),
    );
    yes.classList.toggle("selected", value === "yes");
    no.classList.toggle("selected", value === "no");
    row.classList.toggle("unanswered", value === "unset");
    row.append(yes, no);
    return row;
  }

  private imagePane(title: string, url: string, boxes: GtBox[]): HTMLElement {
    const pane = el("div", { class: "image-pane" });
    pane.append(el("h2", {}, title));
    const zoomable = el("div", { class: "zoomable" });
    const wrapper = el("div", { class: "image-wrapper" });
    const img = el("img", { src: url, alt: title }) as HTMLImageElement;
    wrapper.append(img);

    const overlay = el("div", {
      class: "box-overlay",
      style: this.showBoxes ? "" : "display: none",
    });
    const place = () => {
      overlay.textContent = "";
      const w = img.naturalWidth || 1;
      const h = img.naturalHeight || 1;
      for (const box of boxes) {
        overlay.append(
          el("div", {
            class: `gt-box ${box.label === "boat" ? "boat" : "other"}`,
            style:
              `left: ${(100 * box.x) / w}%; top: ${(100 * box.y) / h}%; ` +
              `width: ${(100 * box.w) / w}%; height: ${(100 * box.h) / h}%;`,
            title: box.label,
          }),
        );
      }
    };
    img.addEventListener("load", place);
    if (img.complete) place();
    wrapper.append(overlay);
    zoomable.append(wrapper);
    pane.append(zoomable);
    return pane;
  }
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value !== "") node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, id: string, onClick: () => void): HTMLButtonElement {
  const node = el("button", { id, type: "button" }, label) as HTMLButtonElement;
  node.addEventListener("click", onClick);
  return node;
}
