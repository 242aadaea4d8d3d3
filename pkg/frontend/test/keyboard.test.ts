import { describe, expect, it } from "vitest";

import { ReviewFlow } from "../src/flow.js";
import { handleKey, type KeyboardHooks } from "../src/keyboard.js";
import { FakeApi } from "./fakes.js";

function hooks() {
  const calls = { boxes: 0, zoomIn: 0, zoomOut: 0 };
  const impl: KeyboardHooks = {
    toggleBoxes: () => calls.boxes++,
    zoomIn: () => calls.zoomIn++,
    zoomOut: () => calls.zoomOut++,
  };
  return { calls, impl };
}

describe("keyboard shortcuts", () => {
  it("digits answer yes and qwe answer no, per rule", async () => {
    const flow = new ReviewFlow(new FakeApi(["a"]), "s");
    await flow.start();
    const { impl } = hooks();
    expect(handleKey("1", flow, impl)).toBe(true);
    expect(handleKey("w", flow, impl)).toBe(true);
    expect(handleKey("3", flow, impl)).toBe(true);
    expect(flow.snapshot().toggles).toEqual({
      background_valid: "yes",
      background_realistic: "no",
      boat_preserved: "yes",
    });
  });

  it("enter submits only when the verdict is complete", async () => {
    const api = new FakeApi(["a"]);
    const flow = new ReviewFlow(api, "s");
    await flow.start();
    const { impl } = hooks();
    handleKey("Enter", flow, impl);
    await new Promise((resolve) => setTimeout(resolve, 20));
    expect(api.verdicts.size).toBe(0); // gated: nothing was answered yet
    for (const key of ["1", "2", "e"]) handleKey(key, flow, impl);
    handleKey("Enter", flow, impl);
    await new Promise((resolve) => setTimeout(resolve, 20));
    expect(api.verdicts.size).toBe(1);
    expect(api.verdicts.get("a")!.flags.boat_preserved).toBe(false);
  });

  it("b toggles overlays and +/- drive zoom", async () => {
    const flow = new ReviewFlow(new FakeApi(["a"]), "s");
    await flow.start();
    const { calls, impl } = hooks();
    handleKey("b", flow, impl);
    handleKey("+", flow, impl);
    handleKey("=", flow, impl);
    handleKey("-", flow, impl);
    expect(calls).toEqual({ boxes: 1, zoomIn: 2, zoomOut: 1 });
  });

  it("unbound keys fall through", async () => {
    const flow = new ReviewFlow(new FakeApi(["a"]), "s");
    await flow.start();
    const { impl } = hooks();
    expect(handleKey("x", flow, impl)).toBe(false);
  });
});
