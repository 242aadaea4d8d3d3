import { ReviewApi } from "./api.js";
import { ReviewFlow } from "./flow.js";
import { bindKeyboard } from "./keyboard.js";
import { ReviewScreen } from "./ui.js";

// Entry point: ?session=<id> reviews an existing session (resumable across
// reloads because the service owns all state); without it, a small form
// creates one. ?api=<base> points at a service on another origin.

function query(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

function mountSessionForm(root: HTMLElement, api: ReviewApi): void {
  const form = document.createElement("form");
  form.id = "create-session";
  form.innerHTML = `
    <h1>Start a review session</h1>
    <label>Sample size <input name="sample_size" type="number" value="100" min="1"></label>
    <label>Seed <input name="seed" type="number" value="0"></label>
    <label>Subset
      <select name="subset">
        <option value="kept">kept</option>
        <option value="all">all</option>
        <option value="discarded">discarded</option>
      </select>
    </label>
    <label>Reviewer <input name="reviewer" type="text" value="anonymous"></label>
    <button type="submit">Create session</button>
    <p id="form-error" class="error-banner" style="display:none"></p>
  `;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    api
      .createSession({
        sample_size: Number(data.get("sample_size")),
        seed: Number(data.get("seed")),
        subset: String(data.get("subset")),
      })
      .then((session) => {
        const params = new URLSearchParams(window.location.search);
        params.set("session", session.session_id);
        params.set("reviewer", String(data.get("reviewer")));
        window.location.search = params.toString();
      })
      .catch((error) => {
        const banner = form.querySelector<HTMLElement>("#form-error")!;
        banner.textContent = String(error);
        banner.style.display = "block";
      });
  });
  root.append(form);
}

export function boot(root: HTMLElement): void {
  const api = new ReviewApi(query("api") ?? "");
  const sessionId = query("session");
  if (!sessionId) {
    mountSessionForm(root, api);
    return;
  }
  const flow = new ReviewFlow(api, sessionId, query("reviewer") ?? "anonymous");
  const screen = new ReviewScreen(root, api, flow);
  bindKeyboard(window, flow, {
    toggleBoxes: () => screen.toggleBoxes(),
    zoomIn: () => screen.zoomIn(),
    zoomOut: () => screen.zoomOut(),
  });
  void flow.start();
}

const root = document.getElementById("app");
if (root) boot(root);
