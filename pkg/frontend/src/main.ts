// Wires the four views into a tabbed single-page client against /v1.

import { ApiClient } from "./api";
import { el } from "./format";
import { DetailView } from "./views/detail";
import { FeedbackView } from "./views/feedback";
import { HistoryView } from "./views/history";
import { PredictionsView } from "./views/predictions";
import "./style.css";

const api = new ApiClient("");
const app = document.querySelector<HTMLElement>("#app")!;

const header = el("header");
header.append(el("h1", "", "scoreloop"));
const health = el("span", "health", "checking…");
header.append(health);

const history = new HistoryView(api);
const views: Record<string, { root: HTMLElement }> = {
  Predictions: new PredictionsView(api),
  "Student detail": new DetailView(api),
  Feedback: new FeedbackView(api, () => void history.refresh()),
  "Retrain & history": history,
};

const nav = el("nav");
const stage = el("main");

function show(name: string): void {
  stage.textContent = "";
  stage.append(views[name].root);
  for (const btn of nav.querySelectorAll("button")) {
    btn.classList.toggle("active", btn.textContent === name);
  }
}

for (const name of Object.keys(views)) {
  const btn = el("button", "tab", name);
  btn.addEventListener("click", () => show(name));
  nav.append(btn);
}

app.append(header, nav, stage);
show("Predictions");

void api
  .health()
  .then((resp) => {
    health.textContent =
      resp.status === "ok"
        ? `serving version ${resp.version_id}`
        : "no model trained yet";
  })
  .catch(() => {
    health.textContent = "API unreachable";
  });
void history.refresh();
