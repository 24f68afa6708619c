// Student detail: per-feature attribution bars for one stored record.
// The footer restates local accuracy: baseline + contributions = score.

import type { ApiClient, ExplainResponse } from "../api";
import { el, phi, score } from "../format";

export class DetailView {
  readonly root: HTMLElement;
  private holder: HTMLElement;
  private status: HTMLElement;

  constructor(private api: ApiClient) {
    this.root = el("section", "view detail");
    const input = el("input", "record-id") as HTMLInputElement;
    input.placeholder = "stored record id, e.g. original-17";
    const btn = el("button", "explain-btn", "Explain");
    this.status = el("p", "status");
    this.holder = el("div", "bars-holder");
    this.root.append(input, btn, this.status, this.holder);
    btn.addEventListener("click", async () => {
      try {
        this.render(await this.api.explainStored(input.value.trim()));
      } catch (err) {
        this.status.textContent = String(err);
      }
    });
  }

  render(result: ExplainResponse): void {
    this.status.textContent =
      `${result.id} — predicted ${score(result.prediction)} ` +
      `(version ${result.version_id})`;
    this.holder.textContent = "";
    const top = Math.max(...result.contributions.map((c) => Math.abs(c.phi))) || 1;
    const list = el("div", "bars");
    for (const c of result.contributions) {
      const row = el("div", "bar-row");
      const bar = el("div", c.phi >= 0 ? "bar positive" : "bar negative");
      bar.style.width = `${(Math.abs(c.phi) / top) * 100}%`;
      row.append(
        el("span", "bar-feature", c.feature),
        bar,
        el("span", "bar-phi", phi(c.phi)),
      );
      list.append(row);
    }
    const total = result.contributions.reduce((s, c) => s + c.phi, 0);
    const footer = el(
      "p",
      "local-accuracy",
      `baseline ${score(result.base_value)} ${phi(total)} = ` +
        `${score(result.base_value + total)}`,
    );
    this.holder.append(list, footer);
  }
}
