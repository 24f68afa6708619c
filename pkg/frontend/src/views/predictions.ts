// Predictions table: paste records as JSON, score them, sort by any
// column, and optionally show only at-risk students.

import type { ApiClient, PredictResponse, StudentRecord } from "../api";
import { el, score } from "../format";

type SortKey = "id" | "score" | "at_risk";

export class PredictionsView {
  readonly root: HTMLElement;
  private result: PredictResponse | null = null;
  private sortKey: SortKey = "score";
  private ascending = true;
  private riskOnly = false;
  private table: HTMLElement;
  private status: HTMLElement;

  constructor(private api: ApiClient) {
    this.root = el("section", "view predictions");
    const input = el("textarea", "records-input") as HTMLTextAreaElement;
    input.placeholder = '[{"id": "s-1", "Hours_Studied": 20, ...}]';
    const scoreBtn = el("button", "score-btn", "Score students");
    const filter = el("label", "risk-filter");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    filter.append(box, document.createTextNode(" at-risk only"));
    this.status = el("p", "status");
    this.table = el("div", "table-holder");
    this.root.append(input, scoreBtn, filter, this.status, this.table);

    scoreBtn.addEventListener("click", async () => {
      let records: StudentRecord[];
      try {
        const parsed = JSON.parse(input.value);
        records = Array.isArray(parsed) ? parsed : [parsed];
      } catch {
        this.status.textContent = "input is not valid JSON";
        return;
      }
      try {
        this.render(await this.api.predict(records));
      } catch (err) {
        this.status.textContent = String(err);
      }
    });
    box.addEventListener("change", () => {
      this.riskOnly = box.checked;
      this.redraw();
    });
  }

  render(result: PredictResponse): void {
    this.result = result;
    this.status.textContent =
      `${result.predictions.length} students scored by version ` +
      `${result.version_id} (at-risk below ${score(result.threshold)})`;
    this.redraw();
  }

  private redraw(): void {
    this.table.textContent = "";
    if (!this.result) return;
    const rows = this.result.predictions
      .filter((p) => !this.riskOnly || p.at_risk)
      .sort((a, b) => {
        const [x, y] = [a[this.sortKey], b[this.sortKey]];
        const cmp = x < y ? -1 : x > y ? 1 : 0;
        return this.ascending ? cmp : -cmp;
      });

    const table = el("table", "predictions-table");
    const head = el("tr");
    for (const key of ["id", "score", "at_risk"] as SortKey[]) {
      const th = el("th", "", key === "at_risk" ? "at risk" : key);
      th.addEventListener("click", () => {
        this.ascending = this.sortKey === key ? !this.ascending : true;
        this.sortKey = key;
        this.redraw();
      });
      head.append(th);
    }
    table.append(head);
    for (const p of rows) {
      const tr = el("tr", p.at_risk ? "row at-risk" : "row");
      tr.append(
        el("td", "cell-id", p.id),
        el("td", "cell-score", score(p.score)),
        el("td", "cell-risk", p.at_risk ? "AT RISK" : "ok"),
      );
      table.append(tr);
    }
    this.table.append(table);
  }
}
