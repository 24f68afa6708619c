// Retrain & history: a delta banner for the latest retrain, a metrics
// table per version, and an inline SVG chart of test RMSE over versions.

import type { ApiClient, HistoryResponse, RetrainResponse } from "../api";
import { el, metric, signed } from "../format";

const SVG_NS = "http://www.w3.org/2000/svg";

export class HistoryView {
  readonly root: HTMLElement;
  private banner: HTMLElement;
  private holder: HTMLElement;
  private status: HTMLElement;

  constructor(private api: ApiClient) {
    this.root = el("section", "view history");
    const refreshBtn = el("button", "refresh-btn", "Refresh");
    const retrainBtn = el("button", "retrain-btn", "Retrain now");
    this.banner = el("div", "retrain-banner");
    this.status = el("p", "status");
    this.holder = el("div", "history-holder");
    this.root.append(refreshBtn, retrainBtn, this.banner, this.status, this.holder);
    refreshBtn.addEventListener("click", () => void this.refresh());
    retrainBtn.addEventListener("click", async () => {
      try {
        this.renderBanner(await this.api.retrain());
        await this.refresh();
      } catch (err) {
        this.status.textContent = String(err);
      }
    });
  }

  async refresh(): Promise<void> {
    try {
      this.render(await this.api.history());
    } catch (err) {
      this.status.textContent = String(err);
    }
  }

  renderBanner(report: RetrainResponse): void {
    this.banner.textContent = "";
    const delta = report.after.rmse - report.before.rmse;
    const improved = delta < 0;
    const line = el(
      "p",
      improved ? "delta improved" : "delta regressed",
      `version ${report.version_id}: test RMSE ${metric(report.before.rmse)} ` +
        `→ ${metric(report.after.rmse)} (${signed(delta)})`,
    );
    const moves = el("ul", "student-moves");
    for (const row of report.rows) {
      moves.append(
        el(
          "li",
          `move ${row.trend}`,
          `${row.id}: ${signed(row.diff)} (${row.trend})`,
        ),
      );
    }
    this.banner.append(line, moves);
  }

  render(history: HistoryResponse): void {
    this.status.textContent = `${history.versions.length} trained version(s)`;
    this.holder.textContent = "";
    const table = el("table", "history-table");
    const head = el("tr");
    for (const h of ["version", "phase", "RMSE", "MAE", "R2", "MAPE %"]) {
      head.append(el("th", "", h));
    }
    table.append(head);
    history.history.forEach((m, i) => {
      const tr = el("tr", "history-row");
      tr.append(
        el("td", "cell-version", String(history.versions[i])),
        el("td", "cell-phase", m.phase_label),
        el("td", "cell-rmse", metric(m.rmse)),
        el("td", "cell-mae", metric(m.mae)),
        el("td", "cell-r2", metric(m.r2)),
        el("td", "cell-mape", metric(m.mape_percent)),
      );
      table.append(tr);
    });
    this.holder.append(table, this.chart(history));
  }

  private chart(history: HistoryResponse): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, "svg");
    const [w, h, pad] = [420, 120, 14];
    svg.setAttribute("class", "rmse-chart");
    svg.setAttribute("viewBox", `0 0 ${w} ${h}`);
    const values = history.history.map((m) => m.rmse);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    const pts = values.map((v, i) => {
      const x = pad + (i * (w - 2 * pad)) / Math.max(values.length - 1, 1);
      const y = h - pad - ((v - lo) / span) * (h - 2 * pad);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    });
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", pts.join(" "));
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#2d6a8a");
    svg.append(line);
    return svg;
  }
}
