// Feedback entry: a validated form for one post-intervention record.
// Submit issues exactly one POST /v1/feedback with the entered payload.

import type { ApiClient, StudentRecord } from "../api";
import { el } from "../format";

interface Field {
  name: string;
  label: string;
  required: boolean;
  min?: number;
  max?: number;
}

// the server imputes anything left blank, so only the essentials are shown
export const FIELDS: Field[] = [
  { name: "id", label: "student id", required: true },
  { name: "Exam_Score", label: "observed exam score", required: true, min: 0, max: 100 },
  { name: "Hours_Studied", label: "hours studied / week", required: false, min: 0, max: 60 },
  { name: "Attendance", label: "attendance %", required: false, min: 0, max: 100 },
  { name: "Tutoring_Sessions", label: "tutoring sessions / month", required: false, min: 0, max: 20 },
  { name: "Previous_Scores", label: "previous score", required: false, min: 0, max: 100 },
];

export class FeedbackView {
  readonly root: HTMLElement;
  private inputs = new Map<string, HTMLInputElement>();
  private note: HTMLInputElement;
  private status: HTMLElement;
  private submitting = false;

  constructor(private api: ApiClient, private onAccepted?: () => void) {
    this.root = el("section", "view feedback");
    const form = el("form", "feedback-form") as HTMLFormElement;
    for (const f of FIELDS) {
      const row = el("label", "field", f.label + (f.required ? " *" : ""));
      const input = el("input", `field-${f.name}`) as HTMLInputElement;
      input.name = f.name;
      row.append(input);
      form.append(row);
      this.inputs.set(f.name, input);
    }
    const noteRow = el("label", "field", "note");
    this.note = el("input", "field-note") as HTMLInputElement;
    this.note.name = "note";
    noteRow.append(this.note);
    const submit = el("button", "submit-btn", "Submit feedback") as HTMLButtonElement;
    submit.type = "submit";
    this.status = el("p", "status");
    form.append(noteRow, submit);
    this.root.append(form, this.status);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit();
    });
  }

  validate(): { record: StudentRecord | null; problems: string[] } {
    const record: StudentRecord = {};
    const problems: string[] = [];
    for (const f of FIELDS) {
      const raw = this.inputs.get(f.name)!.value.trim();
      if (!raw) {
        if (f.required) problems.push(`${f.label} is required`);
        continue;
      }
      if (f.min === undefined) {
        record[f.name] = raw;
        continue;
      }
      const num = Number(raw);
      if (!Number.isFinite(num)) {
        problems.push(`${f.label} must be a number`);
      } else if (num < f.min || num > (f.max ?? Infinity)) {
        problems.push(`${f.label} must be between ${f.min} and ${f.max}`);
      } else {
        record[f.name] = num;
      }
    }
    return { record: problems.length ? null : record, problems };
  }

  private async submit(): Promise<void> {
    if (this.submitting) return; // one in-flight POST at a time
    const { record, problems } = this.validate();
    if (!record) {
      this.status.textContent = problems.join("; ");
      return;
    }
    this.submitting = true;
    try {
      const resp = await this.api.feedback([record], this.note.value.trim());
      this.status.textContent =
        `accepted ${resp.accepted} record(s); store now holds ` +
        `${resp.store_size} rows` +
        (resp.retrain_triggered ? "; retrain deployed" : "");
      this.onAccepted?.();
    } catch (err) {
      this.status.textContent = String(err);
    } finally {
      this.submitting = false;
    }
  }
}
