/** Application shell: loads schema and subjects, opens a session, and
 * coordinates the explorer and monitor through server round trips. At most
 * one mutating request is in flight; every rendered number is served. */

import { ApiClient, ApiError, CandidateDoc, PathDoc, RecourseApi, SchemaDoc, SubjectDoc } from "./api.js";
import { ExplorerView } from "./explorer.js";
import { MonitorView } from "./monitor.js";

export interface AppElements {
  explorer: HTMLElement;
  monitor: HTMLElement;
  compare: HTMLElement;
  notice: HTMLElement;
  undoButton: HTMLButtonElement;
  status: HTMLElement;
}

export class App {
  schema!: SchemaDoc;
  subjects: SubjectDoc[] = [];
  sessionId = "";
  path: PathDoc = { target_outcome: 0.8, states: [] };
  candidates: CandidateDoc[] = [];
  pending = false;

  private explorerView: ExplorerView;
  private monitorView: MonitorView;

  constructor(
    private api: RecourseApi,
    private el: AppElements,
  ) {
    this.explorerView = new ExplorerView(el.explorer, {
      onSelect: (id) => void this.select(id),
      onHover: (id) => this.hover(id),
    });
    this.monitorView = new MonitorView(el.monitor);
    el.undoButton.addEventListener("click", () => void this.undo());
  }

  async boot(): Promise<void> {
    this.schema = await this.api.getSchema();
    this.subjects = (await this.api.getSubjects()).subjects;
    this.sessionId = await this.api.createSession();
    this.renderAll();
    this.el.status.textContent =
      `${this.subjects.length} subjects loaded; target outcome ${String(this.path.target_outcome)}`;
  }

  renderAll(): void {
    this.explorerView.render({
      schema: this.schema,
      subjects: this.subjects,
      path: this.path,
      candidates: this.candidates,
    });
    this.monitorView.render(this.path, this.schema);
    this.el.undoButton.disabled = this.pending || this.path.states.length === 0;
  }

  async select(subjectId: string): Promise<void> {
    if (this.pending) {
      return;
    }
    this.pending = true;
    this.el.undoButton.disabled = true;
    try {
      const doc = await this.api.select(this.sessionId, subjectId);
      this.path = doc.path;
      this.candidates = doc.candidates;
      this.renderAll();
      const last = this.path.states[this.path.states.length - 1];
      this.el.status.textContent =
        `path length ${this.path.states.length}; outcome ${String(last.outcome)}`;
    } catch (err) {
      this.showError(err);
    } finally {
      this.pending = false;
      this.el.undoButton.disabled = this.path.states.length === 0;
    }
  }

  async undo(): Promise<void> {
    if (this.pending || this.path.states.length === 0) {
      return;
    }
    this.pending = true;
    this.el.undoButton.disabled = true;
    try {
      const doc = await this.api.undo(this.sessionId);
      this.path = doc.path;
      this.candidates = doc.candidates;
      this.renderAll();
      this.el.status.textContent = `path length ${this.path.states.length}`;
    } catch (err) {
      this.showError(err);
    } finally {
      this.pending = false;
      this.el.undoButton.disabled = this.path.states.length === 0;
    }
  }

  /** Highlight the hovered subject everywhere and fill the compare panel
   * with the served deltas against the path's last state. */
  hover(subjectId: string | null): void {
    this.explorerView.setHover(subjectId);
    const panel = this.el.compare;
    panel.textContent = "";
    if (subjectId === null || this.path.states.length === 0) {
      return;
    }
    const last = this.path.states[this.path.states.length - 1];
    const heading = document.createElement("div");
    heading.className = "compare-heading";
    panel.appendChild(heading);

    const table = document.createElement("table");
    table.className = "compare-table";
    const addRow = (feature: string, value: string, phi: string) => {
      const tr = document.createElement("tr");
      for (const text of [feature, value, phi]) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    };

    if (subjectId === last.subject_id) {
      heading.textContent = `${subjectId} is the current state`;
      for (const feature of this.schema.displayed) {
        addRow(feature, "0", "0");
      }
    } else {
      const candidate = this.candidates.find((c) => c.subject_id === subjectId);
      if (!candidate) {
        heading.textContent = `${subjectId} is not a reachable candidate`;
        panel.appendChild(table);
        return;
      }
      heading.textContent =
        `${subjectId} vs ${last.subject_id}: projection ${String(candidate.projection)}`;
      for (const feature of this.schema.displayed) {
        const delta = candidate.deltas[feature];
        addRow(feature, String(delta.value), String(delta.phi));
      }
    }
    panel.appendChild(table);
  }

  showError(err: unknown): void {
    const notice = this.el.notice;
    notice.textContent =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    notice.classList.add("visible");
    setTimeout(() => notice.classList.remove("visible"), 4000);
  }
}

export async function start(): Promise<App> {
  const el: AppElements = {
    explorer: document.getElementById("explorer")!,
    monitor: document.getElementById("monitor")!,
    compare: document.getElementById("compare")!,
    notice: document.getElementById("notice")!,
    undoButton: document.getElementById("undo") as HTMLButtonElement,
    status: document.getElementById("status")!,
  };
  const app = new App(new ApiClient(), el);
  await app.boot();
  return app;
}

// boot only in the browser; tests construct App directly
if (typeof document !== "undefined" && document.getElementById("explorer")) {
  void start();
}
