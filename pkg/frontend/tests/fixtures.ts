/** Deterministic mock documents shaped exactly like the server's wire
 * format, plus an in-memory RecourseApi for app-level tests. */

import {
  CandidateDoc,
  PathDoc,
  PathStateDoc,
  RecourseApi,
  RoundTripDoc,
  SchemaDoc,
  SegmentDoc,
  SubjectDoc,
} from "../src/api.js";

export const DISPLAYED = ["income", "tenure", "history", "rate", "ratio", "amount"];
export const HIDDEN = ["age"];

export function makeSchema(): SchemaDoc {
  const features = [...DISPLAYED, ...HIDDEN].map((name, i) => ({
    name,
    min: 0,
    max: 100 + i,
    mean: 40 + i + 0.125,
    mutable: true,
    display_rank: i < 6 ? i + 1 : null,
  }));
  return { features, displayed: DISPLAYED };
}

export function makeSubject(id: string, seed: number): SubjectDoc {
  const values: Record<string, number> = {};
  const phi: Record<string, number> = {};
  [...DISPLAYED, ...HIDDEN].forEach((name, i) => {
    values[name] = 10 + seed * 7 + i * 3 + 0.0625; // exact binary fractions
    phi[name] = (seed - 2) * 0.01 + i * 0.001 + 0.03125;
  });
  return {
    id,
    values,
    outcome: 0.1 + seed * 0.15 + 0.00390625,
    base: 0.4,
    phi,
    others: -0.02,
  };
}

export function makeSubjects(n = 5): SubjectDoc[] {
  return Array.from({ length: n }, (_, i) => makeSubject(`s${i + 1}`, i));
}

export function stateFor(subject: SubjectDoc, step: PathStateDoc["step"] = null): PathStateDoc {
  const segments: SegmentDoc[] = [
    { sign: "negative", label: "rate", y_from: 0, y_to: -0.35 },
    { sign: "base", label: "base", y_from: -0.35, y_to: 0.05 },
    { sign: "positive", label: "income", y_from: 0.05, y_to: subject.outcome - 0.01 },
    { sign: "positive", label: "others", y_from: subject.outcome - 0.01, y_to: subject.outcome },
  ];
  const deviations = [...DISPLAYED, ...HIDDEN].map((feature, i) => ({
    feature,
    range_low: 0,
    range_high: 1,
    mean: 0.5,
    current: 0.25 + i * 0.0625,
  }));
  return {
    subject_id: subject.id,
    outcome: subject.outcome,
    values: subject.values,
    base: subject.base,
    phi: Object.fromEntries(DISPLAYED.map((f) => [f, subject.phi[f]])),
    others: subject.others,
    step,
    segments,
    deviations,
  };
}

export function makePath(subjects: SubjectDoc[], ids: string[]): PathDoc {
  const byId = new Map(subjects.map((s) => [s.id, s]));
  return {
    target_outcome: 0.8,
    states: ids.map((id, i) =>
      stateFor(byId.get(id)!, i === 0 ? null : { projection: 0.5, l1_change: 1.25, outcome_gain: 0.15 }),
    ),
  };
}

export function makeCandidate(subject: SubjectDoc, top3: boolean): CandidateDoc {
  const deltas: Record<string, { value: number; phi: number }> = {};
  [...DISPLAYED, ...HIDDEN].forEach((name, i) => {
    deltas[name] = { value: 2.5 + i, phi: 0.0078125 * (i + 1) };
  });
  return {
    subject_id: subject.id,
    projection: 0.40625 + (top3 ? 0.1 : 0),
    l1_change: 1.5,
    outcome_gain: 0.2,
    top3,
    deltas,
  };
}

/** Server stand-in: any not-yet-visited higher-outcome subject is a
 * candidate; the first three are top-3; undo pops the id stack. */
export class FakeApi implements RecourseApi {
  schema = makeSchema();
  subjects = makeSubjects();
  pathIds: string[] = [];
  selectCalls: string[] = [];
  undoCalls = 0;
  failNextSelectWith: { status: number; code: string; message: string } | null = null;
  private gate: Promise<void> | null = null;

  /** Make the next mutating call wait until release() runs. */
  hold(): () => void {
    let release!: () => void;
    this.gate = new Promise((resolve) => {
      release = () => {
        this.gate = null;
        resolve();
      };
    });
    return release;
  }

  private async maybeWait(): Promise<void> {
    if (this.gate) {
      await this.gate;
    }
  }

  private roundTrip(): RoundTripDoc {
    const visited = new Set(this.pathIds);
    const last = this.pathIds[this.pathIds.length - 1];
    const lastOutcome = last
      ? this.subjects.find((s) => s.id === last)!.outcome
      : -Infinity;
    const ranked = this.subjects
      .filter((s) => !visited.has(s.id) && s.outcome > lastOutcome)
      .sort((a, b) => b.outcome - a.outcome);
    return {
      path: makePath(this.subjects, this.pathIds),
      candidates: ranked.map((s, i) => makeCandidate(s, i < 3)),
      total: ranked.length,
    };
  }

  async getSchema(): Promise<SchemaDoc> {
    return this.schema;
  }

  async getSubjects(): Promise<{ subjects: SubjectDoc[] }> {
    return { subjects: this.subjects };
  }

  async createSession(): Promise<string> {
    return "s000001";
  }

  async select(_sessionId: string, subjectId: string): Promise<RoundTripDoc> {
    await this.maybeWait();
    this.selectCalls.push(subjectId);
    if (this.failNextSelectWith) {
      const { ApiError } = await import("../src/api.js");
      const err = this.failNextSelectWith;
      this.failNextSelectWith = null;
      throw new ApiError(err.status, err.code, err.message);
    }
    const doc = this.roundTrip();
    const isCandidate =
      this.pathIds.length === 0 ||
      doc.candidates.some((c) => c.subject_id === subjectId);
    if (!isCandidate) {
      const { ApiError } = await import("../src/api.js");
      throw new ApiError(409, "not_a_candidate", `subject ${subjectId} is not reachable`);
    }
    this.pathIds.push(subjectId);
    return this.roundTrip();
  }

  async undo(): Promise<RoundTripDoc> {
    await this.maybeWait();
    this.undoCalls += 1;
    if (this.pathIds.length === 0) {
      const { ApiError } = await import("../src/api.js");
      throw new ApiError(409, "empty_path", "path has no states");
    }
    this.pathIds.pop();
    return this.roundTrip();
  }

  async getPath(): Promise<PathDoc> {
    return makePath(this.subjects, this.pathIds);
  }

  async getCandidates(): Promise<{ candidates: CandidateDoc[]; total: number }> {
    const doc = this.roundTrip();
    return { candidates: doc.candidates, total: doc.total };
  }
}

export function appElements(): {
  explorer: HTMLElement;
  monitor: HTMLElement;
  compare: HTMLElement;
  notice: HTMLElement;
  undoButton: HTMLButtonElement;
  status: HTMLElement;
} {
  document.body.innerHTML = `
    <span id="status"></span><button id="undo"></button><span id="notice"></span>
    <div id="explorer"></div><div id="compare"></div><div id="monitor"></div>`;
  return {
    explorer: document.getElementById("explorer")!,
    monitor: document.getElementById("monitor")!,
    compare: document.getElementById("compare")!,
    notice: document.getElementById("notice")!,
    undoButton: document.getElementById("undo") as HTMLButtonElement,
    status: document.getElementById("status")!,
  };
}
