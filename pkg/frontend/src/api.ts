/** Typed client for the recourse session API. All numbers are served
 * values and must reach the views untouched. */

export interface FeatureInfo {
  name: string;
  min: number;
  max: number;
  mean: number;
  mutable: boolean;
  display_rank: number | null;
}

export interface SchemaDoc {
  features: FeatureInfo[];
  displayed: string[];
}

export interface SubjectDoc {
  id: string;
  values: Record<string, number>;
  outcome: number;
  base: number;
  phi: Record<string, number>;
  others: number;
}

export interface SegmentDoc {
  sign: "negative" | "base" | "positive";
  label: string;
  y_from: number;
  y_to: number;
}

export interface DeviationDoc {
  feature: string;
  range_low: number;
  range_high: number;
  mean: number;
  current: number;
}

export interface StepDoc {
  projection: number;
  l1_change: number;
  outcome_gain: number;
}

export interface PathStateDoc {
  subject_id: string;
  outcome: number;
  values: Record<string, number>;
  base: number;
  phi: Record<string, number>;
  others: number;
  step: StepDoc | null;
  segments: SegmentDoc[];
  deviations: DeviationDoc[];
}

export interface PathDoc {
  target_outcome: number;
  states: PathStateDoc[];
}

export interface CandidateDelta {
  value: number;
  phi: number;
}

export interface CandidateDoc {
  subject_id: string;
  projection: number;
  l1_change: number;
  outcome_gain: number;
  top3: boolean;
  deltas: Record<string, CandidateDelta>;
}

export interface RoundTripDoc {
  path: PathDoc;
  candidates: CandidateDoc[];
  total: number;
}

export interface ConstraintsBody {
  immutable_features?: string[];
  immutable_tolerance?: number;
  require_improvement?: boolean;
  max_l1_radius?: number | null;
  exclude_visited?: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Surface the app depends on; ApiClient is the HTTP implementation and
 * tests substitute an in-memory one. */
export interface RecourseApi {
  getSchema(): Promise<SchemaDoc>;
  getSubjects(): Promise<{ subjects: SubjectDoc[] }>;
  createSession(constraints?: ConstraintsBody): Promise<string>;
  select(sessionId: string, subjectId: string): Promise<RoundTripDoc>;
  undo(sessionId: string): Promise<RoundTripDoc>;
  getPath(sessionId: string): Promise<PathDoc>;
  getCandidates(sessionId: string): Promise<{ candidates: CandidateDoc[]; total: number }>;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.code ?? "error", body.message ?? "request failed");
  }
  return body as T;
}

export class ApiClient implements RecourseApi {
  constructor(private base: string = "") {}

  getSchema(): Promise<SchemaDoc> {
    return request(`${this.base}/api/schema`);
  }

  getSubjects(): Promise<{ subjects: SubjectDoc[] }> {
    return request(`${this.base}/api/subjects`);
  }

  async createSession(constraints: ConstraintsBody = {}): Promise<string> {
    const doc = await request<{ session_id: string }>(`${this.base}/api/session`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(constraints),
    });
    return doc.session_id;
  }

  select(sessionId: string, subjectId: string): Promise<RoundTripDoc> {
    return request(`${this.base}/api/session/${sessionId}/select`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ subject_id: subjectId }),
    });
  }

  undo(sessionId: string): Promise<RoundTripDoc> {
    return request(`${this.base}/api/session/${sessionId}/undo`, { method: "POST" });
  }

  getPath(sessionId: string): Promise<PathDoc> {
    return request(`${this.base}/api/session/${sessionId}/path`);
  }

  getCandidates(sessionId: string): Promise<{ candidates: CandidateDoc[]; total: number }> {
    return request(`${this.base}/api/session/${sessionId}/candidates`);
  }
}
