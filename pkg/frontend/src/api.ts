/**
 * Typed client for the rating-session HTTP API.
 *
 * The response interfaces mirror the server payloads field for field.
 * None of them has a truth label or cohort counts; the server never sends
 * those to a rater, and keeping the types closed makes an accidental
 * leak a compile error on this side too.
 */

export type Presentation = 'slice' | 'volume';

export interface Progress {
  done: number;
  total: number;
}

export interface CaseView {
  case_id: string;
  presentation: Presentation;
  slice_axis: number;
  slice_index: number;
  window: number;
  level: number;
  slice_url: string;
  meta_url: string;
  volume_url: string | null;
}

export interface NextCase {
  done: boolean;
  case: CaseView | null;
  progress: Progress;
}

export interface CaseMeta {
  case_id: string;
  presentation: Presentation;
  dims: [number, number, number];
  spacing: [number, number, number];
  intensity_kind: string;
  default_window: number;
  default_level: number;
  slice_axis: number;
}

export interface RatingAck {
  ok: boolean;
  rater_id: string;
  case_id: string;
  score: number;
}

export interface SliceQuery {
  axis?: number;
  index?: number;
  window?: number;
  level?: number;
}

/** Non-2xx response, with the server's detail message when it sent one. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export class VttApi {
  constructor(
    /** Origin prefix, '' when the page is served by the engine itself. */
    readonly baseUrl: string,
    readonly sessionId: string,
  ) {}

  private get root(): string {
    return `${this.baseUrl}/session/${encodeURIComponent(this.sessionId)}`;
  }

  /** URL of one rendered slice; omitted params fall back to server defaults. */
  sliceUrl(caseId: string, query: SliceQuery = {}): string {
    const params = new URLSearchParams();
    if (query.axis !== undefined) params.set('axis', String(query.axis));
    if (query.index !== undefined) params.set('index', String(query.index));
    if (query.window !== undefined) params.set('window', String(query.window));
    if (query.level !== undefined) params.set('level', String(query.level));
    const qs = params.toString();
    return `${this.root}/case/${encodeURIComponent(caseId)}/slice.png${qs ? `?${qs}` : ''}`;
  }

  /** Absolute URL for a server-relative path such as CaseView.volume_url. */
  resolve(serverPath: string): string {
    return `${this.baseUrl}${serverPath}`;
  }

  async next(raterId: string): Promise<NextCase> {
    return this.getJson(`${this.root}/next?rater=${encodeURIComponent(raterId)}`);
  }

  async meta(caseId: string): Promise<CaseMeta> {
    return this.getJson(`${this.root}/case/${encodeURIComponent(caseId)}/meta`);
  }

  async submit(raterId: string, caseId: string, score: number): Promise<RatingAck> {
    try {
      return await this.postRating(raterId, caseId, score);
    } catch (err) {
      if (err instanceof ApiError) throw err;
      // network hiccup: the journal keys ratings by (rater, case), so a
      // duplicate delivery replaces rather than double-counts
      return await this.postRating(raterId, caseId, score);
    }
  }

  private async postRating(raterId: string, caseId: string, score: number): Promise<RatingAck> {
    const res = await fetch(`${this.root}/rating`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ rater_id: raterId, case_id: caseId, score }),
    });
    if (!res.ok) throw new ApiError(res.status, await describeFailure(res));
    return (await res.json()) as RatingAck;
  }

  private async getJson<T>(url: string): Promise<T> {
    const res = await fetch(url);
    if (!res.ok) throw new ApiError(res.status, await describeFailure(res));
    return (await res.json()) as T;
  }
}

async function describeFailure(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === 'string') return body.detail;
  } catch {
    // non-JSON error body, fall through to the status line
  }
  return `request failed with status ${res.status}`;
}
