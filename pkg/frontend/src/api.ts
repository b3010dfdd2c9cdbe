import type {
  ApiErrorBody,
  MatchDetail,
  MatrixKind,
  MatrixPayload,
  PRCurvePayload,
  ReselectResponse,
  SelectionState,
  SessionInfo,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the service HTTP API. At most one reselect is in
 * flight: issuing a new one aborts the superseded request. */
export class ApiClient {
  private reselectController: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async decode<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await resp.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; fall through to a generic error
      }
      throw new ApiError(resp.status, body?.error ?? "http_error", body?.detail ?? resp.statusText);
    }
    return (await resp.json()) as T;
  }

  async session(): Promise<SessionInfo> {
    return this.decode(await this.fetchFn(`${this.baseUrl}/api/session`));
  }

  async matrix(kind: MatrixKind, downsample = 1, method?: string): Promise<MatrixPayload> {
    const params = new URLSearchParams({ kind, downsample: String(downsample) });
    if (method) params.set("method", method);
    return this.decode(await this.fetchFn(`${this.baseUrl}/api/matrix?${params}`));
  }

  async reselect(selection: Partial<SelectionState>): Promise<ReselectResponse> {
    this.reselectController?.abort();
    const controller = new AbortController();
    this.reselectController = controller;
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/api/reselect`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(selection),
        signal: controller.signal,
      });
      return await this.decode<ReselectResponse>(resp);
    } finally {
      if (this.reselectController === controller) this.reselectController = null;
    }
  }

  async prCurve(method: string): Promise<PRCurvePayload> {
    const params = new URLSearchParams({ method });
    return this.decode(await this.fetchFn(`${this.baseUrl}/api/pr-curve?${params}`));
  }

  async matchDetail(query: number, context = 2): Promise<MatchDetail> {
    return this.decode(
      await this.fetchFn(`${this.baseUrl}/api/match/${query}?context=${context}`),
    );
  }

  imageUrl(traverse: "reference" | "query", index: number): string {
    return `${this.baseUrl}/api/image?traverse=${traverse}&index=${index}`;
  }
}
