// Thin typed client for the planning service. All domain numbers shown in
// the UI come back from these calls; the client does no computation.

import type {
  DocumentResponse,
  Finding,
  PlanPayload,
  RunResultPayload,
  RunStatus,
} from './types';

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<any> }>;

export type UpdatePlanOutcome =
  | { kind: 'accepted'; version: number; contentHash: string }
  | { kind: 'conflict'; currentVersion: number; currentPayload: PlanPayload }
  | { kind: 'invalid'; findings: Finding[] };

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class PlanServerClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) =>
      fetch(url, init) as any,
  ) {}

  private async request(path: string, init?: Parameters<FetchLike>[1]) {
    return this.fetchImpl(`${this.baseUrl}${path}`, init);
  }

  async getDocument(docId: string): Promise<DocumentResponse> {
    const res = await this.request(`/documents/${docId}`);
    if (res.status !== 200) {
      throw new ApiError(`cannot fetch document ${docId}`, res.status);
    }
    return res.json();
  }

  async updatePlan(
    docId: string,
    expectedVersion: number,
    payload: PlanPayload,
  ): Promise<UpdatePlanOutcome> {
    const res = await this.request(`/plans/${docId}`, {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ expectedVersion, payload }),
    });
    if (res.status === 200) {
      const body = await res.json();
      return {
        kind: 'accepted',
        version: body.version,
        contentHash: body.contentHash,
      };
    }
    if (res.status === 409) {
      const body = await res.json();
      return {
        kind: 'conflict',
        currentVersion: body.currentVersion,
        currentPayload: body.currentPayload,
      };
    }
    if (res.status === 422) {
      const body = await res.json();
      return { kind: 'invalid', findings: body.findings };
    }
    throw new ApiError(`plan update failed for ${docId}`, res.status);
  }

  async startRun(req: {
    scenarioId: string;
    planId: string;
    horizonTicks: number;
    hypothesis?: string;
    seed?: number;
    noiseEnabled?: boolean;
  }): Promise<RunStatus> {
    const res = await this.request('/runs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    });
    if (res.status !== 202) {
      throw new ApiError('cannot start run', res.status);
    }
    return res.json();
  }

  async getRun(runId: string): Promise<RunStatus> {
    const res = await this.request(`/runs/${runId}`);
    if (res.status !== 200) {
      throw new ApiError(`cannot fetch run ${runId}`, res.status);
    }
    return res.json();
  }

  /** Poll until the run leaves the pending state. */
  async waitForRun(
    runId: string,
    intervalMs = 250,
    timeoutMs = 60_000,
  ): Promise<RunStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.getRun(runId);
      if (status.status !== 'pending') return status;
      if (Date.now() > deadline) {
        throw new ApiError(`run ${runId} still pending`, 0);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  async getRunResult(runId: string): Promise<RunResultPayload> {
    const status = await this.getRun(runId);
    if (status.status !== 'done' || !status.resultDocId) {
      throw new ApiError(`run ${runId} is ${status.status}`, 409);
    }
    const doc = await this.getDocument(status.resultDocId);
    return doc.payload as unknown as RunResultPayload;
  }
}
