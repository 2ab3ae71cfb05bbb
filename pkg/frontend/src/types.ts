// Wire types mirroring the planning service JSON schemas.

export interface ActionPayload {
  id: string;
  name: string;
  instrument: string;
  lineOfEffort: string;
  targetInstance: string;
  targetPort: string;
  startTick: number;
  durationTicks: number;
  intensity: number;
  poolId: string;
  ratePerTick: number;
  dependencies: string[];
}

export interface PlanPayload {
  schemaVersion: number;
  id: string;
  version: number;
  horizonTicks: number;
  linesOfEffort: { name: string; description?: string }[];
  pools: { poolId: string; agency: string; budget: number; kind: string }[];
  actions: ActionPayload[];
}

export interface DocumentResponse {
  docId: string;
  kind: string;
  version: number;
  contentHash: string;
  payload: Record<string, unknown>;
  history: { version: number; contentHash: string }[];
}

export interface Finding {
  level: string;
  code: string;
  message: string;
}

export interface SeriesPayload {
  instance: string;
  var: string;
  polarity: string;
  values: number[];
}

export interface NationalSeriesPayload {
  var: string;
  polarity: string;
  values: number[];
}

export interface TrajectoryPayload {
  series: SeriesPayload[];
  national: NationalSeriesPayload[];
}

export interface EffectPayload {
  instance: string;
  var: string;
  window: [number, number];
  meanDelta: number;
  favorable: boolean;
}

export interface RunResultPayload {
  schemaVersion: number;
  config: {
    horizonTicks: number;
    seed: number;
    noiseEnabled: boolean;
    theta: number;
    persistence: number;
  };
  provenance: { scenarioHash: string; planHash: string; hypothesis: string };
  baseline: TrajectoryPayload;
  plan: TrajectoryPayload;
  effects: EffectPayload[];
}

export interface RunStatus {
  runId: string;
  status: 'pending' | 'done' | 'failed';
  resultDocId: string | null;
  reason: string | null;
}

export interface ComparisonRow {
  rank: number;
  planId: string;
  hypothesis: string;
  achievedCount: number;
  achievedIds: string[];
  unfavorableEffects: number;
  totalSpend: number;
  failed?: boolean;
  failureReason?: string;
}
