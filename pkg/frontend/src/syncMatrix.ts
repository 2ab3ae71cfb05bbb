// Synchronization-matrix grid layout: rows are lines of effort in plan
// declaration order, columns are fixed-width time buckets, and an action
// chip appears in every bucket its [startTick, startTick + durationTicks)
// interval intersects. The contract tests pin this layout against the
// server's own matrix export, so the grid never disagrees with the backend.

import type { PlanPayload } from './types';

export interface MatrixGrid {
  loeNames: string[];
  bucketTicks: number;
  nBuckets: number;
  /** rows[loeIndex][bucketIndex] = action ids, ordered by (startTick, id). */
  rows: string[][][];
}

export function renderSyncMatrix(
  plan: PlanPayload,
  bucketTicks: number,
): MatrixGrid {
  if (bucketTicks < 1) {
    throw new Error('bucketTicks must be >= 1');
  }
  const nBuckets = Math.max(1, Math.ceil(plan.horizonTicks / bucketTicks));
  const loeNames = plan.linesOfEffort.map((l) => l.name);
  const ordered = [...plan.actions].sort((a, b) =>
    a.startTick !== b.startTick
      ? a.startTick - b.startTick
      : a.id < b.id
        ? -1
        : a.id > b.id
          ? 1
          : 0,
  );
  const rows = loeNames.map((loe) =>
    Array.from({ length: nBuckets }, (_, b) => {
      const bucketStart = b * bucketTicks;
      const bucketEnd = (b + 1) * bucketTicks;
      return ordered
        .filter(
          (a) =>
            a.lineOfEffort === loe &&
            a.startTick < bucketEnd &&
            a.startTick + a.durationTicks > bucketStart,
        )
        .map((a) => a.id);
    }),
  );
  return { loeNames, bucketTicks, nBuckets, rows };
}

/** Buckets a single action chip occupies; used for drag/resize feedback. */
export function chipSpan(
  startTick: number,
  durationTicks: number,
  bucketTicks: number,
): { firstBucket: number; lastBucket: number } {
  return {
    firstBucket: Math.floor(startTick / bucketTicks),
    lastBucket: Math.floor((startTick + durationTicks - 1) / bucketTicks),
  };
}
