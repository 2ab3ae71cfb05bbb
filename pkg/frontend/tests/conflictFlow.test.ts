import { describe, expect, it } from 'vitest';

import { PlanServerClient, type FetchLike } from '../src/api';
import { MatrixViewState } from '../src/matrixView';
import type { PlanPayload } from '../src/types';
import planFixtures from './fixtures/plans.json';

const basePlan = (planFixtures as any[]).find(
  (f) => f.name === 'demo-integrated',
)!.plan as PlanPayload;

/** Scripted server: responds with a fixed sequence of (status, body). */
function scriptedFetch(
  script: { status: number; body: unknown }[],
): { fetch: FetchLike; calls: { url: string; body?: unknown }[] } {
  const calls: { url: string; body?: unknown }[] = [];
  const remaining = [...script];
  const fetch: FetchLike = async (url, init) => {
    calls.push({
      url,
      body: init?.body ? JSON.parse(init.body) : undefined,
    });
    const next = remaining.shift();
    if (!next) throw new Error('scripted server exhausted');
    return { status: next.status, json: async () => next.body };
  };
  return { fetch, calls };
}

function externalEdit(payload: PlanPayload): PlanPayload {
  // Someone else moved a different action while we were editing.
  const [first, ...rest] = payload.actions;
  return {
    ...payload,
    actions: [{ ...first!, intensity: first!.intensity * 2 }, ...rest],
  };
}

describe('409 conflict rebase flow', () => {
  const editedActionId = basePlan.actions[1]!.id;

  it('preserves the pending edit through a conflict and lands it on rebase', async () => {
    const serverPayload = externalEdit(basePlan);
    const { fetch, calls } = scriptedFetch([
      {
        status: 409,
        body: { conflict: true, currentVersion: 4, currentPayload: serverPayload },
      },
      { status: 200, body: { docId: 'p1', version: 5, contentHash: 'h5' } },
    ]);
    const client = new PlanServerClient('http://server', fetch);
    const view = new MatrixViewState('p1', basePlan, 3, 4);

    view.stageEdit({ actionId: editedActionId, patch: { startTick: 8 } });
    expect(view.status).toBe('dirty');

    const first = await view.submit(client);
    expect(first.kind).toBe('conflict');
    expect(view.status).toBe('conflict');
    // the pending edit buffer survives the conflict untouched
    expect(view.edit).toEqual({
      actionId: editedActionId,
      patch: { startTick: 8 },
    });

    view.rebase();
    expect(view.status).toBe('dirty');
    expect(view.planVersion).toBe(4);
    // the rebased working copy contains both the external change and ours
    const rebased = view.effectivePayload();
    expect(rebased.actions[0]!.intensity).toBe(
      serverPayload.actions[0]!.intensity,
    );
    expect(
      rebased.actions.find((a) => a.id === editedActionId)!.startTick,
    ).toBe(8);

    const second = await view.submit(client);
    expect(second.kind).toBe('accepted');
    expect(view.status).toBe('clean');
    expect(view.planVersion).toBe(5);

    // both requests carried the edit; the second against the new version
    expect((calls[0]!.body as any).expectedVersion).toBe(3);
    expect((calls[1]!.body as any).expectedVersion).toBe(4);
    const sent = (calls[1]!.body as any).payload as PlanPayload;
    expect(sent.actions.find((a) => a.id === editedActionId)!.startTick).toBe(8);
  });

  it('clean edit on a fresh snapshot is accepted and bumps the version', async () => {
    const { fetch } = scriptedFetch([
      { status: 200, body: { docId: 'p1', version: 2, contentHash: 'h2' } },
    ]);
    const view = new MatrixViewState('p1', basePlan, 1);
    view.stageEdit({ actionId: editedActionId, patch: { durationTicks: 6 } });
    const outcome = await view.submit(new PlanServerClient('http://s', fetch));
    expect(outcome.kind).toBe('accepted');
    expect(view.planVersion).toBe(2);
    expect(view.edit).toBeNull();
  });

  it('validation findings keep the edit and the version', async () => {
    const { fetch } = scriptedFetch([
      {
        status: 422,
        body: {
          findings: [
            {
              level: 'error',
              code: 'resource-overdraft',
              message: 'pool cash overdrawn',
            },
          ],
        },
      },
    ]);
    const view = new MatrixViewState('p1', basePlan, 7);
    view.stageEdit({ actionId: editedActionId, patch: { durationTicks: 999 } });
    const outcome = await view.submit(new PlanServerClient('http://s', fetch));
    expect(outcome.kind).toBe('invalid');
    expect(view.status).toBe('invalid');
    expect(view.planVersion).toBe(7);
    expect(view.edit).not.toBeNull();
    expect(view.validationFindings[0]!.code).toBe('resource-overdraft');
  });

  it('discard after conflict adopts the server snapshot and drops the edit', async () => {
    const serverPayload = externalEdit(basePlan);
    const { fetch } = scriptedFetch([
      {
        status: 409,
        body: { conflict: true, currentVersion: 9, currentPayload: serverPayload },
      },
    ]);
    const view = new MatrixViewState('p1', basePlan, 2);
    view.stageEdit({ actionId: editedActionId, patch: { startTick: 30 } });
    await view.submit(new PlanServerClient('http://s', fetch));
    view.discardEdit();
    expect(view.status).toBe('clean');
    expect(view.planVersion).toBe(9);
    expect(
      view.effectivePayload().actions.find((a) => a.id === editedActionId)!
        .startTick,
    ).toBe(basePlan.actions[1]!.startTick);
  });

  it('staging an edit for an unknown action throws', () => {
    const view = new MatrixViewState('p1', basePlan, 1);
    expect(() =>
      view.stageEdit({ actionId: 'ghost', patch: { startTick: 1 } }),
    ).toThrow();
  });
});
