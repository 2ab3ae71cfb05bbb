// View state for the synchronization-matrix editor.
//
// Edits apply only through versioned server updates. A stale snapshot
// surfaces as a conflict: the pending edit buffer is preserved until the
// planner rebases it onto the latest server payload or discards it —
// a conflict never silently drops an edit.

import type { PlanServerClient, UpdatePlanOutcome } from './api';
import { renderSyncMatrix, type MatrixGrid } from './syncMatrix';
import type { ActionPayload, Finding, PlanPayload } from './types';

export interface ActionEdit {
  actionId: string;
  patch: Partial<
    Pick<ActionPayload, 'startTick' | 'durationTicks' | 'intensity'>
  >;
}

export type EditStatus = 'clean' | 'dirty' | 'conflict' | 'invalid';

function applyEdit(payload: PlanPayload, edit: ActionEdit): PlanPayload {
  const actions = payload.actions.map((a) =>
    a.id === edit.actionId ? { ...a, ...edit.patch } : a,
  );
  if (!actions.some((a) => a.id === edit.actionId)) {
    throw new Error(`unknown action ${edit.actionId}`);
  }
  return { ...payload, actions };
}

export class MatrixViewState {
  private snapshot: PlanPayload;
  private version: number;
  private pendingEdit: ActionEdit | null = null;
  private findings: Finding[] = [];
  bucketTicks: number;
  selectedActionId: string | null = null;

  constructor(
    readonly docId: string,
    snapshot: PlanPayload,
    version: number,
    bucketTicks = 4,
  ) {
    this.snapshot = snapshot;
    this.version = version;
    this.bucketTicks = bucketTicks;
  }

  get planVersion(): number {
    return this.version;
  }

  get status(): EditStatus {
    if (this.findings.length > 0) return 'invalid';
    if (this.pendingEdit === null) return 'clean';
    return this.conflictSeen ? 'conflict' : 'dirty';
  }

  private conflictSeen = false;

  get edit(): ActionEdit | null {
    return this.pendingEdit;
  }

  get validationFindings(): Finding[] {
    return this.findings;
  }

  /** Grid of the snapshot plus the pending edit, as the planner sees it. */
  grid(): MatrixGrid {
    return renderSyncMatrix(this.effectivePayload(), this.bucketTicks);
  }

  effectivePayload(): PlanPayload {
    return this.pendingEdit
      ? applyEdit(this.snapshot, this.pendingEdit)
      : this.snapshot;
  }

  select(actionId: string | null): void {
    this.selectedActionId = actionId;
  }

  stageEdit(edit: ActionEdit): void {
    applyEdit(this.snapshot, edit); // throws on unknown action
    this.pendingEdit = edit;
    this.findings = [];
  }

  /** Push the staged edit; returns the server outcome. */
  async submit(client: PlanServerClient): Promise<UpdatePlanOutcome> {
    if (!this.pendingEdit) {
      throw new Error('nothing staged');
    }
    const outcome = await client.updatePlan(
      this.docId,
      this.version,
      this.effectivePayload(),
    );
    if (outcome.kind === 'accepted') {
      this.snapshot = this.effectivePayload();
      this.version = outcome.version;
      this.pendingEdit = null;
      this.conflictSeen = false;
      this.findings = [];
    } else if (outcome.kind === 'conflict') {
      // Keep the edit; remember the latest server state for rebasing.
      this.latestServerPayload = outcome.currentPayload;
      this.latestServerVersion = outcome.currentVersion;
      this.conflictSeen = true;
    } else {
      this.findings = outcome.findings;
    }
    return outcome;
  }

  private latestServerPayload: PlanPayload | null = null;
  private latestServerVersion: number | null = null;

  /** Re-apply the preserved edit on top of the latest server snapshot. */
  rebase(): void {
    if (
      !this.conflictSeen ||
      this.latestServerPayload === null ||
      this.latestServerVersion === null
    ) {
      throw new Error('no conflict to rebase');
    }
    this.snapshot = this.latestServerPayload;
    this.version = this.latestServerVersion;
    this.latestServerPayload = null;
    this.latestServerVersion = null;
    this.conflictSeen = false;
    // pendingEdit stays staged against the new snapshot
  }

  discardEdit(): void {
    if (this.conflictSeen && this.latestServerPayload !== null) {
      this.snapshot = this.latestServerPayload;
      this.version = this.latestServerVersion ?? this.version;
    }
    this.pendingEdit = null;
    this.conflictSeen = false;
    this.latestServerPayload = null;
    this.latestServerVersion = null;
    this.findings = [];
  }
}
