// View state for run inspection: baseline-vs-plan charts with the run's
// detected effect windows rendered as shaded bands. Every series and band
// comes straight from a run-result document; nothing is recomputed here.

import type {
  EffectPayload,
  RunResultPayload,
  TrajectoryPayload,
} from './types';

export type OverlayMode = 'baseline' | 'plan' | 'delta';

export interface ChartSeries {
  label: string;
  values: number[];
}

export interface EffectBand {
  /** Half-open tick window [t1, t2). */
  t1: number;
  t2: number;
  favorable: boolean;
  meanDelta: number;
}

function findSeries(
  traj: TrajectoryPayload,
  instance: string,
  varName: string,
): number[] {
  if (instance === 'national') {
    const hit = traj.national.find((s) => s.var === varName);
    if (!hit) throw new Error(`no national series ${varName}`);
    return hit.values;
  }
  const hit = traj.series.find(
    (s) => s.instance === instance && s.var === varName,
  );
  if (!hit) throw new Error(`no series ${instance}/${varName}`);
  return hit.values;
}

export class RunViewState {
  overlay: OverlayMode = 'plan';

  constructor(readonly result: RunResultPayload) {}

  get horizonTicks(): number {
    return this.result.config.horizonTicks;
  }

  variables(): { instance: string; var: string }[] {
    return [
      ...this.result.baseline.series.map((s) => ({
        instance: s.instance,
        var: s.var,
      })),
      ...this.result.baseline.national.map((s) => ({
        instance: 'national',
        var: s.var,
      })),
    ];
  }

  chart(instance: string, varName: string): ChartSeries[] {
    const base = findSeries(this.result.baseline, instance, varName);
    const plan = findSeries(this.result.plan, instance, varName);
    if (
      base.length !== this.horizonTicks + 1 ||
      plan.length !== this.horizonTicks + 1
    ) {
      throw new Error('series length does not match run horizon');
    }
    switch (this.overlay) {
      case 'baseline':
        return [{ label: 'baseline', values: base }];
      case 'plan':
        return [
          { label: 'baseline', values: base },
          { label: 'plan', values: plan },
        ];
      case 'delta':
        return [
          { label: 'delta', values: plan.map((v, i) => v - (base[i] ?? 0)) },
        ];
    }
  }

  /** Shaded bands for one variable: exactly the run's effect records. */
  effectBands(instance: string, varName: string): EffectBand[] {
    return this.result.effects
      .filter((e) => e.instance === instance && e.var === varName)
      .map((e: EffectPayload) => ({
        t1: e.window[0],
        t2: e.window[1],
        favorable: e.favorable,
        meanDelta: e.meanDelta,
      }));
  }
}
