import { describe, expect, it } from 'vitest';

import { RunViewState } from '../src/runView';
import type { RunResultPayload } from '../src/types';
import runFixtures from './fixtures/runs.json';

interface RunFixture {
  name: string;
  result: RunResultPayload;
}

const fixtures = runFixtures as unknown as RunFixture[];

describe('run inspection view', () => {
  it('covers five recorded runs', () => {
    expect(fixtures).toHaveLength(5);
  });

  for (const fixture of fixtures) {
    it(`shades exactly the recorded effect windows for ${fixture.name}`, () => {
      const view = new RunViewState(fixture.result);
      const shaded = view
        .variables()
        .flatMap((v) =>
          view
            .effectBands(v.instance, v.var)
            .map((band) => [v.instance, v.var, band.t1, band.t2]),
        );
      const expected = fixture.result.effects.map((e) => [
        e.instance,
        e.var,
        e.window[0],
        e.window[1],
      ]);
      expect(shaded.sort()).toEqual(expected.sort());
    });

    it(`series lengths match the run horizon for ${fixture.name}`, () => {
      const view = new RunViewState(fixture.result);
      for (const v of view.variables()) {
        for (const series of view.chart(v.instance, v.var)) {
          expect(series.values).toHaveLength(view.horizonTicks + 1);
        }
      }
    });
  }

  it('empty-plan run: curves coincide and nothing is shaded', () => {
    const fixture = fixtures.find((f) => f.name === 'empty-h0')!;
    const view = new RunViewState(fixture.result);
    expect(fixture.result.effects).toHaveLength(0);
    view.overlay = 'delta';
    for (const v of view.variables()) {
      const [delta] = view.chart(v.instance, v.var);
      expect(delta!.values.every((x) => x === 0)).toBe(true);
      expect(view.effectBands(v.instance, v.var)).toHaveLength(0);
    }
  });

  it('plan overlay returns baseline and plan; baseline overlay only one', () => {
    const view = new RunViewState(fixtures[0]!.result);
    const v = view.variables()[0]!;
    view.overlay = 'plan';
    expect(view.chart(v.instance, v.var).map((s) => s.label)).toEqual([
      'baseline',
      'plan',
    ]);
    view.overlay = 'baseline';
    expect(view.chart(v.instance, v.var)).toHaveLength(1);
  });

  it('unknown variable is an error, not an empty chart', () => {
    const view = new RunViewState(fixtures[0]!.result);
    expect(() => view.chart('nope', 'nothing')).toThrow();
  });
});
