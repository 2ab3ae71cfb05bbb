import { describe, expect, it } from 'vitest';

import { coaDashboard } from '../src/coaDashboard';
import type { ComparisonRow } from '../src/types';
import comparisonFixture from './fixtures/comparison.json';

const rows = comparisonFixture as unknown as ComparisonRow[];

describe('COA dashboard', () => {
  it('keeps the server ranking order exactly', () => {
    const dash = coaDashboard(rows);
    expect(dash.table.map((r) => r.rank)).toEqual(rows.map((r) => r.rank));
    expect(dash.table.map((r) => [r.planId, r.hypothesis])).toEqual(
      rows.map((r) => [r.planId, r.hypothesis]),
    );
  });

  it('grid cells carry the achieved counts from the ranking', () => {
    const dash = coaDashboard(rows);
    for (const row of rows.filter((r) => !r.failed)) {
      const cell = dash.grid[dash.planIds.indexOf(row.planId)]![
        dash.hypotheses.indexOf(row.hypothesis)
      ]!;
      expect(cell.state).toBe('scored');
      expect(cell.achievedCount).toBe(row.achievedCount);
    }
  });

  it('failed hypothesis cells are marked failed, not scored zero', () => {
    const dash = coaDashboard(rows);
    const failedRow = rows.find((r) => r.failed)!;
    const cell = dash.grid[dash.planIds.indexOf(failedRow.planId)]![
      dash.hypotheses.indexOf(failedRow.hypothesis)
    ]!;
    expect(cell.state).toBe('failed');
    expect(cell.achievedCount).toBeNull();
    expect(cell.failureReason).toBeTruthy();
  });

  it('missing (plan, hypothesis) combinations render as failed cells', () => {
    const dash = coaDashboard(rows);
    // the synthetic failed plan has no row for the second hypothesis
    const failedRow = rows.find((r) => r.failed)!;
    const otherHyp = dash.hypotheses.find((h) => h !== failedRow.hypothesis)!;
    const cell = dash.grid[dash.planIds.indexOf(failedRow.planId)]![
      dash.hypotheses.indexOf(otherHyp)
    ]!;
    expect(cell.state).toBe('failed');
  });

  it('single row yields a single-cell dashboard', () => {
    const dash = coaDashboard([rows[0]!]);
    expect(dash.table).toHaveLength(1);
    expect(dash.grid).toHaveLength(1);
    expect(dash.grid[0]).toHaveLength(1);
  });
});
