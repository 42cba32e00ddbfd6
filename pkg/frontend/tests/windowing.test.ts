import { describe, expect, it } from 'vitest';

import {
  WINDOW_PRESETS,
  clampIndex,
  dragWindowLevel,
  isValidScore,
  presetsFor,
} from '../src/windowing.js';

describe('isValidScore', () => {
  it('accepts every integer 1..10', () => {
    for (let s = 1; s <= 10; s++) expect(isValidScore(s)).toBe(true);
  });

  it('rejects everything outside the widget range', () => {
    for (const s of [0, 11, -3, 5.5, Number.NaN, Number.POSITIVE_INFINITY]) {
      expect(isValidScore(s)).toBe(false);
    }
  });
});

describe('window presets', () => {
  it('offers CT windows for HU and the wide window for normalized', () => {
    expect(presetsFor('HU')).toEqual(['ct-soft-tissue', 'ct-lung', 'ct-bone']);
    expect(presetsFor('normalized')).toEqual(['mri-wide']);
    expect(presetsFor('arbitrary')).toEqual([]);
  });

  it('pins the CT soft-tissue default to 400/40', () => {
    expect(WINDOW_PRESETS['ct-soft-tissue']).toEqual({ window: 400, level: 40 });
    expect(WINDOW_PRESETS['mri-wide']).toEqual({ window: 2, level: 0 });
  });
});

describe('dragWindowLevel', () => {
  it('widens with +dx and raises level with -dy', () => {
    const out = dragWindowLevel({ window: 400, level: 40 }, 10, -20, 2);
    expect(out.window).toBe(420);
    expect(out.level).toBe(80);
  });

  it('never lets the window reach zero', () => {
    const out = dragWindowLevel({ window: 10, level: 0 }, -10_000, 0, 1);
    expect(out.window).toBeGreaterThan(0);
  });
});

describe('clampIndex', () => {
  it('clamps into [0, size)', () => {
    expect(clampIndex(-5, 10)).toBe(0);
    expect(clampIndex(3, 10)).toBe(3);
    expect(clampIndex(99, 10)).toBe(9);
    expect(clampIndex(4.6, 10)).toBe(5);
  });

  it('falls back to 0 on junk', () => {
    expect(clampIndex(Number.NaN, 10)).toBe(0);
    expect(clampIndex(3, 0)).toBe(0);
  });
});
