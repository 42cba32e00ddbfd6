/** Display windowing and rating-widget validation helpers. */

export interface WindowLevel {
  window: number;
  level: number;
}

/**
 * Named window/level presets. The study's raters historically used whatever
 * viewer they liked, so the defaults here are conventional CT windows plus
 * a full-range setting for normalized volumes; the server's per-case
 * default remains available as "auto".
 */
export const WINDOW_PRESETS: Record<string, WindowLevel> = {
  'ct-soft-tissue': { window: 400, level: 40 },
  'ct-lung': { window: 1500, level: -600 },
  'ct-bone': { window: 1800, level: 400 },
  'mri-wide': { window: 2, level: 0 },
};

/** Preset names that make sense for a given intensity kind. */
export function presetsFor(intensityKind: string): string[] {
  if (intensityKind === 'HU') return ['ct-soft-tissue', 'ct-lung', 'ct-bone'];
  if (intensityKind === 'normalized') return ['mri-wide'];
  return [];
}

/** Submission is allowed only for whole-number scores 1..10. */
export function isValidScore(score: number): boolean {
  return Number.isInteger(score) && score >= 1 && score <= 10;
}

/**
 * Mouse-drag windowing: horizontal motion widens the window, vertical
 * motion raises the level. `scale` converts pixels to intensity units.
 * The window never collapses to zero or flips sign.
 */
export function dragWindowLevel(
  start: WindowLevel,
  dx: number,
  dy: number,
  scale: number,
): WindowLevel {
  return {
    window: Math.max(1e-6, start.window + dx * scale),
    level: start.level - dy * scale,
  };
}

export function clampIndex(index: number, size: number): number {
  if (!Number.isFinite(index) || size <= 0) return 0;
  return Math.min(size - 1, Math.max(0, Math.round(index)));
}
