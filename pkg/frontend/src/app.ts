import { ApiError, type CaseMeta, type CaseView, type VttApi } from './api.js';
import {
  WINDOW_PRESETS,
  clampIndex,
  dragWindowLevel,
  isValidScore,
  presetsFor,
  type WindowLevel,
} from './windowing.js';

export interface AppOptions {
  api: VttApi;
  raterId: string;
  /** Queried for the control elements; defaults to document. */
  root?: Document | HTMLElement;
  /** Called before replacing an already-submitted rating. */
  confirmReplace?: (caseId: string) => boolean;
}

const AXIS_NAMES = ['x', 'y', 'z'] as const;

/**
 * Drives the rating page: fetches the rater's next case, shows the slice
 * with window/level and (for volume cases) axis/index scrolling, accepts
 * one 1..10 score per case and advances until the seeded order runs out.
 *
 * All network work funnels through a single promise chain so the page
 * never races two submissions; tests wait on whenIdle().
 */
export class RaterApp {
  private readonly api: VttApi;
  private readonly raterId: string;
  private readonly confirmReplace: (caseId: string) => boolean;

  private current: CaseView | null = null;
  private meta: CaseMeta | null = null;
  private axis = 2;
  private index = 0;
  private wl: WindowLevel = { window: 1, level: 0 };
  private score: number | null = null;
  private readonly rated = new Set<string>();
  private chain: Promise<void> = Promise.resolve();

  private readonly panel: HTMLElement;
  private readonly joinForm: HTMLElement | null;
  private readonly caseLabel: HTMLElement;
  private readonly progressEl: HTMLElement;
  private readonly image: HTMLImageElement;
  private readonly caption: HTMLElement;
  private readonly axisButtons: HTMLButtonElement[] = [];
  private readonly indexSlider: HTMLInputElement;
  private readonly indexLabel: HTMLElement;
  private readonly windowInput: HTMLInputElement;
  private readonly levelInput: HTMLInputElement;
  private readonly presetSelect: HTMLSelectElement;
  private readonly volumeLink: HTMLAnchorElement;
  private readonly scoreButtons: HTMLButtonElement[] = [];
  private readonly submitButton: HTMLButtonElement;
  private readonly statusEl: HTMLElement;
  private readonly doneBanner: HTMLElement;
  private readonly doneText: HTMLElement;

  constructor(options: AppOptions) {
    this.api = options.api;
    this.raterId = options.raterId;
    this.confirmReplace =
      options.confirmReplace ?? ((caseId) => window.confirm(`Replace your rating for ${caseId}?`));

    const scope: ParentNode = options.root ?? document;
    const get = <T extends HTMLElement>(id: string): T => {
      const el = scope.querySelector(`#${id}`);
      if (!el) throw new Error(`missing page element #${id}`);
      return el as T;
    };

    this.panel = get('rating-panel');
    this.joinForm = scope.querySelector('#join');
    this.caseLabel = get('case-label');
    this.progressEl = get('progress');
    this.image = get<HTMLImageElement>('slice-image');
    this.caption = get('slice-caption');
    this.indexSlider = get<HTMLInputElement>('index-slider');
    this.indexLabel = get('index-label');
    this.windowInput = get<HTMLInputElement>('window-input');
    this.levelInput = get<HTMLInputElement>('level-input');
    this.presetSelect = get<HTMLSelectElement>('preset-select');
    this.volumeLink = get<HTMLAnchorElement>('volume-link');
    this.submitButton = get<HTMLButtonElement>('submit-button');
    this.statusEl = get('status');
    this.doneBanner = get('done-banner');
    this.doneText = get('done-text');

    this.buildAxisButtons(get('axis-buttons'));
    this.buildScoreButtons(get('score-buttons'));
    this.bindViewerControls();
    this.submitButton.addEventListener('click', () => this.kick(() => this.submitSelected()));
  }

  /** Loads the first case. */
  start(): Promise<void> {
    if (this.joinForm) this.joinForm.hidden = true;
    this.kick(() => this.loadNext());
    return this.whenIdle();
  }

  /** Resolves once every queued fetch/submit has settled. */
  whenIdle(): Promise<void> {
    return this.chain;
  }

  get currentCaseId(): string | null {
    return this.current?.case_id ?? null;
  }

  private kick(task: () => Promise<void>): void {
    this.chain = this.chain.then(task).catch((err) => this.showError(err));
  }

  private showError(err: unknown): void {
    const msg = err instanceof ApiError ? `${err.message} (HTTP ${err.status})` : String(err);
    this.statusEl.textContent = `error: ${msg}`;
  }

  // ----------------------------------------------------------------
  // case flow
  // ----------------------------------------------------------------

  private async loadNext(): Promise<void> {
    const next = await this.api.next(this.raterId);
    this.progressEl.textContent = `${next.progress.done} / ${next.progress.total}`;
    if (next.done || next.case === null) {
      this.lock(next.progress.total);
      return;
    }
    this.current = next.case;
    this.meta = await this.api.meta(next.case.case_id);
    this.axis = next.case.slice_axis;
    this.index = next.case.slice_index;
    this.wl = { window: next.case.window, level: next.case.level };
    this.score = null;

    this.panel.hidden = false;
    this.doneBanner.hidden = true;
    this.caseLabel.textContent = next.case.case_id;
    this.caseLabel.dataset.caseId = next.case.case_id;
    this.statusEl.textContent =
      next.case.presentation === 'volume'
        ? 'scroll the volume, then rate it'
        : 'rate the slice shown';

    const isVolume = next.case.presentation === 'volume';
    for (const b of this.axisButtons) b.disabled = !isVolume;
    this.indexSlider.disabled = !isVolume;
    this.volumeLink.hidden = next.case.volume_url === null;
    if (next.case.volume_url !== null) {
      this.volumeLink.href = this.api.resolve(next.case.volume_url);
    }

    this.populatePresets(this.meta);
    this.syncWindowInputs();
    this.refreshScoreButtons();
    this.submitButton.disabled = true;
    this.refreshImage();
  }

  private async submitSelected(): Promise<void> {
    const view = this.current;
    if (view === null || this.score === null || !isValidScore(this.score)) return;
    if (this.rated.has(view.case_id) && !this.confirmReplace(view.case_id)) return;
    const ack = await this.api.submit(this.raterId, view.case_id, this.score);
    this.rated.add(ack.case_id);
    this.statusEl.textContent = `saved score ${ack.score} for ${ack.case_id}`;
    await this.loadNext();
  }

  private lock(total: number): void {
    this.current = null;
    this.meta = null;
    this.panel.hidden = true;
    this.doneBanner.hidden = false;
    this.doneText.textContent = `All ${total} cases rated. Thank you; you can close this page.`;
    this.submitButton.disabled = true;
  }

  // ----------------------------------------------------------------
  // viewer state
  // ----------------------------------------------------------------

  private dimAlong(axis: number): number {
    return this.meta?.dims[axis as 0 | 1 | 2] ?? 1;
  }

  private refreshImage(): void {
    const view = this.current;
    if (view === null) return;
    this.image.src = this.api.sliceUrl(view.case_id, {
      axis: this.axis,
      index: this.index,
      window: this.wl.window,
      level: this.wl.level,
    });
    const size = this.dimAlong(this.axis);
    this.indexSlider.max = String(Math.max(0, size - 1));
    this.indexSlider.value = String(this.index);
    this.indexLabel.textContent = `${this.index + 1} / ${size}`;
    this.caption.textContent = `axis ${AXIS_NAMES[this.axis as 0 | 1 | 2]}, slice ${this.index + 1} of ${size}`;
    for (const b of this.axisButtons) {
      b.classList.toggle('active', Number(b.dataset.axis) === this.axis);
    }
  }

  private setAxis(axis: number): void {
    if (this.current === null || this.current.presentation !== 'volume') return;
    this.axis = axis;
    this.index = Math.floor(this.dimAlong(axis) / 2);
    this.refreshImage();
  }

  private setIndex(index: number): void {
    this.index = clampIndex(index, this.dimAlong(this.axis));
    this.refreshImage();
  }

  private setWindowLevel(wl: WindowLevel): void {
    this.wl = wl;
    this.syncWindowInputs();
    this.refreshImage();
  }

  private syncWindowInputs(): void {
    this.windowInput.value = formatNumber(this.wl.window);
    this.levelInput.value = formatNumber(this.wl.level);
  }

  private populatePresets(meta: CaseMeta): void {
    this.presetSelect.innerHTML = '';
    const auto = document.createElement('option');
    auto.value = 'auto';
    auto.textContent = 'auto';
    this.presetSelect.appendChild(auto);
    for (const name of presetsFor(meta.intensity_kind)) {
      const opt = document.createElement('option');
      opt.value = name;
      opt.textContent = name;
      this.presetSelect.appendChild(opt);
    }
    this.presetSelect.value = 'auto';
  }

  // ----------------------------------------------------------------
  // widgets
  // ----------------------------------------------------------------

  private buildAxisButtons(host: HTMLElement): void {
    for (let a = 0; a < 3; a++) {
      const b = document.createElement('button');
      b.type = 'button';
      b.textContent = AXIS_NAMES[a as 0 | 1 | 2];
      b.dataset.axis = String(a);
      b.addEventListener('click', () => this.setAxis(a));
      host.appendChild(b);
      this.axisButtons.push(b);
    }
  }

  private buildScoreButtons(host: HTMLElement): void {
    for (let s = 1; s <= 10; s++) {
      const b = document.createElement('button');
      b.type = 'button';
      b.textContent = String(s);
      b.dataset.score = String(s);
      b.addEventListener('click', () => {
        this.score = s;
        this.refreshScoreButtons();
        this.submitButton.disabled = false;
      });
      host.appendChild(b);
      this.scoreButtons.push(b);
    }
  }

  private refreshScoreButtons(): void {
    for (const b of this.scoreButtons) {
      b.classList.toggle('selected', Number(b.dataset.score) === this.score);
    }
  }

  private bindViewerControls(): void {
    this.indexSlider.addEventListener('input', () => {
      this.setIndex(Number(this.indexSlider.value));
    });
    const readInputs = () => {
      const w = Number(this.windowInput.value);
      const l = Number(this.levelInput.value);
      if (Number.isFinite(w) && w > 0 && Number.isFinite(l)) {
        this.setWindowLevel({ window: w, level: l });
      }
    };
    this.windowInput.addEventListener('change', readInputs);
    this.levelInput.addEventListener('change', readInputs);
    this.presetSelect.addEventListener('change', () => {
      const name = this.presetSelect.value;
      if (name === 'auto') {
        if (this.meta) {
          this.setWindowLevel({ window: this.meta.default_window, level: this.meta.default_level });
        }
        return;
      }
      const preset = WINDOW_PRESETS[name];
      if (preset) this.setWindowLevel({ ...preset });
    });
    this.bindImageDrag();
  }

  private bindImageDrag(): void {
    let dragging = false;
    let startX = 0;
    let startY = 0;
    let startWl: WindowLevel = this.wl;
    this.image.addEventListener('mousedown', (ev) => {
      dragging = true;
      startX = ev.clientX;
      startY = ev.clientY;
      startWl = { ...this.wl };
      ev.preventDefault();
    });
    window.addEventListener('mousemove', (ev) => {
      if (!dragging) return;
      // one image-width of drag sweeps roughly one window width
      const scale = Math.max(1e-3, startWl.window / 256);
      this.setWindowLevel(dragWindowLevel(startWl, ev.clientX - startX, ev.clientY - startY, scale));
    });
    window.addEventListener('mouseup', () => {
      dragging = false;
    });
  }
}

function formatNumber(v: number): string {
  const rounded = Math.round(v * 100) / 100;
  return String(rounded);
}
