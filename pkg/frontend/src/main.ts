// Browser shell: wires the editor, buttons, and results panel to the
// grading service.  All logic lives in the pure modules; this file only
// moves strings between the DOM and them.

import { ApiClient, ApiError } from './api.js';
import { insertIndent, newlineAndIndent } from './editor.js';
import { highlight } from './highlight.js';
import { renderQuestion, renderResultsView } from './render.js';
import {
  applyCheck,
  applyClose,
  applyFailure,
  applyPrecheck,
  applyReset,
  beginSubmission,
  initialState,
  typeCode,
  type PageState,
} from './state.js';

interface PageConfig {
  serviceUrl: string;
  questionId: string;
  studentId: string;
  token: string | null;
}

function readConfig(): PageConfig {
  const el = document.getElementById('page-config');
  const doc = JSON.parse(el?.textContent ?? '{}');
  return {
    serviceUrl: doc.serviceUrl ?? 'http://127.0.0.1:8080',
    questionId: doc.questionId ?? 'avg-word-length',
    studentId: doc.studentId ?? 'anonymous',
    token: doc.token ?? null,
  };
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

async function boot(): Promise<void> {
  const config = readConfig();
  const api = new ApiClient(config.serviceUrl, config.token);

  const questionPane = byId<HTMLElement>('question');
  const resultsPane = byId<HTMLElement>('results');
  const bannerPane = byId<HTMLElement>('banner');
  const editorInput = byId<HTMLTextAreaElement>('editor-input');
  const editorOverlay = byId<HTMLElement>('editor-overlay');
  const precheckBtn = byId<HTMLButtonElement>('btn-precheck');
  const checkBtn = byId<HTMLButtonElement>('btn-check');
  const resetBtn = byId<HTMLButtonElement>('btn-reset');

  let question;
  let attempt;
  try {
    question = await api.question(config.questionId);
    attempt = await api.createAttempt(question.id, config.studentId);
  } catch (err) {
    questionPane.innerHTML = '<p class="banner">Question not found.</p>';
    throw err;
  }

  let state: PageState = initialState(question, attempt.attempt_id,
                                      attempt.preload);

  function paint(): void {
    questionPane.innerHTML = renderQuestion(state.question);
    bannerPane.textContent = state.banner ?? '';
    bannerPane.hidden = state.banner === null;
    resultsPane.innerHTML = state.lastReport
      ? renderResultsView(state.lastReport, state.checkCount,
                          state.nextPenaltyPct)
      : '';
    if (editorInput.value !== state.editor.code) {
      editorInput.value = state.editor.code;
    }
    editorOverlay.innerHTML =
      highlight(state.editor.code, state.editor.language) + '\n';
    const frozen = state.inFlight || state.closed;
    precheckBtn.disabled = frozen;
    checkBtn.disabled = frozen;
    resetBtn.disabled = frozen;
  }

  function update(next: PageState): void {
    state = next;
    paint();
  }

  editorInput.addEventListener('input', () => {
    update(typeCode(state, editorInput.value));
  });

  editorInput.addEventListener('keydown', (ev) => {
    if (ev.key !== 'Tab' && ev.key !== 'Enter') return;
    ev.preventDefault();
    const edit =
      ev.key === 'Tab'
        ? insertIndent(editorInput.value, editorInput.selectionStart,
                       editorInput.selectionEnd, state.editor.language)
        : newlineAndIndent(editorInput.value, editorInput.selectionStart,
                           state.editor.language);
    editorInput.value = edit.code;
    editorInput.selectionStart = edit.caret;
    editorInput.selectionEnd = edit.caret;
    update(typeCode(state, edit.code));
  });

  editorInput.addEventListener('scroll', () => {
    editorOverlay.scrollTop = editorInput.scrollTop;
    editorOverlay.scrollLeft = editorInput.scrollLeft;
  });

  async function submit(kind: 'precheck' | 'check'): Promise<void> {
    if (state.inFlight) return;
    update(beginSubmission(state));
    try {
      if (kind === 'precheck') {
        update(applyPrecheck(state,
                             await api.precheck(state.attemptId,
                                                state.editor.code)));
      } else {
        update(applyCheck(state,
                          await api.check(state.attemptId,
                                          state.editor.code)));
      }
    } catch (err) {
      const message =
        err instanceof ApiError
          ? err.retryable
            ? 'A submission is already running; wait a moment and retry.'
            : err.kind === 'closed'
              ? 'This attempt has been closed.'
              : `Request failed: ${err.detail}`
          : 'Network failure; check your connection and retry.';
      update(applyFailure(state, message));
      if (err instanceof ApiError && err.kind === 'closed') {
        update(applyClose(state));
      }
    }
  }

  precheckBtn.addEventListener('click', () => void submit('precheck'));
  checkBtn.addEventListener('click', () => void submit('check'));
  resetBtn.addEventListener('click', () => {
    if (state.inFlight) return;
    if (!window.confirm('Reset the answer box to its original state?')) return;
    update(beginSubmission(state));
    api
      .reset(state.attemptId)
      .then((res) => update(applyReset(state, res.code)))
      .catch(() => update(applyFailure(state,
                                       'Reset failed; retry in a moment.')));
  });

  paint();
}

void boot();
