// Page-level session state and its pure transitions.  The view is a
// function of this object; event handlers only call these and re-render.

import type { EditorState } from './editor.js';
import { editCode, freshEditor, resetEditor } from './editor.js';
import type {
  CheckResponse,
  QuestionView,
  ReportDoc,
} from './models.js';

export interface PageState {
  question: QuestionView;
  attemptId: string;
  editor: EditorState;
  checkCount: number;
  nextPenaltyPct: number;
  /** disables Precheck/Check/Reset while a submission is on the wire */
  inFlight: boolean;
  lastReport: ReportDoc | null;
  /** network or retry notice; null when all is well */
  banner: string | null;
  closed: boolean;
}

export function initialState(
  question: QuestionView,
  attemptId: string,
  preload: string,
): PageState {
  return {
    question,
    attemptId,
    editor: freshEditor(preload, question.language),
    checkCount: 0,
    nextPenaltyPct: 0,
    inFlight: false,
    lastReport: null,
    banner: null,
    closed: false,
  };
}

export function typeCode(state: PageState, code: string): PageState {
  return { ...state, editor: editCode(state.editor, code) };
}

export function beginSubmission(state: PageState): PageState {
  return { ...state, inFlight: true, banner: null };
}

/** Prechecks are free: the attempt counter must not move. */
export function applyPrecheck(state: PageState, report: ReportDoc): PageState {
  return { ...state, inFlight: false, lastReport: report };
}

export function applyCheck(state: PageState, res: CheckResponse): PageState {
  return {
    ...state,
    inFlight: false,
    lastReport: res,
    checkCount: res.check_count,
    nextPenaltyPct: res.next_penalty_pct,
  };
}

export function applyReset(state: PageState, preload: string): PageState {
  return {
    ...state,
    inFlight: false,
    editor: resetEditor(state.editor, preload),
  };
}

export function applyFailure(state: PageState, message: string): PageState {
  return { ...state, inFlight: false, banner: message };
}

export function applyClose(state: PageState): PageState {
  return { ...state, inFlight: false, closed: true };
}
