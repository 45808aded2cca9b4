import { describe, expect, it } from 'vitest';

import {
  applyCheck,
  applyClose,
  applyFailure,
  applyPrecheck,
  applyReset,
  beginSubmission,
  initialState,
  typeCode,
} from '../src/state.js';
import {
  perfectCheckResponse,
  questionView,
  syntaxFailureReport,
} from './fixtures.js';

const start = () => initialState(questionView, 'a1', questionView.preload);

describe('attempt counter', () => {
  it('does not move on precheck', () => {
    let s = beginSubmission(start());
    s = applyPrecheck(s, syntaxFailureReport);
    expect(s.checkCount).toBe(0);
    expect(s.nextPenaltyPct).toBe(0);
    expect(s.inFlight).toBe(false);
    expect(s.lastReport).toBe(syntaxFailureReport);
  });

  it('follows the server on check', () => {
    const s = applyCheck(beginSubmission(start()), perfectCheckResponse);
    expect(s.checkCount).toBe(1);
    expect(s.nextPenaltyPct).toBe(0);
    const later = applyCheck(s, {
      ...perfectCheckResponse,
      check_count: 2,
      next_penalty_pct: 10,
    });
    expect(later.checkCount).toBe(2);
    expect(later.nextPenaltyPct).toBe(10);
  });
});

describe('submission lifecycle', () => {
  it('freezes the buttons while a submission is in flight', () => {
    const s = beginSubmission(start());
    expect(s.inFlight).toBe(true);
    expect(s.banner).toBeNull();
  });

  it('a failure releases the freeze and shows a banner', () => {
    const s = applyFailure(beginSubmission(start()),
                           'A submission is already running');
    expect(s.inFlight).toBe(false);
    expect(s.banner).toContain('already running');
  });

  it('closing freezes the page for good', () => {
    expect(applyClose(start()).closed).toBe(true);
  });
});

describe('editing and reset', () => {
  it('typing marks the editor dirty', () => {
    const s = typeCode(start(), 'x = 1\n');
    expect(s.editor.code).toBe('x = 1\n');
    expect(s.editor.dirty).toBe(true);
  });

  it('reset restores the preload and clears dirtiness', () => {
    let s = typeCode(start(), 'scribbles everywhere');
    s = applyReset(beginSubmission(s), questionView.preload);
    expect(s.editor.code).toBe(questionView.preload);
    expect(s.editor.dirty).toBe(false);
    expect(s.inFlight).toBe(false);
  });

  it('reset on a clean buffer is a no-op', () => {
    const s = applyReset(start(), questionView.preload);
    expect(s.editor.code).toBe(questionView.preload);
    expect(s.editor.dirty).toBe(false);
  });
});
