// Wire-shaped documents as the service sends them to students: hidden
// rows arrive already redacted (the UI never holds real payloads).

import type {
  CheckResponse,
  QuestionView,
  ReportDoc,
  TestRow,
} from '../src/models.js';

export const REDACTED = '«hidden»';

export const questionView: QuestionView = {
  id: 'avg-word-length',
  title: 'Average word length',
  statement:
    'Define a function avgWordLength(words) returning the average\n' +
    'length of the given words as a float. Use a for loop.',
  language: 'python3',
  preload: 'def avgWordLength(words):\n    ',
  doc_links: [
    {
      label: 'Python tutorial: for statements',
      url: 'https://docs.python.org/3/tutorial/controlflow.html',
    },
  ],
  total_marks: 10.0,
  examples: [
    {
      test_id: 't-ex1',
      input: "avgWordLength(['pear', 'plum', 'kiwi'])",
      expected: '4.0',
    },
  ],
};

function row(partial: Partial<TestRow> & { test_id: string }): TestRow {
  return {
    status: 'pass',
    marks_awarded: 1.0,
    marks_available: 1.0,
    shown_input: '',
    shown_expected: '',
    message: '',
    hidden: false,
    ...partial,
  };
}

/** A crash mid-run: two passes, an error row, eight never-run tests. */
export const errorTruncationReport: ReportDoc = {
  attempt_number: 1,
  mode: 'check',
  results: [
    row({ test_id: 't-name', status: 'pass', marks_awarded: 0.5,
          marks_available: 0.5, shown_input: 'avgWordLength is defined' }),
    row({ test_id: 't-arity', status: 'pass', marks_awarded: 0.5,
          marks_available: 0.5,
          shown_input: 'avgWordLength takes 1 parameter(s)' }),
    row({ test_id: 't-rettype', status: 'error', marks_awarded: 0,
          marks_available: 0.5,
          shown_input: 'avgWordLength returns a float',
          message:
            "NameError: name 'totalLetters' is not defined" }),
    ...['t-ex1', 't-ex2', 't-ex3', 't-hid1', 't-hid2', 't-style-while',
        't-style-map', 't-style-recursion'].map((id) =>
      row({ test_id: id, status: 'not_run', marks_awarded: 0 }),
    ),
  ],
  raw_marks: 1.0,
  total_marks: 10.0,
  penalty_pct: 0,
  final_fraction: 0.1,
  toolchain_diagnostics: '',
};

/** A full run whose hidden rows are redacted on the wire. */
export const hiddenRowsReport: ReportDoc = {
  attempt_number: 1,
  mode: 'check',
  results: [
    row({ test_id: 't-ex1', status: 'pass', marks_awarded: 0.5,
          marks_available: 0.5,
          shown_input: "avgWordLength(['pear', 'plum', 'kiwi'])",
          shown_expected: '4.0' }),
    row({ test_id: 't-hid1', status: 'fail', marks_awarded: 0,
          marks_available: 2.0, shown_input: REDACTED,
          shown_expected: REDACTED, shown_got: REDACTED,
          message: REDACTED, hidden: true }),
    row({ test_id: 't-hid2', status: 'fail', marks_awarded: 0,
          marks_available: 2.0, shown_input: REDACTED,
          shown_expected: REDACTED, shown_got: REDACTED,
          message: '', hidden: true }),
  ],
  raw_marks: 0.5,
  total_marks: 4.5,
  penalty_pct: 0,
  final_fraction: 0.111111,
  toolchain_diagnostics: '',
};

/** Precheck rejected by the syntax gate: diagnostics, nothing ran. */
export const syntaxFailureReport: ReportDoc = {
  attempt_number: 0,
  mode: 'precheck',
  results: [
    row({ test_id: 't-name', status: 'not_run', marks_awarded: 0,
          marks_available: 0.5 }),
    row({ test_id: 't-arity', status: 'not_run', marks_awarded: 0,
          marks_available: 0.5 }),
    row({ test_id: 't-ex1', status: 'not_run', marks_awarded: 0,
          marks_available: 0.5 }),
  ],
  raw_marks: 0,
  total_marks: 1.5,
  penalty_pct: 0,
  final_fraction: 0,
  toolchain_diagnostics:
    '  File "student.py", line 2\n' +
    '    for word in words\n' +
    '                     ^\n' +
    "SyntaxError: expected ':'",
};

export const perfectCheckResponse: CheckResponse = {
  attempt_number: 1,
  mode: 'check',
  results: [
    row({ test_id: 't-ex1', status: 'pass', marks_awarded: 0.5,
          marks_available: 0.5 }),
  ],
  raw_marks: 10.0,
  total_marks: 10.0,
  penalty_pct: 0,
  final_fraction: 1.0,
  toolchain_diagnostics: '',
  check_count: 1,
  next_penalty_pct: 0,
};
