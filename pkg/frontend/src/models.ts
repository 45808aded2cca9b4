// Wire types for the grading service HTTP API.  These mirror the JSON
// the server actually sends; the UI never sees unredacted reports.

export type GradedLanguage = 'python3' | 'cpp14';

export type TestStatus = 'pass' | 'fail' | 'error' | 'not_run';

export interface TestRow {
  test_id: string;
  status: TestStatus;
  marks_awarded: number;
  marks_available: number;
  shown_input: string;
  shown_expected: string;
  shown_got?: string;
  message: string;
  hidden: boolean;
}

export interface ReportDoc {
  attempt_number: number;
  mode: 'precheck' | 'check' | 'author_validate';
  results: TestRow[];
  raw_marks: number;
  total_marks: number;
  penalty_pct: number;
  final_fraction: number;
  toolchain_diagnostics: string;
}

/** Check responses additionally carry the attempt counter state. */
export interface CheckResponse extends ReportDoc {
  check_count: number;
  next_penalty_pct: number;
}

export interface DocLink {
  label: string;
  url: string;
}

export interface ExampleRow {
  test_id: string;
  input: string;
  expected: string;
}

export interface QuestionView {
  id: string;
  title: string;
  statement: string;
  language: GradedLanguage;
  preload: string;
  doc_links: DocLink[];
  total_marks: number;
  examples: ExampleRow[];
}

export interface AttemptSummary {
  attempt_id: string;
  question_id: string;
  student_id: string;
  state: 'open' | 'closed';
  check_count: number;
  current_code: string;
  next_penalty_pct: number;
  history: { mode: string; attempt_number: number; final_fraction: number }[];
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
