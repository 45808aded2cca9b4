// Pure rendering: every function maps server documents to an HTML
// string, so the whole results view is a function of the last report
// plus the session summary and can be snapshot-tested headlessly.
//
// Hidden tests render as opaque rows: status and marks stay visible,
// the payload cells are shaded blocks with no text at all.

import { escapeHtml } from './highlight.js';
import type { QuestionView, ReportDoc, TestRow, TestStatus } from './models.js';

const ICONS: Record<TestStatus, string> = {
  pass: '✓',
  fail: '✗',
  error: '!',
  not_run: '·',
};

export function statusIcon(status: TestStatus): string {
  return ICONS[status];
}

function fmtMarks(value: number): string {
  return Number(value.toFixed(3)).toString();
}

function marksCell(row: TestRow): string {
  return `${fmtMarks(row.marks_awarded)}/${fmtMarks(row.marks_available)}`;
}

function visibleRow(row: TestRow): string {
  const got =
    row.shown_got === undefined
      ? ''
      : `<code>${escapeHtml(row.shown_got)}</code>`;
  const message = row.message
    ? `<div class="row-message">${escapeHtml(row.message)}</div>`
    : '';
  return [
    `<tr class="row-${row.status}">`,
    `<td class="cell-label">${escapeHtml(row.test_id)}</td>`,
    `<td class="cell-status">${statusIcon(row.status)}</td>`,
    `<td class="cell-marks">${marksCell(row)}</td>`,
    `<td class="cell-input"><code>${escapeHtml(row.shown_input)}</code></td>`,
    `<td class="cell-expected"><code>${escapeHtml(row.shown_expected)}</code></td>`,
    `<td class="cell-got">${got}${message}</td>`,
    '</tr>',
  ].join('');
}

function hiddenRow(row: TestRow): string {
  return [
    `<tr class="row-${row.status} hidden-test">`,
    `<td class="cell-label">${escapeHtml(row.test_id)}</td>`,
    `<td class="cell-status">${statusIcon(row.status)}</td>`,
    `<td class="cell-marks">${marksCell(row)}</td>`,
    '<td class="opaque" colspan="3" aria-label="hidden test"></td>',
    '</tr>',
  ].join('');
}

/** The table truncates after the first error row: everything later is
 * collapsed into a single "did not run" row. */
export function renderResultsTable(report: ReportDoc): string {
  const rows = report.results;
  const errorAt = rows.findIndex((r) => r.status === 'error');
  const shown = errorAt === -1 ? rows : rows.slice(0, errorAt + 1);
  const skipped = rows.length - shown.length;

  const body = shown.map((r) => (r.hidden ? hiddenRow(r) : visibleRow(r)));
  if (skipped > 0) {
    body.push(
      '<tr class="truncated"><td colspan="6">' +
        `${skipped} later test${skipped === 1 ? '' : 's'} did not run` +
        '</td></tr>',
    );
  }
  return [
    '<table class="results">',
    '<thead><tr>',
    '<th>Test</th><th></th><th>Marks</th>',
    '<th>Input</th><th>Expected</th><th>Got</th>',
    '</tr></thead>',
    `<tbody>${body.join('')}</tbody>`,
    '</table>',
  ].join('');
}

export function renderDiagnostics(report: ReportDoc): string {
  if (!report.toolchain_diagnostics) return '';
  return (
    '<pre class="diagnostics">' +
    escapeHtml(report.toolchain_diagnostics) +
    '</pre>'
  );
}

export function renderScore(report: ReportDoc): string {
  const pct = Math.round(report.final_fraction * 1000) / 10;
  const penalty =
    report.penalty_pct > 0
      ? ` after ${report.penalty_pct}% penalty`
      : '';
  return (
    '<p class="score">' +
    `Marks ${fmtMarks(report.raw_marks)}/${fmtMarks(report.total_marks)}` +
    `, credited ${pct}%${penalty}` +
    '</p>'
  );
}

export function renderPenaltyNotice(
  checkCount: number,
  nextPenaltyPct: number,
): string {
  const cost =
    nextPenaltyPct === 0
      ? 'no penalty'
      : `${nextPenaltyPct}% penalty`;
  return (
    '<p class="penalty-notice">' +
    `Checks used: ${checkCount}. Next check: ${cost}.` +
    '</p>'
  );
}

/** Full results panel: a function of the last report + counter state. */
export function renderResultsView(
  report: ReportDoc,
  checkCount: number,
  nextPenaltyPct: number,
): string {
  const free =
    report.mode === 'precheck'
      ? '<p class="free-badge">Precheck: no penalty, no attempt used</p>'
      : '';
  return [
    '<section class="results-view">',
    free,
    renderDiagnostics(report),
    renderResultsTable(report),
    renderScore(report),
    renderPenaltyNotice(checkCount, nextPenaltyPct),
    '</section>',
  ].join('');
}

export function renderQuestion(view: QuestionView): string {
  const statement = escapeHtml(view.statement).replace(/\n/g, '<br>');
  const links = view.doc_links
    .map(
      (l) =>
        `<li><a href="${escapeHtml(l.url)}" target="_blank" ` +
        `rel="noopener">${escapeHtml(l.label)}</a></li>`,
    )
    .join('');
  const examples = view.examples
    .map(
      (e) =>
        '<tr>' +
        `<td><code>${escapeHtml(e.input)}</code></td>` +
        `<td><code>${escapeHtml(e.expected)}</code></td>` +
        '</tr>',
    )
    .join('');
  return [
    '<section class="question">',
    `<h2>${escapeHtml(view.title)}</h2>`,
    `<p class="statement">${statement}</p>`,
    examples
      ? '<table class="examples"><thead><tr><th>For example</th>' +
        `<th>Result</th></tr></thead><tbody>${examples}</tbody></table>`
      : '',
    links ? `<ul class="doc-links">${links}</ul>` : '',
    '</section>',
  ].join('');
}
