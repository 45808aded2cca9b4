// Token-level syntax highlighting for the two graded languages.
// Tokens are escaped individually and wrapped in classed spans, so the
// output is safe to inject into the editor overlay.

import type { GradedLanguage } from './models.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

const PY_KEYWORDS = new Set([
  'False', 'None', 'True', 'and', 'as', 'assert', 'async', 'await',
  'break', 'class', 'continue', 'def', 'del', 'elif', 'else', 'except',
  'finally', 'for', 'from', 'global', 'if', 'import', 'in', 'is',
  'lambda', 'nonlocal', 'not', 'or', 'pass', 'raise', 'return', 'try',
  'while', 'with', 'yield',
]);

const CPP_KEYWORDS = new Set([
  'auto', 'bool', 'break', 'case', 'catch', 'char', 'class', 'const',
  'constexpr', 'continue', 'default', 'delete', 'do', 'double', 'else',
  'enum', 'false', 'float', 'for', 'if', 'include', 'int', 'long',
  'namespace', 'new', 'nullptr', 'operator', 'private', 'protected',
  'public', 'return', 'short', 'signed', 'sizeof', 'static', 'struct',
  'switch', 'template', 'this', 'throw', 'true', 'try', 'typedef',
  'typename', 'unsigned', 'using', 'virtual', 'void', 'while',
]);

function span(cls: string, raw: string): string {
  return `<span class="tk-${cls}">${escapeHtml(raw)}</span>`;
}

/** One pass over the source; unknown characters fall through escaped. */
export function highlight(code: string, language: GradedLanguage): string {
  const keywords = language === 'python3' ? PY_KEYWORDS : CPP_KEYWORDS;
  const lineComment = language === 'python3' ? '#' : '//';
  const out: string[] = [];
  let i = 0;
  while (i < code.length) {
    const rest = code.slice(i);

    if (rest.startsWith(lineComment)) {
      const end = code.indexOf('\n', i);
      const stop = end === -1 ? code.length : end;
      out.push(span('comment', code.slice(i, stop)));
      i = stop;
      continue;
    }
    if (language === 'cpp14' && rest.startsWith('/*')) {
      const close = code.indexOf('*/', i + 2);
      const stop = close === -1 ? code.length : close + 2;
      out.push(span('comment', code.slice(i, stop)));
      i = stop;
      continue;
    }
    const ch = code[i];
    if (ch === '"' || ch === "'") {
      let j = i + 1;
      while (j < code.length && code[j] !== ch && code[j] !== '\n') {
        if (code[j] === '\\') j++;
        j++;
      }
      if (j < code.length && code[j] === ch) j++;
      out.push(span('str', code.slice(i, j)));
      i = j;
      continue;
    }
    const num = rest.match(/^\d+\.?\d*(?:[eE][+-]?\d+)?/);
    if (num && !/[\w.]/.test(code[i - 1] ?? ' ')) {
      out.push(span('num', num[0]));
      i += num[0].length;
      continue;
    }
    const word = rest.match(/^[A-Za-z_]\w*/);
    if (word) {
      out.push(
        keywords.has(word[0]) ? span('kw', word[0]) : escapeHtml(word[0]),
      );
      i += word[0].length;
      continue;
    }
    out.push(escapeHtml(ch));
    i++;
  }
  return out.join('');
}
