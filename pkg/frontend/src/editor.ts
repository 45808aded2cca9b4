// Editor state and the pure text edits behind its IDE affordances.
// Everything here is a plain function of (text, caret), so the key
// handling can be tested without a browser.

import type { GradedLanguage } from './models.js';

export interface EditorState {
  code: string;
  dirty: boolean;
  language: GradedLanguage;
}

export interface TextEdit {
  code: string;
  /** caret position after the edit (selection collapsed) */
  caret: number;
}

export function freshEditor(
  preload: string,
  language: GradedLanguage,
): EditorState {
  return { code: preload, dirty: false, language };
}

export function editCode(state: EditorState, code: string): EditorState {
  return { ...state, code, dirty: true };
}

/** Reset restores the server-provided preload and clears dirtiness. */
export function resetEditor(state: EditorState, preload: string): EditorState {
  return { ...state, code: preload, dirty: false };
}

export function indentUnit(language: GradedLanguage): string {
  return language === 'python3' ? '    ' : '  ';
}

/** Tab replaces the selection with one indentation unit. */
export function insertIndent(
  code: string,
  selStart: number,
  selEnd: number,
  language: GradedLanguage,
): TextEdit {
  const unit = indentUnit(language);
  return {
    code: code.slice(0, selStart) + unit + code.slice(selEnd),
    caret: selStart + unit.length,
  };
}

/** Enter keeps the current line's indentation and adds one unit after
 * a block opener (trailing ':' in Python, '{' in C++). */
export function newlineAndIndent(
  code: string,
  caret: number,
  language: GradedLanguage,
): TextEdit {
  const lineStart = code.lastIndexOf('\n', caret - 1) + 1;
  const line = code.slice(lineStart, caret);
  const current = (line.match(/^[ \t]*/) ?? [''])[0];
  const opener = language === 'python3' ? /:\s*$/ : /\{\s*$/;
  const indent = opener.test(line) ? current + indentUnit(language) : current;
  const inserted = '\n' + indent;
  return {
    code: code.slice(0, caret) + inserted + code.slice(caret),
    caret: caret + inserted.length,
  };
}
