import { describe, expect, it } from 'vitest';

import {
  freshEditor,
  insertIndent,
  newlineAndIndent,
  resetEditor,
} from '../src/editor.js';

describe('tab indentation', () => {
  it('inserts four spaces for python', () => {
    const edit = insertIndent('ab', 1, 1, 'python3');
    expect(edit.code).toBe('a    b');
    expect(edit.caret).toBe(5);
  });

  it('inserts two spaces for c++', () => {
    const edit = insertIndent('ab', 1, 1, 'cpp14');
    expect(edit.code).toBe('a  b');
    expect(edit.caret).toBe(3);
  });

  it('replaces a selection', () => {
    const edit = insertIndent('hello', 1, 4, 'python3');
    expect(edit.code).toBe('h    o');
  });
});

describe('auto indent on enter', () => {
  it('keeps the current indentation', () => {
    const code = '    x = 1';
    const edit = newlineAndIndent(code, code.length, 'python3');
    expect(edit.code).toBe('    x = 1\n    ');
  });

  it('indents one level after a python block opener', () => {
    const code = 'def f(x):';
    const edit = newlineAndIndent(code, code.length, 'python3');
    expect(edit.code).toBe('def f(x):\n    ');
    expect(edit.caret).toBe(edit.code.length);
  });

  it('indents after an opening brace in c++', () => {
    const code = 'int main() {';
    const edit = newlineAndIndent(code, code.length, 'cpp14');
    expect(edit.code).toBe('int main() {\n  ');
  });

  it('splits a line at the caret', () => {
    const edit = newlineAndIndent('  ab', 3, 'python3');
    expect(edit.code).toBe('  a\n  b');
  });
});

describe('editor state', () => {
  it('starts clean on the preload', () => {
    const ed = freshEditor('seed', 'python3');
    expect(ed).toEqual({ code: 'seed', dirty: false, language: 'python3' });
  });

  it('reset is idempotent', () => {
    const ed = freshEditor('seed', 'python3');
    const once = resetEditor({ ...ed, code: 'junk', dirty: true }, 'seed');
    expect(resetEditor(once, 'seed')).toEqual(once);
  });
});
