import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError, type FetchLike } from '../src/api.js';

interface Call {
  url: string;
  init?: RequestInit;
}

function fakeFetch(
  status: number,
  payload: unknown,
): { calls: Call[]; fetchFn: FetchLike } {
  const calls: Call[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  };
  return { calls, fetchFn };
}

describe('request construction', () => {
  it('posts json bodies to the service base url', async () => {
    const { calls, fetchFn } = fakeFetch(200, { ok: true });
    const client = new ApiClient('http://box:8080', null, fetchFn);
    await client.check('deadbeef', 'print(1)');
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe('http://box:8080/attempts/deadbeef/check');
    expect(calls[0].init?.method).toBe('POST');
    expect(calls[0].init?.body).toBe('{"code":"print(1)"}');
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers['Content-Type']).toBe('application/json');
    expect(headers['Authorization']).toBeUndefined();
  });

  it('sends a bearer header when a token is configured', async () => {
    const { calls, fetchFn } = fakeFetch(200, {});
    const client = new ApiClient('http://box:8080', 's3cret', fetchFn);
    await client.reset('deadbeef');
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers['Authorization']).toBe('Bearer s3cret');
    expect(calls[0].init?.body).toBeUndefined();
  });

  it('url-encodes question ids', async () => {
    const { calls, fetchFn } = fakeFetch(200, {});
    const client = new ApiClient('http://box:8080', null, fetchFn);
    await client.question('avg word');
    expect(calls[0].url).toBe('http://box:8080/questions/avg%20word');
    expect(calls[0].init?.method).toBe('GET');
  });
});

describe('responses', () => {
  it('returns the decoded body on success', async () => {
    const { fetchFn } = fakeFetch(200, { final_mark: 9.0 });
    const client = new ApiClient('http://box:8080', null, fetchFn);
    await expect(client.close('deadbeef')).resolves.toEqual({
      final_mark: 9.0,
    });
  });

  it('turns error documents into typed failures', async () => {
    const { fetchFn } = fakeFetch(409, {
      error: 'busy',
      detail: 'another submission is in flight; retry shortly',
    });
    const client = new ApiClient('http://box:8080', null, fetchFn);
    const err = await client.check('deadbeef', 'x').catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.kind).toBe('busy');
    expect(apiErr.status).toBe(409);
    expect(apiErr.detail).toContain('retry shortly');
    expect(apiErr.retryable).toBe(true);
  });

  it('only the busy failure is retryable', () => {
    expect(new ApiError('closed', 'attempt is closed', 409).retryable).toBe(
      false,
    );
    expect(new ApiError('unauthorized', 'bad token', 401).retryable).toBe(
      false,
    );
  });

  it('copes with non-json error bodies', async () => {
    const fetchFn: FetchLike = async () =>
      new Response('<html>gateway</html>', { status: 502 });
    const client = new ApiClient('http://box:8080', null, fetchFn);
    const err = (await client.summary('deadbeef').catch((e: unknown) => e)) as ApiError;
    expect(err.kind).toBe('http_error');
    expect(err.detail).toBe('status 502');
    expect(err.status).toBe(502);
  });
});
