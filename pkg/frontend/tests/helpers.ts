// Test helpers: fixture loading and a scripted fetch stub.

import { readFileSync } from 'node:fs';

import type { FetchLike } from '../src/api';

export function fixture<T = any>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, 'utf8')) as T;
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface Script {
  /** Substring the request URL must contain. */
  match: string;
  method?: string;
  status?: number;
  body: unknown;
  /** Serve this entry at most N times (default unlimited). */
  times?: number;
}

/** A fetch stub that walks a script list in order, earliest non-spent
 * matching entry first, and records every call. */
export function scriptedFetch(script: Script[]): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const remaining = script.map((entry) => ({ ...entry, used: 0 }));
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    calls.push({
      url,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    for (const entry of remaining) {
      if (entry.times !== undefined && entry.used >= entry.times) continue;
      if (entry.method && entry.method !== method) continue;
      if (!url.includes(entry.match)) continue;
      entry.used += 1;
      return new Response(JSON.stringify(entry.body), {
        status: entry.status ?? 200,
        headers: { 'content-type': 'application/json' },
      });
    }
    throw new Error(`no scripted response for ${method} ${url}`);
  };
  return { fetchFn, calls };
}

export function failingFetch(message = 'network down'): FetchLike {
  return async () => {
    throw new Error(message);
  };
}
