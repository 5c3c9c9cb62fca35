// A fake fetch that routes requests against canned handlers and records
// every call, so tests can both control responses and audit traffic.

import type { FetchLike } from '../src/api';
import type { Line, Project, Thread } from '../src/types';

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export type Handler = (call: RecordedCall) => { status: number; body: unknown } | undefined;

export function makeFetch(handlers: Handler[]) {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(init.body as string) : null,
    };
    calls.push(call);
    for (const handler of handlers) {
      const result = handler(call);
      if (result) {
        return new Response(JSON.stringify(result.body), {
          status: result.status,
          headers: { 'Content-Type': 'application/json' },
        });
      }
    }
    return new Response(
      JSON.stringify({ code: 'not_found', message: `no handler for ${url}`, details: null }),
      { status: 404, headers: { 'Content-Type': 'application/json' } },
    );
  };
  return { fetchImpl, calls };
}

export function makeProject(overrides: Partial<Project> = {}): Project {
  return {
    id: 'p1',
    title: 'Night Drive',
    artist: 'The City Lights',
    sign_language: 'ASL',
    nickname: 'signer',
    status: 'ready',
    song_description: 'SENTINEL-DESCRIPTION from the API',
    video_url: 'https://video.example/sentinel',
    jobs: [
      { project_id: 'p1', kind: 'alignment', status: 'done', stage: null, error: null },
      { project_id: 'p1', kind: 'preprocess', status: 'done', stage: null, error: null },
    ],
    ...overrides,
  };
}

export function makeLine(index: number, overrides: Partial<Line> = {}): Line {
  const start = 1000 + index * 2000;
  return {
    index,
    section: 'Verse 1',
    text: `line ${index} alpha beta gamma`,
    span: [start, start + 1800],
    words: ['alpha', 'beta', 'gamma'].map((surface, position) => ({
      surface,
      start_ms: start + position * 500,
      duration_ms: 350,
      confidence: 1,
      matched: true,
    })),
    annotation: {
      line_index: index,
      challenge: { line_index: index, kind: 'none', summary: '', needs_fingerspelling_hint: false },
      base_gloss: `BASE GLOSS ${index}`,
      alt_glosses: {
        shorter: `SHORT ${index}`,
        base_alt: `ALT GLOSS ${index}`,
        longer: `LONG GLOSS VARIANT ${index}`,
      },
      mood_hashtags: ['#sentinelmood'],
      performance_guide: `SENTINEL-GUIDE-${index}`,
    },
    noteworthy: false,
    gloss: null,
    ...overrides,
  };
}

export function makeThread(lineIndex: number, overrides: Partial<Thread> = {}): Thread {
  return {
    id: `thread-${lineIndex}`,
    project_id: 'p1',
    line_index: lineIndex,
    opened_by: 'user',
    messages: [],
    ...overrides,
  };
}
