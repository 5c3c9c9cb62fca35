// Local playback resolution over the timed-lyrics snapshot: the same pure
// rule the server applies, evaluated client-side so the 250 ms player poll
// does not turn into a request stream.

import type { Line, PlaybackState, PlayMode } from './types';

export function resolvePlayback(
  projectId: string,
  lines: Line[],
  tMs: number,
  mode: PlayMode = 'global',
  loopLine: number | null = null,
): PlaybackState {
  let t = tMs;
  if (mode === 'line_loop') {
    if (loopLine === null) {
      throw new Error('line_loop mode requires loopLine');
    }
    const span = lines[loopLine]?.span;
    if (!span) {
      return { project_id: projectId, t_ms: t, active_line: null, active_word: null, mode, loop_line: loopLine };
    }
    const [start, end] = span;
    const width = end - start;
    t = ((((t - start) % width) + width) % width) + start;
  }

  let activeLine: number | null = null;
  for (const line of lines) {
    if (!line.span) continue;
    const [start, end] = line.span;
    // half-open spans: at a shared boundary the later line wins
    if (start <= t && t < end) {
      activeLine = line.index;
    }
  }
  if (activeLine === null) {
    return { project_id: projectId, t_ms: t, active_line: null, active_word: null, mode, loop_line: loopLine };
  }

  let activeWord: number | null = null;
  lines[activeLine].words.forEach((word, position) => {
    if (word.start_ms <= t) {
      activeWord = position;
    }
  });
  return {
    project_id: projectId,
    t_ms: t,
    active_line: activeLine,
    active_word: activeWord,
    mode,
    loop_line: loopLine,
  };
}
