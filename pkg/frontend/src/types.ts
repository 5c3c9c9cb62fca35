// Payload shapes of the workbench REST API. All timestamps are integer ms.

export type SignLanguage = 'ASL' | 'PSE';
export type ProjectStatus = 'created' | 'preprocessing' | 'ready' | 'failed';
export type Intent = 'Meaning' | 'Glossing' | 'Emoting' | 'Timing';
export type PlayMode = 'global' | 'line_loop';

export interface JobStatus {
  project_id: string;
  kind: 'alignment' | 'preprocess';
  status: 'pending' | 'running' | 'done' | 'failed';
  stage: string | null;
  error: string | null;
}

export interface Project {
  id: string;
  title: string;
  artist: string;
  sign_language: SignLanguage;
  nickname: string;
  status: ProjectStatus;
  song_description: string;
  video_url: string;
  jobs: JobStatus[];
}

export interface TimedWord {
  surface: string;
  start_ms: number;
  duration_ms: number;
  confidence: number;
  matched: boolean;
}

export interface Annotation {
  line_index: number;
  challenge: {
    line_index: number;
    kind: 'poetic' | 'cultural' | 'mismatch' | 'none';
    summary: string;
    needs_fingerspelling_hint: boolean;
  };
  base_gloss: string;
  alt_glosses: { shorter: string; base_alt: string; longer: string };
  mood_hashtags: string[];
  performance_guide: string;
}

export interface Line {
  index: number;
  section: string;
  text: string;
  span: [number, number] | null;
  words: TimedWord[];
  annotation: Annotation | null;
  noteworthy: boolean;
  gloss: { raw: string; version: number } | null;
}

export interface ChatMessage {
  seq: number;
  role: 'user' | 'assistant';
  text: string;
  origin: 'shortcut' | 'manual' | 'proactive' | 'reply';
  intent: Intent | null;
  created_at: string;
}

export interface Thread {
  id: string;
  project_id: string;
  line_index: number;
  opened_by: 'user' | 'proactive';
  messages: ChatMessage[];
}

export interface ThreadSummary {
  id: string;
  line_index: number;
  opened_by: 'user' | 'proactive';
  message_count: number;
  last_text: string;
  last_intent: Intent | null;
}

export interface PlaybackState {
  project_id: string;
  t_ms: number;
  active_line: number | null;
  active_word: number | null;
  mode: PlayMode;
  loop_line: number | null;
}

export interface ApiError {
  code: string;
  message: string;
  details: unknown;
}

export interface ViewState {
  mode: PlayMode;
  selectedLine: number | null;
  playerTMs: number;
  openThread: string | null;
}
