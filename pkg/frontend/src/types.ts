/** Wire types mirroring the gateway JSON payloads. */

export type ChatMode = "quick" | "deep_understanding" | "exam_coach";

export const CHAT_MODES: readonly ChatMode[] = [
  "quick",
  "deep_understanding",
  "exam_coach",
];

export interface Citation {
  chunk_id: string;
  document_id: string;
  document_title: string;
  page_number: number;
  fragment: string;
  score: number;
}

export interface ChatTurn {
  turn_id: string;
  session_id: string;
  prompt: string;
  mode: ChatMode;
  answer: string;
  citations: Citation[];
  created_at: number;
}

export type ReviewState = "unreviewed" | "approved" | "rejected" | "published";

export interface QuizQuestion {
  question_id: string;
  stem: string;
  kind: string;
  options: { text: string; correct: boolean }[];
  explanation: string;
  citations: Citation[];
  bloom_level: string;
}

export interface Quiz {
  quiz_id: string;
  course_id: string;
  review_state: ReviewState;
  revision: number;
  questions: QuizQuestion[];
}

export interface MaterialStatus {
  document_id: string;
  status: "not_started" | "in_progress" | "completed";
  coverage: number;
  interaction_count: number;
}

export interface ProgressReport {
  materials: MaterialStatus[];
  aggregate: { touched_chunks: number; total_chunks: number; coverage: number };
}

export interface GatewayError {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}

export type Role = "student" | "teacher" | "admin";
