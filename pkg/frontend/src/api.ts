/** Thin typed client over the gateway HTTP routes.
 *
 * The fetch implementation is injectable so tests can drive the client
 * against a simulated gateway. All non-2xx responses are rejected with an
 * ApiError carrying the gateway's {code, message, detail} body.
 */

import type {
  ChatMode,
  ChatTurn,
  GatewayError,
  ProgressReport,
  Quiz,
  QuizQuestion,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: GatewayError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface JobStatus {
  job_id: string;
  state: "queued" | "running" | "succeeded" | "failed";
  result: Record<string, unknown> | null;
  failure_reason: string | null;
}

export class GatewayClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        "Content-Type": "application/json",
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const payload = (await response.json()) as GatewayError;
      throw new ApiError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  chat(
    courseId: string,
    sessionId: string,
    prompt: string,
    mode: ChatMode,
  ): Promise<ChatTurn> {
    return this.request("POST", `/courses/${courseId}/chat`, {
      session_id: sessionId,
      prompt,
      mode,
    });
  }

  listTurns(
    courseId: string,
    sessionId: string,
    page = 1,
  ): Promise<{ turns: ChatTurn[]; total: number }> {
    return this.request(
      "GET",
      `/courses/${courseId}/sessions/${sessionId}/turns?page=${page}`,
    );
  }

  generateQuiz(
    courseId: string,
    nQuestions: number,
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/courses/${courseId}/quizzes:generate`, {
      n_questions: nQuestions,
    });
  }

  getJob(jobId: string): Promise<JobStatus> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  getQuiz(quizId: string): Promise<Quiz> {
    return this.request("GET", `/quizzes/${quizId}`);
  }

  reviewQuiz(
    quizId: string,
    action: "approve" | "reject" | "publish" | "edit",
    revision: number,
    editedQuestions?: QuizQuestion[],
  ): Promise<Quiz> {
    return this.request("POST", `/quizzes/${quizId}/review`, {
      action,
      revision,
      payload: editedQuestions ? { questions: editedQuestions } : null,
    });
  }

  async exportQuizXml(quizId: string): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/quizzes/${quizId}/export.xml`,
      { headers: { Authorization: `Bearer ${this.token}` } },
    );
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (await response.json()) as GatewayError,
      );
    }
    return response.text();
  }

  attemptQuiz(
    quizId: string,
    answers: Record<string, number | string | null>,
  ): Promise<{ attempt_id: string; score: number }> {
    return this.request("POST", `/quizzes/${quizId}/attempts`, { answers });
  }

  progress(courseId: string): Promise<ProgressReport> {
    return this.request("GET", `/courses/${courseId}/progress`);
  }
}
