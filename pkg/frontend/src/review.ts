/** Teacher review editor: badge, review actions, export, conflict handling.
 *
 * Every action posts the revision the editor last loaded. A stale revision
 * comes back as a version_conflict; the controller then raises the reload
 * prompt and keeps the local draft untouched so no work is lost. Export is
 * enabled only for approved or published quizzes.
 */

import { ApiError, GatewayClient } from "./api.js";
import type { Quiz, QuizQuestion, ReviewState } from "./types.js";

const BADGES: Record<ReviewState, string> = {
  unreviewed: "Unreviewed",
  approved: "Approved",
  rejected: "Rejected",
  published: "Published",
};

export interface QuestionError {
  questionId: string | null;
  code: string;
  message: string;
}

export class ReviewController {
  quiz: Quiz | null = null;
  /** Set when a concurrent edit was detected; the UI must offer a reload. */
  conflictPrompt = false;
  /** Local draft of edited questions, preserved across conflicts. */
  draft: QuizQuestion[] | null = null;
  lastError: QuestionError | null = null;

  constructor(
    private client: GatewayClient,
    private quizId: string,
  ) {}

  async load(): Promise<Quiz> {
    this.quiz = await this.client.getQuiz(this.quizId);
    this.conflictPrompt = false;
    this.lastError = null;
    return this.quiz;
  }

  get badge(): string {
    if (!this.quiz) {
      throw new Error("no quiz loaded");
    }
    return BADGES[this.quiz.review_state];
  }

  get exportEnabled(): boolean {
    return (
      this.quiz !== null &&
      (this.quiz.review_state === "approved" ||
        this.quiz.review_state === "published")
    );
  }

  editDraft(questions: QuizQuestion[]): void {
    this.draft = questions;
  }

  private async act(
    action: "approve" | "reject" | "publish" | "edit",
    edited?: QuizQuestion[],
  ): Promise<boolean> {
    if (!this.quiz) {
      throw new Error("no quiz loaded");
    }
    try {
      this.quiz = await this.client.reviewQuiz(
        this.quizId,
        action,
        this.quiz.revision,
        edited,
      );
      this.conflictPrompt = false;
      this.lastError = null;
      if (action === "edit") {
        this.draft = null;
      }
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.body.code === "version_conflict") {
        // someone else moved the quiz; prompt a reload, keep the draft
        this.conflictPrompt = true;
        return false;
      }
      if (err instanceof ApiError) {
        this.lastError = {
          questionId: (err.body.detail?.question_id as string) ?? null,
          code: err.body.code,
          message: err.body.message,
        };
        return false;
      }
      throw err;
    }
  }

  approve(): Promise<boolean> {
    return this.act("approve");
  }

  reject(): Promise<boolean> {
    return this.act("reject");
  }

  publish(): Promise<boolean> {
    return this.act("publish");
  }

  saveEdit(): Promise<boolean> {
    if (!this.draft) {
      throw new Error("nothing to save");
    }
    return this.act("edit", this.draft);
  }

  async exportXml(): Promise<string> {
    if (!this.exportEnabled) {
      throw new Error("export requires an approved or published quiz");
    }
    return this.client.exportQuizXml(this.quizId);
  }
}
