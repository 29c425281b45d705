import { beforeEach, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { ReviewController } from "../src/review.js";
import { FakeGateway, makeQuiz } from "./fakeGateway.js";

describe("review flow", () => {
  let gateway: FakeGateway;
  let review: ReviewController;

  beforeEach(() => {
    gateway = new FakeGateway();
    gateway.quizzes.set("quiz1", makeQuiz());
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    review = new ReviewController(client, "quiz1");
  });

  it("walks Unreviewed -> Approved -> Published, updating badge and export", async () => {
    await review.load();
    expect(review.badge).toBe("Unreviewed");
    expect(review.exportEnabled).toBe(false);

    expect(await review.approve()).toBe(true);
    expect(review.badge).toBe("Approved");
    expect(review.exportEnabled).toBe(true);

    const xml = await review.exportXml();
    expect(xml.startsWith("<?xml")).toBe(true);
    expect(xml).toContain("Capital of France?");

    expect(await review.publish()).toBe(true);
    expect(review.badge).toBe("Published");
    expect(review.exportEnabled).toBe(true);
  });

  it("export is refused client-side before approval", async () => {
    await review.load();
    await expect(review.exportXml()).rejects.toThrow(/approved/);
    // and the gateway enforces the same gate if called directly
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    await expect(client.exportQuizXml("quiz1")).rejects.toThrow(/not_approved/);
  });

  it("sends the loaded revision with every action", async () => {
    await review.load();
    await review.approve();
    const request = gateway.requests.at(-1)!;
    expect((request.body as { revision: number }).revision).toBe(1);
    await review.publish();
    const next = gateway.requests.at(-1)!;
    expect((next.body as { revision: number }).revision).toBe(2);
  });

  it("a concurrent edit raises the conflict prompt and loses no draft", async () => {
    await review.load();
    const draft = [
      {
        ...makeQuiz().questions[0],
        stem: "Capital of France (edited)?",
      },
    ];
    review.editDraft(draft);

    // another teacher approves and rejects back while we were typing
    gateway.concurrentTransition("quiz1", "approve");

    expect(await review.approve()).toBe(false);
    expect(review.conflictPrompt).toBe(true);
    // the local draft survives the conflict
    expect(review.draft).toBe(draft);
    // and the server copy was not overwritten
    expect(gateway.quizzes.get("quiz1")!.review_state).toBe("approved");
    expect(gateway.quizzes.get("quiz1")!.questions[0].stem).toBe(
      "Capital of France?",
    );

    // reload clears the prompt and picks up the remote revision
    await review.load();
    expect(review.conflictPrompt).toBe(false);
    expect(review.quiz!.revision).toBe(2);
  });

  it("edit round-trips question text after a reject", async () => {
    await review.load();
    await review.reject();
    expect(review.badge).toBe("Rejected");
    review.editDraft([
      { ...review.quiz!.questions[0], stem: "Rewritten stem?" },
    ]);
    expect(await review.saveEdit()).toBe(true);
    expect(review.badge).toBe("Unreviewed");
    expect(review.quiz!.questions[0].stem).toBe("Rewritten stem?");
    expect(review.draft).toBeNull();
  });

  it("illegal transitions render an inline error, not a crash", async () => {
    await review.load();
    await review.approve();
    await review.publish();
    expect(await review.approve()).toBe(false);
    expect(review.lastError).not.toBeNull();
    expect(review.lastError!.code).toBe("illegal_transition");
    expect(review.conflictPrompt).toBe(false);
  });
});
