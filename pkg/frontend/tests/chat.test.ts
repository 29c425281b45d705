import { beforeEach, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { ChatController } from "../src/chat.js";
import { segmentAnswer } from "../src/render.js";
import { CHAT_MODES } from "../src/types.js";
import { FakeGateway, makeCitation } from "./fakeGateway.js";

describe("mode selector wiring", () => {
  let gateway: FakeGateway;
  let chat: ChatController;

  beforeEach(() => {
    gateway = new FakeGateway();
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    chat = new ChatController(client, "course-fix", "sess1");
  });

  it("sends the selected mode for all three modes", async () => {
    for (const mode of CHAT_MODES) {
      chat.selectMode(mode);
      const turn = await chat.submit(`question in ${mode}`);
      expect(turn.error).toBeNull();
      const request = gateway.requests.at(-1)!;
      expect(request.path).toBe("/courses/course-fix/chat");
      expect((request.body as { mode: string }).mode).toBe(mode);
      expect(turn.mode).toBe(mode);
    }
  });

  it("defaults to quick", async () => {
    await chat.submit("hello");
    expect((gateway.requests[0].body as { mode: string }).mode).toBe("quick");
  });

  it("rejects unknown modes locally", () => {
    expect(() => chat.selectMode("chatty" as never)).toThrow();
  });

  it("carries the session id on every request", async () => {
    await chat.submit("one");
    await chat.submit("two");
    for (const request of gateway.requests) {
      expect((request.body as { session_id: string }).session_id).toBe("sess1");
    }
  });
});

describe("error banners", () => {
  it("surfaces a 403 as a permission banner, keeping the turn visible", async () => {
    const gateway = new FakeGateway();
    gateway.failNextChatWith = {
      status: 403,
      code: "forbidden",
      message: "not a member of course course-fix",
    };
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    const chat = new ChatController(client, "course-fix", "sess1");
    const turn = await chat.submit("let me in");
    expect(turn.answer).toBeNull();
    expect(turn.error).toEqual({
      code: "forbidden",
      message: "not a member of course course-fix",
    });
    expect(chat.turns).toHaveLength(1);
  });

  it("rejects a second submit while one is in flight", async () => {
    const gateway = new FakeGateway();
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    const chat = new ChatController(client, "course-fix", "sess1");
    const first = chat.submit("first");
    await expect(chat.submit("second")).rejects.toThrow(/in flight/);
    await first;
    expect(gateway.requests).toHaveLength(1);
  });

  it("rejects empty prompts without a request", async () => {
    const gateway = new FakeGateway();
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    const chat = new ChatController(client, "course-fix", "sess1");
    await expect(chat.submit("   ")).rejects.toThrow(/empty/);
    expect(gateway.requests).toHaveLength(0);
  });
});

describe("source reader cards", () => {
  it("renders one collapsed card per citation; expanding shows the exact page and fragment", async () => {
    const gateway = new FakeGateway();
    gateway.citationsPerTurn = [
      makeCitation({ page_number: 3, fragment: "The capital of France is Paris." }),
      makeCitation({
        chunk_id: "ch7",
        document_title: "Algorithms handbook",
        page_number: 12,
        fragment: "Quicksort partitions the array around a pivot element.",
      }),
    ];
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    const chat = new ChatController(client, "course-fix", "sess1");
    const turn = await chat.submit("tell me things");
    expect(turn.sourceCards).toHaveLength(2);
    for (const card of turn.sourceCards) {
      expect(card.expanded).toBe(false);
      expect(card.render().page).toBeNull();
      expect(card.render().fragment).toBeNull();
    }
    turn.sourceCards[0].toggle();
    expect(turn.sourceCards[0].render()).toEqual({
      title: "Geography notes",
      page: 3,
      fragment: "The capital of France is Paris.",
    });
    turn.sourceCards[1].toggle();
    expect(turn.sourceCards[1].render().page).toBe(12);
    expect(turn.sourceCards[1].render().fragment).toBe(
      "Quicksort partitions the array around a pivot element.",
    );
    turn.sourceCards[0].toggle();
    expect(turn.sourceCards[0].render().page).toBeNull();
  });

  it("never rewrites the citation payload", async () => {
    const fragment = "  exact   spacing\tand $math$ kept  ";
    const gateway = new FakeGateway();
    gateway.citationsPerTurn = [makeCitation({ fragment, page_number: 999 })];
    const client = new GatewayClient("http://gw", "tok-teacher", gateway.fetch);
    const chat = new ChatController(client, "course-fix", "sess1");
    const turn = await chat.submit("q");
    turn.sourceCards[0].toggle();
    expect(turn.sourceCards[0].render().fragment).toBe(fragment);
    expect(turn.sourceCards[0].render().page).toBe(999);
  });
});

describe("answer rendering", () => {
  it("splits inline and display math", () => {
    expect(segmentAnswer("Energy is $E = mc^2$ here.")).toEqual([
      { kind: "text", content: "Energy is " },
      { kind: "inline_math", content: "E = mc^2" },
      { kind: "text", content: " here." },
    ]);
    expect(segmentAnswer("$$\\int_0^1 x\\,dx$$")).toEqual([
      { kind: "display_math", content: "\\int_0^1 x\\,dx" },
    ]);
  });

  it("treats unterminated delimiters as literal text", () => {
    expect(segmentAnswer("price is $5 and rising")).toEqual([
      { kind: "text", content: "price is $5 and rising" },
    ]);
  });

  it("round-trips plain text unchanged", () => {
    expect(segmentAnswer("no math at all")).toEqual([
      { kind: "text", content: "no math at all" },
    ]);
  });
});
