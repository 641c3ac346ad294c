import { describe, expect, test } from "vitest";

import { ApiError, PlayChannel, SessionApi } from "../src/api.js";
import type { EventMessage } from "../src/protocol.js";
import { FakeSocket, jsonResponse, makeObservation, resultFor } from "./helpers.js";

describe("SessionApi", () => {
  test("createSession posts the request body and returns the parsed response", async () => {
    const seen: { url?: string; init?: RequestInit } = {};
    const api = new SessionApi("http://host:9/", async (url, init) => {
      seen.url = String(url);
      seen.init = init;
      return jsonResponse(200, { protocol_version: 1, session_id: "abc", observation: makeObservation() });
    });
    const created = await api.createSession({ level: 1, seed: 0, debug: true });
    expect(seen.url).toBe("http://host:9/sessions");
    expect(JSON.parse(String(seen.init?.body))).toEqual({ level: 1, seed: 0, debug: true });
    expect(created.session_id).toBe("abc");
  });

  test("structured service errors surface code and message", async () => {
    const api = new SessionApi("http://host:9", async () =>
      jsonResponse(400, { protocol_version: 1, error: { code: "invalid_game", message: "rooms must be positive" } }),
    );
    const err = await api.createSession({ rooms: 0 } as never).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("invalid_game");
    expect((err as ApiError).status).toBe(400);
    expect((err as ApiError).message).toBe("rooms must be positive");
  });

  test("fetchMap treats 403 as not-observable rather than an error", async () => {
    const denied = new SessionApi("http://host:9", async () =>
      jsonResponse(403, { error: { code: "observability_denied", message: "no" } }),
    );
    expect(await denied.fetchMap("s")).toBeNull();

    const snapshot = {
      protocol_version: 1,
      rooms: [{ id: "r_0", name: "hall", x: 0, y: 0 }],
      exits: [],
      objects: [],
      player_room: "r_0",
      target: null,
      target_room: null,
    };
    const allowed = new SessionApi("http://host:9", async () => jsonResponse(200, snapshot));
    expect(await allowed.fetchMap("s")).toEqual(snapshot);
  });

  test("playUrl swaps the scheme and keeps the host", () => {
    expect(new SessionApi("http://host:9").playUrl("s1")).toBe("ws://host:9/sessions/s1/play");
    expect(new SessionApi("https://host").playUrl("s1")).toBe("wss://host/sessions/s1/play");
  });
});

describe("PlayChannel", () => {
  test("responses are matched by correlation id, even out of order", async () => {
    let socket!: FakeSocket;
    const channel = await PlayChannel.open("ws://x", () => (socket = new FakeSocket()));
    const first = channel.step("look");
    const second = channel.step("go south");

    const [reqA, reqB] = socket.sent.map((raw) => JSON.parse(raw) as Record<string, unknown>);
    expect(reqA.kind).toBe("step");
    expect(reqA.correlation_id).not.toBe(reqB.correlation_id);

    socket.push(resultFor(reqB, makeObservation({ feedback: "second" })));
    socket.push(resultFor(reqA, makeObservation({ feedback: "first" })));
    expect((await first).observation.feedback).toBe("first");
    expect((await second).observation.feedback).toBe("second");
  });

  test("error responses reject only the matching request", async () => {
    let socket!: FakeSocket;
    const channel = await PlayChannel.open("ws://x", () => (socket = new FakeSocket()));
    const bad = channel.step(99);
    const good = channel.state();
    const [reqBad, reqGood] = socket.sent.map((raw) => JSON.parse(raw) as Record<string, unknown>);

    socket.push({ kind: "error", code: "bad_request", message: "index out of range", correlation_id: reqBad.correlation_id });
    socket.push(resultFor(reqGood, makeObservation()));

    const err = await bad.catch((e: unknown) => e);
    expect((err as ApiError).code).toBe("bad_request");
    expect((await good).kind).toBe("result");
  });

  test("pushed events reach the event handler, not the request waiters", async () => {
    let socket!: FakeSocket;
    const channel = await PlayChannel.open("ws://x", () => (socket = new FakeSocket()));
    const events: EventMessage[] = [];
    channel.onEvent = (ev) => events.push(ev);

    const step = channel.step("take melon");
    const req = socket.lastSent();
    socket.push(resultFor(req, makeObservation({ done: true, won: true })));
    socket.push({ protocol_version: 1, kind: "event", event: "game_over", session_id: "s", outcome: "won" });

    expect((await step).done).toBe(true);
    expect(events).toHaveLength(1);
    expect(events[0].outcome).toBe("won");
  });

  test("a closed socket rejects every pending request", async () => {
    let socket!: FakeSocket;
    const channel = await PlayChannel.open("ws://x", () => (socket = new FakeSocket()));
    const pending = channel.step("look");
    socket.close();
    await expect(pending).rejects.toThrow("play channel closed");
    await expect(channel.step("look")).rejects.toThrow("closed");
  });

  test("unparseable and unmatched frames are ignored", async () => {
    let socket!: FakeSocket;
    const channel = await PlayChannel.open("ws://x", () => (socket = new FakeSocket()));
    const step = channel.step("look");
    socket.onmessage?.({ data: "not json" });
    socket.push({ kind: "result", correlation_id: "never-issued", observation: makeObservation(), reward: 0, done: false });
    socket.push(resultFor(socket.lastSent(), makeObservation({ feedback: "still here" })));
    expect((await step).observation.feedback).toBe("still here");
  });
});
