import { describe, expect, test } from "vitest";

import {
  applyGameOver,
  applyResult,
  applyStepError,
  beginConnect,
  connectFailed,
  createUiState,
  echoCommand,
  inventoryIds,
  sessionCreated,
  setMap,
} from "../src/state.js";
import { makeObservation } from "./helpers.js";

describe("connection lifecycle", () => {
  test("starts idle with an empty transcript", () => {
    const s = createUiState();
    expect(s.status).toBe("idle");
    expect(s.transcript).toEqual([]);
    expect(s.observation).toBeNull();
  });

  test("failed connect records the error text", () => {
    const s = createUiState();
    beginConnect(s);
    expect(s.status).toBe("connecting");
    connectFailed(s, "no route to host");
    expect(s.status).toBe("error");
    expect(s.errorText).toBe("no route to host");
  });

  test("session creation appends the welcome as a commandless entry", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation({ feedback: "Welcome!\n\nA room." }));
    expect(s.status).toBe("live");
    expect(s.sessionId).toBe("s1");
    expect(s.transcript).toEqual([{ command: null, feedback: "Welcome!\n\nA room.", error: false }]);
  });
});

describe("transcript", () => {
  test("echo first, feedback filled on acknowledgement", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    echoCommand(s, "open fridge");
    expect(s.pending).toBe(true);
    expect(s.transcript[1]).toEqual({ command: "open fridge", feedback: null, error: false });

    applyResult(s, makeObservation({ feedback: "You open the fridge.", moves: 1 }));
    expect(s.pending).toBe(false);
    expect(s.transcript[1].feedback).toBe("You open the fridge.");
    expect(s.observation?.moves).toBe(1);
  });

  test("entries stay in acknowledgement order and are never dropped", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    for (const [i, cmd] of ["look", "inventory", "go south"].entries()) {
      echoCommand(s, cmd);
      applyResult(s, makeObservation({ feedback: `ack ${i}`, moves: i + 1 }));
    }
    expect(s.transcript.map((e) => e.command)).toEqual([null, "look", "inventory", "go south"]);
    expect(s.transcript.map((e) => e.feedback)).toEqual([null, "ack 0", "ack 1", "ack 2"].map((f, i) => (i === 0 ? "Welcome." : f)));
  });

  test("parser failures are flagged on the entry", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    echoCommand(s, "blarg the melon");
    applyResult(s, makeObservation({ feedback: "That verb is not understood.", error_kind: "unknown_verb", moves: 1 }));
    expect(s.transcript[1].error).toBe(true);
  });

  test("channel errors fill the pending entry without an observation", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    echoCommand(s, "look");
    applyStepError(s, "play channel closed");
    expect(s.pending).toBe(false);
    expect(s.transcript[1]).toEqual({ command: "look", feedback: "play channel closed", error: true });
    expect(s.observation?.moves).toBe(0);
  });
});

describe("terminal transitions", () => {
  test("a done observation settles status and outcome", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    echoCommand(s, "take melon");
    applyResult(s, makeObservation({ feedback: "*** You have won! ***", done: true, won: true, score: 1 }));
    expect(s.status).toBe("done");
    expect(s.outcome).toBe("won");
  });

  test("a pushed game_over event settles the outcome too", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation());
    applyGameOver(s, "lost");
    expect(s.status).toBe("done");
    expect(s.outcome).toBe("lost");
  });
});

describe("derived panels", () => {
  test("choice mode mirrors the admissible command list", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "choice", makeObservation({ admissible_commands: ["go south", "look"] }));
    expect(s.choices).toEqual(["go south", "look"]);
    echoCommand(s, "go south");
    applyResult(s, makeObservation({ admissible_commands: ["go north", "look"] }));
    expect(s.choices).toEqual(["go north", "look"]);
  });

  test("parser mode keeps the choice list empty", () => {
    const s = createUiState();
    sessionCreated(s, "s1", "parser", makeObservation({ admissible_commands: ["go south"] }));
    expect(s.choices).toEqual([]);
  });

  test("inventory ids come from in(x,I) atoms only", () => {
    const obs = makeObservation({
      full_state: ["at(P,r_0)", "in(f_1,I)", "in(f_0,c_0)", "in(k_0,I)", "on(f_2,s_0)"],
    });
    expect(inventoryIds(obs)).toEqual(["f_1", "k_0"]);
    expect(inventoryIds(makeObservation())).toEqual([]);
    expect(inventoryIds(null)).toEqual([]);
  });

  test("map availability follows the snapshot", () => {
    const s = createUiState();
    setMap(s, null);
    expect(s.mapAvailable).toBe(false);
    setMap(s, {
      protocol_version: 1,
      rooms: [{ id: "r_0", name: "hall", x: 0, y: 0 }],
      exits: [],
      objects: [],
      player_room: "r_0",
      target: null,
      target_room: null,
    });
    expect(s.mapAvailable).toBe(true);
  });
});
