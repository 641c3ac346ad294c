import { beforeEach, describe, expect, test } from "vitest";

import { App } from "../src/app.js";
import type { CreateFormValues } from "../src/view.js";
import type { MapSnapshot, Observation } from "../src/protocol.js";
import { FakeSocket, jsonResponse, makeObservation, resultFor, waitFor } from "./helpers.js";

const SNAPSHOT: MapSnapshot = {
  protocol_version: 1,
  rooms: [
    { id: "r_0", name: "hallway", x: 0, y: 1 },
    { id: "r_1", name: "pantry", x: 0, y: 0 },
  ],
  exits: [
    { from: "r_0", dir: "south", to: "r_1", door: null },
    { from: "r_1", dir: "north", to: "r_0", door: null },
  ],
  objects: [{ id: "f_0", name: "plain melon", type: "f", holder: "r_1", room: "r_1" }],
  player_room: "r_0",
  target: "f_0",
  target_room: "r_1",
};

interface Script {
  welcome?: Observation;
  mapAllowed?: boolean;
  failCreates?: number;
  onStep?: (socket: FakeSocket, req: Record<string, unknown>) => void;
}

function mount(script: Script = {}) {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const welcome = script.welcome ?? makeObservation({ feedback: "Welcome to the hall.", objective: "Take the melon." });
  let createsToFail = script.failCreates ?? 0;
  const sockets: FakeSocket[] = [];

  const fetchImpl: typeof fetch = async (url, init) => {
    const path = String(url);
    if (path.endsWith("/sessions") && init?.method === "POST") {
      if (createsToFail > 0) {
        createsToFail -= 1;
        throw new TypeError("fetch failed");
      }
      return jsonResponse(200, { protocol_version: 1, session_id: "s1", observation: welcome });
    }
    if (path.endsWith("/map")) {
      return script.mapAllowed
        ? jsonResponse(200, SNAPSHOT)
        : jsonResponse(403, { error: { code: "observability_denied", message: "denied" } });
    }
    return jsonResponse(404, { error: { code: "unknown", message: path } });
  };

  const app = new App(root, {
    fetchImpl,
    socketFactory: () => {
      const socket = new FakeSocket((s, req) => {
        if (req.kind === "step") script.onStep?.(s, req);
      });
      sockets.push(socket);
      return socket;
    },
  });

  const el = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;
  const form = (over: Partial<CreateFormValues> = {}): CreateFormValues => ({
    server: "http://fake:1",
    level: 1,
    seed: 0,
    mode: "parser",
    debug: false,
    config: { mode: "parser", objective: true },
    ...over,
  });
  return { app, root, el, form, sockets };
}

describe("create", () => {
  test("welcome, objective and score line render after a successful create", async () => {
    const { app, el, form } = mount();
    await app.create(form());
    expect(app.state.status).toBe("live");
    expect(el("tw-game").classList.contains("hidden")).toBe(false);
    expect(el("tw-objective").textContent).toBe("Take the melon.");
    expect(el("tw-scoreline").textContent).toBe("score 0 | moves 0");
    const entries = el("tw-transcript").querySelectorAll("li");
    expect(entries).toHaveLength(1);
    expect(entries[0].textContent).toContain("Welcome to the hall.");
    expect(el<HTMLInputElement>("tw-input").disabled).toBe(false);
  });

  test("a failed create shows the error banner; retry reconnects", async () => {
    const { app, el, form } = mount({ failCreates: 1 });
    await app.create(form());
    expect(app.state.status).toBe("error");
    expect(el("tw-banner").classList.contains("hidden")).toBe(false);
    expect(el("tw-banner").textContent).toContain("fetch failed");
    expect(el("tw-game").classList.contains("hidden")).toBe(true);

    el("tw-retry").click();
    await waitFor(() => app.state.status === "live");
    expect(el("tw-banner").classList.contains("hidden")).toBe(true);
    expect(el("tw-transcript").textContent).toContain("Welcome to the hall.");
  });

  test("the form posts exactly what its fields say", async () => {
    const bodies: unknown[] = [];
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    new App(root, {
      fetchImpl: async (url, init) => {
        if (String(url).endsWith("/sessions") && init?.method === "POST") {
          bodies.push(JSON.parse(String(init.body)));
          return jsonResponse(200, { protocol_version: 1, session_id: "s1", observation: makeObservation() });
        }
        return jsonResponse(403, { error: { code: "observability_denied", message: "denied" } });
      },
      socketFactory: () => new FakeSocket(),
    });

    (document.getElementById("tw-server") as HTMLInputElement).value = "http://fake:1";
    (document.getElementById("tw-level") as HTMLInputElement).value = "7";
    (document.getElementById("tw-seed") as HTMLInputElement).value = "42";
    (document.getElementById("tw-mode") as HTMLSelectElement).value = "choice";
    (document.getElementById("tw-debug") as HTMLInputElement).checked = true;
    (document.getElementById("tw-flag-winning_policy") as HTMLInputElement).checked = true;
    document.getElementById("tw-create")!.click();

    await waitFor(() => bodies.length === 1);
    expect(bodies[0]).toEqual({
      level: 7,
      seed: 42,
      debug: true,
      config: {
        mode: "choice",
        objective: true,
        admissible_commands: false,
        intermediate_reward: false,
        winning_policy: true,
        full_state: false,
      },
    });
  });
});

describe("stepping", () => {
  test("parser errors get error styling and leave the score untouched", async () => {
    const { app, el, form } = mount({
      onStep: (socket, req) =>
        socket.push(
          resultFor(req, makeObservation({ feedback: "That verb is not understood.", error_kind: "unknown_verb", moves: 1 })),
        ),
    });
    await app.create(form());
    await app.submit("blarg the melon");

    const entry = el("tw-transcript").querySelector("li.entry.error");
    expect(entry).not.toBeNull();
    expect(entry!.textContent).toContain("> blarg the melon");
    expect(entry!.textContent).toContain("That verb is not understood.");
    expect(el("tw-scoreline").textContent).toBe("score 0 | moves 1");
    expect(el("tw-outcome").classList.contains("hidden")).toBe(true);
  });

  test("input locks while a step is in flight and unlocks on the result", async () => {
    let held: { socket: FakeSocket; req: Record<string, unknown> } | null = null;
    const { app, el, form, sockets } = mount({ onStep: (socket, req) => (held = { socket, req }) });
    await app.create(form());

    const inFlight = app.submit("look");
    expect(el<HTMLInputElement>("tw-input").disabled).toBe(true);
    expect(el<HTMLButtonElement>("tw-send").disabled).toBe(true);

    await app.submit("look"); // ignored: one request at a time
    expect(sockets[0].sent).toHaveLength(1);

    held!.socket.push(resultFor(held!.req, makeObservation({ feedback: "Nothing new.", moves: 1 })));
    await inFlight;
    expect(el<HTMLInputElement>("tw-input").disabled).toBe(false);
    expect(app.state.pending).toBe(false);
  });

  test("a won result renders the banner and stops further requests", async () => {
    const { app, el, form, sockets } = mount({
      onStep: (socket, req) => {
        socket.push(resultFor(req, makeObservation({ feedback: "*** You have won! ***", done: true, won: true, score: 1 })));
        socket.push({ protocol_version: 1, kind: "event", event: "game_over", session_id: "s1", outcome: "won" });
      },
    });
    await app.create(form());
    await app.submit("take melon");

    const outcome = el("tw-outcome");
    expect(outcome.classList.contains("hidden")).toBe(false);
    expect(outcome.classList.contains("won")).toBe(true);
    expect(outcome.textContent).toBe("You have won!");
    expect(el<HTMLInputElement>("tw-input").disabled).toBe(true);

    await app.submit("look"); // done: nothing may reach the wire
    expect(sockets[0].sent).toHaveLength(1);
  });

  test("a typed Enter submits through the input box", async () => {
    const { app, el, form, sockets } = mount({
      onStep: (socket, req) => socket.push(resultFor(req, makeObservation({ feedback: "ok", moves: 1 }))),
    });
    await app.create(form());

    const input = el<HTMLInputElement>("tw-input");
    input.value = "go south";
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", bubbles: true }));
    await waitFor(() => sockets[0].sent.length === 1);
    expect(JSON.parse(sockets[0].sent[0]).input).toBe("go south");
    await waitFor(() => !app.state.pending);
    expect(el("tw-transcript").textContent).toContain("> go south");
  });
});

describe("choice mode", () => {
  test("admissible commands render as numbered buttons that step by index", async () => {
    const welcome = makeObservation({
      feedback: "Welcome.",
      admissible_commands: ["go south", "take plain melon", "look"],
    });
    const { app, el, form, sockets } = mount({
      welcome,
      onStep: (socket, req) => {
        expect(req.input).toBe(1);
        socket.push(resultFor(req, makeObservation({ feedback: "*** You have won! ***", done: true, won: true, score: 1 })));
      },
    });
    await app.create(form({ mode: "choice", config: { mode: "choice" } }));

    expect(el("tw-input").classList.contains("hidden")).toBe(true);
    const buttons = [...el("tw-choices").querySelectorAll("button")];
    expect(buttons.map((b) => b.textContent)).toEqual(["1. go south", "2. take plain melon", "3. look"]);

    buttons[1].click();
    await waitFor(() => app.state.status === "done");
    expect(JSON.parse(sockets[0].sent[0]).input).toBe(1);
    expect(el("tw-transcript").textContent).toContain("> take plain melon");
    expect(el("tw-outcome").classList.contains("won")).toBe(true);
  });
});

describe("side panels", () => {
  test("the map panel appears only when the service serves the snapshot", async () => {
    const shown = mount({ mapAllowed: true });
    await shown.app.create(shown.form({ debug: true }));
    expect(shown.el("tw-map").classList.contains("hidden")).toBe(false);
    expect(shown.el("tw-map").querySelector(".map-room.player")?.getAttribute("data-room")).toBe("r_0");

    const hidden = mount({ mapAllowed: false });
    await hidden.app.create(hidden.form());
    expect(hidden.el("tw-map").classList.contains("hidden")).toBe(true);
    expect(hidden.el("tw-map").querySelector("svg")).toBeNull();
  });

  test("the inventory panel lists carried object ids from full_state", async () => {
    const welcome = makeObservation({ full_state: ["at(P,r_0)", "in(k_0,I)"] });
    const { app, el, form } = mount({ welcome });
    await app.create(form());
    const inventory = el("tw-inventory");
    expect(inventory.classList.contains("hidden")).toBe(false);
    expect(inventory.textContent).toContain("k_0");
  });

  test("the inventory panel stays hidden without full_state", async () => {
    const { app, el, form } = mount();
    await app.create(form());
    expect(el("tw-inventory").classList.contains("hidden")).toBe(true);
  });
});
