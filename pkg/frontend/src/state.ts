// Client-side session state. Every panel is derived from this struct, and
// this struct is only ever updated from server responses: the UI itself
// never decides what the game state is.

import type { MapSnapshot, Observation, PlayMode } from "./protocol.js";

export type ConnectionStatus = "idle" | "connecting" | "live" | "done" | "error";

export interface TranscriptEntry {
  command: string | null; // null for the welcome entry
  feedback: string | null; // null while the step is in flight
  error: boolean; // true when the command failed to parse
}

export interface UiSessionState {
  status: ConnectionStatus;
  errorText: string | null;
  sessionId: string | null;
  mode: PlayMode;
  transcript: TranscriptEntry[];
  observation: Observation | null;
  choices: string[];
  map: MapSnapshot | null;
  mapAvailable: boolean;
  pending: boolean;
  outcome: "won" | "lost" | null;
}

export function createUiState(): UiSessionState {
  return {
    status: "idle",
    errorText: null,
    sessionId: null,
    mode: "parser",
    transcript: [],
    observation: null,
    choices: [],
    map: null,
    mapAvailable: false,
    pending: false,
    outcome: null,
  };
}

export function beginConnect(state: UiSessionState): void {
  state.status = "connecting";
  state.errorText = null;
}

export function connectFailed(state: UiSessionState, message: string): void {
  state.status = "error";
  state.errorText = message;
}

export function sessionCreated(
  state: UiSessionState,
  sessionId: string,
  mode: PlayMode,
  observation: Observation,
): void {
  state.status = "live";
  state.errorText = null;
  state.sessionId = sessionId;
  state.mode = mode;
  state.transcript = [{ command: null, feedback: observation.feedback, error: false }];
  state.pending = false;
  state.outcome = null;
  state.map = null;
  state.mapAvailable = false;
  acknowledge(state, observation);
}

// Optimistic echo: the command shows up immediately, its feedback slot is
// filled when the server answers. At most one entry is ever in flight.
export function echoCommand(state: UiSessionState, command: string): void {
  state.transcript.push({ command, feedback: null, error: false });
  state.pending = true;
}

export function applyResult(state: UiSessionState, observation: Observation): void {
  const entry = inFlightEntry(state);
  if (entry) {
    entry.feedback = observation.feedback;
    entry.error = observation.error_kind !== undefined;
  }
  state.pending = false;
  acknowledge(state, observation);
}

export function applyStepError(state: UiSessionState, message: string): void {
  const entry = inFlightEntry(state);
  if (entry) {
    entry.feedback = message;
    entry.error = true;
  }
  state.pending = false;
}

export function applyGameOver(state: UiSessionState, outcome: "won" | "lost"): void {
  state.outcome = outcome;
  state.status = "done";
}

export function setMap(state: UiSessionState, snapshot: MapSnapshot | null): void {
  state.map = snapshot;
  state.mapAvailable = snapshot !== null;
}

// Object ids currently carried, read from the full_state atoms when the
// session exposes them ("in(<id>,I)").
export function inventoryIds(observation: Observation | null): string[] {
  if (!observation?.full_state) return [];
  const ids: string[] = [];
  for (const atom of observation.full_state) {
    const m = /^in\(([^,()]+),I\)$/.exec(atom);
    if (m) ids.push(m[1]);
  }
  return ids.sort();
}

function acknowledge(state: UiSessionState, observation: Observation): void {
  state.observation = observation;
  state.choices = state.mode === "choice" ? observation.admissible_commands ?? [] : [];
  if (observation.done) {
    state.status = "done";
    state.outcome = observation.won ? "won" : observation.lost ? "lost" : state.outcome;
  }
}

function inFlightEntry(state: UiSessionState): TranscriptEntry | null {
  const last = state.transcript[state.transcript.length - 1];
  return last && last.feedback === null ? last : null;
}
