// Wire types for the session service, protocol_version 1.
// Field names are snake_case because they mirror the JSON exactly.

export const PROTOCOL_VERSION = 1;

export interface Observation {
  feedback: string;
  description: string;
  score: number;
  moves: number;
  done: boolean;
  won: boolean;
  lost: boolean;
  error_kind?: string;
  objective?: string;
  admissible_commands?: string[];
  intermediate_reward?: number;
  winning_policy?: string[];
  full_state?: string[];
}

export type PlayMode = "parser" | "choice";

export interface SessionConfig {
  mode?: PlayMode;
  objective?: boolean;
  admissible_commands?: boolean;
  intermediate_reward?: boolean;
  winning_policy?: boolean;
  full_state?: boolean;
}

export interface CreateRequest {
  level?: number;
  preset?: string;
  rooms?: number;
  objects?: number;
  quest_length?: number;
  theme?: string;
  doors?: boolean;
  game?: unknown;
  seed?: number;
  config?: SessionConfig;
  debug?: boolean;
}

export interface CreateResponse {
  protocol_version: number;
  session_id: string;
  observation: Observation;
}

export interface SessionSummary {
  session_id: string;
  created_at: number;
  last_active: number;
  done: boolean;
  outcome: string;
  score: number;
  moves: number;
  debug: boolean;
}

export type DoorState = "open" | "closed" | "locked";

export interface MapDoor {
  id: string;
  name: string;
  state: DoorState;
}

export interface MapRoom {
  id: string;
  name: string;
  x: number;
  y: number;
}

export interface MapExit {
  from: string;
  dir: string;
  to: string;
  door: MapDoor | null;
}

export interface MapObject {
  id: string;
  name: string;
  type: string;
  holder: string;
  room: string | null;
}

export interface MapSnapshot {
  protocol_version: number;
  rooms: MapRoom[];
  exits: MapExit[];
  objects: MapObject[];
  player_room: string;
  target: string | null;
  target_room: string | null;
}

// Play-channel messages. Requests carry a correlation_id; every request
// yields exactly one response with the same id, and terminal steps are
// followed by one pushed game_over event.

export type StepInput = string | number;

export interface ResultMessage {
  kind: "result";
  correlation_id: string;
  observation: Observation;
  reward: number;
  done: boolean;
}

export interface ErrorMessage {
  kind: "error";
  code: string;
  message: string;
  correlation_id?: string;
}

export interface EventMessage {
  kind: "event";
  event: string;
  session_id: string;
  outcome: "won" | "lost";
}

export type ServerMessage = ResultMessage | ErrorMessage | EventMessage;

export function parseServerMessage(raw: unknown): ServerMessage | null {
  let doc: unknown;
  try {
    doc = typeof raw === "string" ? JSON.parse(raw) : JSON.parse(String(raw));
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const kind = (doc as { kind?: unknown }).kind;
  if (kind === "result" || kind === "error" || kind === "event") {
    return doc as ServerMessage;
  }
  return null;
}
