// Shared test plumbing: a scripted stand-in for the session service that
// speaks the same wire shapes over a fake fetch and a fake socket.

import type { SocketLike } from "../src/api.js";
import type { Observation } from "../src/protocol.js";

export async function waitFor(cond: () => boolean, ms = 5000): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > ms) throw new Error("condition not met in time");
    await new Promise((resolve) => setTimeout(resolve, 15));
  }
}

export function jsonResponse(status: number, doc: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => doc,
  } as unknown as Response;
}

export function makeObservation(over: Partial<Observation> = {}): Observation {
  return {
    feedback: "Welcome.",
    description: "This is a room.",
    score: 0,
    moves: 0,
    done: false,
    won: false,
    lost: false,
    ...over,
  };
}

export class FakeSocket implements SocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  sent: string[] = [];
  private respond: ((raw: string) => void) | null = null;

  constructor(onSend?: (socket: FakeSocket, message: Record<string, unknown>) => void) {
    if (onSend) this.respond = (raw) => onSend(this, JSON.parse(raw) as Record<string, unknown>);
    queueMicrotask(() => this.onopen?.());
  }

  send(data: string): void {
    this.sent.push(data);
    this.respond?.(data);
  }

  close(): void {
    this.onclose?.();
  }

  push(message: unknown): void {
    this.onmessage?.({ data: JSON.stringify(message) });
  }

  lastSent(): Record<string, unknown> {
    return JSON.parse(this.sent[this.sent.length - 1]) as Record<string, unknown>;
  }
}

export function resultFor(
  request: Record<string, unknown>,
  observation: Observation,
): Record<string, unknown> {
  return {
    protocol_version: 1,
    kind: "result",
    correlation_id: request.correlation_id,
    observation,
    reward: 0,
    done: observation.done,
  };
}
