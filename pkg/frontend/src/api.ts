// HTTP + WebSocket clients for the session service. Both take injectable
// transports so tests can run against fakes and node sockets alike.

import {
  parseServerMessage,
  type CreateRequest,
  type CreateResponse,
  type EventMessage,
  type MapSnapshot,
  type ResultMessage,
  type SessionSummary,
  type StepInput,
} from "./protocol.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorFrom(res: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `HTTP ${res.status}`;
  try {
    const doc = (await res.json()) as { error?: { code?: string; message?: string } };
    if (doc.error?.code) code = doc.error.code;
    if (doc.error?.message) message = doc.error.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(res.status, code, message);
}

export class SessionApi {
  private readonly base: string;
  private readonly fetchImpl: typeof fetch;

  constructor(baseUrl: string, fetchImpl: typeof fetch = globalThis.fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  async createSession(req: CreateRequest): Promise<CreateResponse> {
    const res = await this.fetchImpl(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!res.ok) throw await errorFrom(res);
    return (await res.json()) as CreateResponse;
  }

  async listSessions(): Promise<SessionSummary[]> {
    const res = await this.fetchImpl(`${this.base}/sessions`);
    if (!res.ok) throw await errorFrom(res);
    const doc = (await res.json()) as { sessions: SessionSummary[] };
    return doc.sessions;
  }

  async destroySession(sessionId: string): Promise<void> {
    const res = await this.fetchImpl(`${this.base}/sessions/${sessionId}`, { method: "DELETE" });
    if (!res.ok) throw await errorFrom(res);
  }

  // null means the map is not observable for this session (403); that is a
  // normal outcome, not an error, and the caller hides the panel.
  async fetchMap(sessionId: string): Promise<MapSnapshot | null> {
    const res = await this.fetchImpl(`${this.base}/sessions/${sessionId}/map`);
    if (res.status === 403) return null;
    if (!res.ok) throw await errorFrom(res);
    return (await res.json()) as MapSnapshot;
  }

  playUrl(sessionId: string): string {
    return `${this.base.replace(/^http/, "ws")}/sessions/${sessionId}/play`;
  }
}

// Minimal socket surface shared by browser WebSocket and the ws package.
export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export const browserSocketFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

interface Waiter {
  resolve: (msg: ResultMessage) => void;
  reject: (err: Error) => void;
}

export class PlayChannel {
  onEvent: ((ev: EventMessage) => void) | null = null;
  onClose: (() => void) | null = null;

  private counter = 0;
  private waiters = new Map<string, Waiter>();
  private closed = false;

  private constructor(private readonly socket: SocketLike) {}

  static open(url: string, factory: SocketFactory = browserSocketFactory): Promise<PlayChannel> {
    return new Promise((resolve, reject) => {
      const socket = factory(url);
      const channel = new PlayChannel(socket);
      socket.onopen = () => {
        socket.onerror = null;
        channel.listen();
        resolve(channel);
      };
      socket.onerror = () => reject(new Error(`could not open play channel at ${url}`));
    });
  }

  step(input: StepInput): Promise<ResultMessage> {
    return this.request({ kind: "step", input });
  }

  state(): Promise<ResultMessage> {
    return this.request({ kind: "state" });
  }

  close(): void {
    this.closed = true;
    this.socket.close();
  }

  private request(body: { kind: string; input?: StepInput }): Promise<ResultMessage> {
    if (this.closed) return Promise.reject(new Error("play channel is closed"));
    const correlation_id = `c${++this.counter}`;
    return new Promise((resolve, reject) => {
      this.waiters.set(correlation_id, { resolve, reject });
      this.socket.send(JSON.stringify({ ...body, correlation_id }));
    });
  }

  private listen(): void {
    this.socket.onmessage = (ev) => this.dispatch(ev.data);
    this.socket.onclose = () => {
      this.closed = true;
      const err = new Error("play channel closed");
      for (const waiter of this.waiters.values()) waiter.reject(err);
      this.waiters.clear();
      this.onClose?.();
    };
    this.socket.onerror = null;
  }

  private dispatch(data: unknown): void {
    const msg = parseServerMessage(data);
    if (!msg) return;
    if (msg.kind === "event") {
      this.onEvent?.(msg);
      return;
    }
    const id = msg.correlation_id;
    const waiter = id === undefined ? undefined : this.waiters.get(id);
    if (!waiter) return;
    this.waiters.delete(id as string);
    if (msg.kind === "result") {
      waiter.resolve(msg);
    } else {
      waiter.reject(new ApiError(0, msg.code, msg.message));
    }
  }
}
