// Wires the view to the session service: create a session over HTTP, play
// over the WebSocket channel, refresh the map when it is observable. One
// session per page, at most one step in flight.

import { browserSocketFactory, PlayChannel, SessionApi, type SocketFactory } from "./api.js";
import {
  applyGameOver,
  applyResult,
  applyStepError,
  beginConnect,
  connectFailed,
  createUiState,
  echoCommand,
  sessionCreated,
  setMap,
  type UiSessionState,
} from "./state.js";
import { View, type CreateFormValues } from "./view.js";

export interface AppOptions {
  fetchImpl?: typeof fetch;
  socketFactory?: SocketFactory;
}

export class App {
  readonly state: UiSessionState = createUiState();

  private readonly view: View;
  private readonly fetchImpl: typeof fetch;
  private readonly socketFactory: SocketFactory;
  private api: SessionApi | null = null;
  private channel: PlayChannel | null = null;
  private sessionId: string | null = null;
  private lastForm: CreateFormValues | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.fetchImpl = options.fetchImpl ?? globalThis.fetch.bind(globalThis);
    this.socketFactory = options.socketFactory ?? browserSocketFactory;
    this.view = new View(root, {
      onCreate: (form) => void this.create(form),
      onSubmit: (text) => void this.submit(text),
      onChoice: (index) => void this.submit(index),
      onRetry: () => void (this.lastForm && this.create(this.lastForm)),
    });
    this.view.render(this.state);
  }

  async create(form: CreateFormValues): Promise<void> {
    this.lastForm = form;
    this.channel?.close();
    this.channel = null;

    beginConnect(this.state);
    this.view.render(this.state);

    try {
      this.api = new SessionApi(form.server, this.fetchImpl);
      const created = await this.api.createSession({
        level: form.level,
        seed: form.seed,
        config: form.config,
        debug: form.debug,
      });
      this.sessionId = created.session_id;

      const channel = await PlayChannel.open(this.api.playUrl(created.session_id), this.socketFactory);
      channel.onEvent = (ev) => {
        if (ev.event === "game_over") {
          applyGameOver(this.state, ev.outcome);
          this.view.render(this.state);
        }
      };
      this.channel = channel;

      sessionCreated(this.state, created.session_id, form.mode, created.observation);
      await this.refreshMap();
    } catch (err) {
      connectFailed(this.state, describe(err));
    }
    this.view.render(this.state);
  }

  async submit(input: string | number): Promise<void> {
    if (!this.channel || this.state.status !== "live" || this.state.pending) return;
    const command = typeof input === "number" ? this.state.choices[input] : input;
    if (command === undefined) return;

    echoCommand(this.state, command);
    this.view.render(this.state);

    try {
      const result = await this.channel.step(input);
      applyResult(this.state, result.observation);
      if (this.state.mapAvailable) await this.refreshMap();
    } catch (err) {
      applyStepError(this.state, describe(err));
    }
    this.view.render(this.state);
  }

  private async refreshMap(): Promise<void> {
    if (!this.api || !this.sessionId) return;
    try {
      setMap(this.state, await this.api.fetchMap(this.sessionId));
    } catch {
      setMap(this.state, null);
    }
  }
}

export function createApp(root: HTMLElement, options: AppOptions = {}): App {
  return new App(root, options);
}

function describe(err: unknown): string {
  if (err instanceof Error && err.message) return err.message;
  return "the session service could not be reached";
}
