// DOM layer. Builds the page once, then re-renders panels from the state
// struct after every server response. No game logic lives here.

import { renderMap } from "./map.js";
import { inventoryIds, type UiSessionState } from "./state.js";
import type { PlayMode, SessionConfig } from "./protocol.js";

export interface CreateFormValues {
  server: string;
  level: number;
  seed: number;
  mode: PlayMode;
  debug: boolean;
  config: SessionConfig;
}

export interface ViewHandlers {
  onCreate(form: CreateFormValues): void;
  onSubmit(text: string): void;
  onChoice(index: number): void;
  onRetry(): void;
}

const FLAGS = [
  ["objective", "objective", true],
  ["admissible_commands", "commands", false],
  ["intermediate_reward", "reward", false],
  ["winning_policy", "policy", false],
  ["full_state", "state", false],
] as const;

export class View {
  private readonly handlers: ViewHandlers;

  private form!: HTMLFormElement;
  private server!: HTMLInputElement;
  private level!: HTMLInputElement;
  private seed!: HTMLInputElement;
  private mode!: HTMLSelectElement;
  private debug!: HTMLInputElement;
  private flags = new Map<string, HTMLInputElement>();

  private banner!: HTMLElement;
  private bannerText!: HTMLElement;
  private retry!: HTMLButtonElement;

  private game!: HTMLElement;
  private objective!: HTMLElement;
  private scoreline!: HTMLElement;
  private outcome!: HTMLElement;
  private transcript!: HTMLOListElement;
  private choices!: HTMLElement;
  private input!: HTMLInputElement;
  private send!: HTMLButtonElement;
  private inventory!: HTMLElement;
  private mapPanel!: HTMLElement;

  constructor(root: HTMLElement, handlers: ViewHandlers) {
    this.handlers = handlers;
    root.innerHTML = "";
    this.buildForm(root);
    this.buildBanner(root);
    this.buildGame(root);
  }

  render(state: UiSessionState): void {
    const connecting = state.status === "connecting";
    this.form.querySelectorAll("input, select, button").forEach((el) => {
      (el as HTMLInputElement).disabled = connecting;
    });

    this.banner.classList.toggle("hidden", state.status !== "error");
    this.bannerText.textContent = state.errorText ?? "";

    const inGame = state.status === "live" || state.status === "done";
    this.game.classList.toggle("hidden", !inGame);
    if (!inGame) return;

    const obs = state.observation;
    this.objective.textContent = obs?.objective ?? "";
    this.objective.classList.toggle("hidden", !obs?.objective);
    this.scoreline.textContent = obs ? `score ${obs.score} | moves ${obs.moves}` : "";

    this.renderTranscript(state);
    this.renderChoices(state);
    this.renderInventory(state);

    const playable = state.status === "live" && !state.pending;
    this.input.disabled = !playable || state.mode === "choice";
    this.send.disabled = !playable || state.mode === "choice";
    this.input.classList.toggle("hidden", state.mode === "choice");
    this.send.classList.toggle("hidden", state.mode === "choice");

    this.outcome.classList.toggle("hidden", state.outcome === null);
    this.outcome.className = `outcome ${state.outcome ?? ""}${state.outcome === null ? " hidden" : ""}`;
    this.outcome.textContent =
      state.outcome === "won" ? "You have won!" : state.outcome === "lost" ? "You have lost!" : "";

    this.mapPanel.classList.toggle("hidden", !state.mapAvailable);
    renderMap(this.mapPanel, state.mapAvailable ? state.map : null);

    if (playable && state.mode === "parser") this.input.focus();
  }

  private renderTranscript(state: UiSessionState): void {
    this.transcript.replaceChildren(
      ...state.transcript.map((entry) => {
        const li = document.createElement("li");
        li.className = entry.error ? "entry error" : "entry";
        if (entry.command !== null) {
          const cmd = document.createElement("span");
          cmd.className = "command";
          cmd.textContent = `> ${entry.command}`;
          li.appendChild(cmd);
        }
        const feedback = document.createElement("span");
        feedback.className = "feedback";
        feedback.textContent = entry.feedback ?? "…";
        li.appendChild(feedback);
        return li;
      }),
    );
    this.transcript.lastElementChild?.scrollIntoView?.({ block: "end" });
  }

  private renderChoices(state: UiSessionState): void {
    this.choices.replaceChildren();
    if (state.mode !== "choice") return;
    const active = state.status === "live" && !state.pending;
    state.choices.forEach((command, i) => {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "choice";
      button.textContent = `${i + 1}. ${command}`;
      button.disabled = !active;
      button.addEventListener("click", () => this.handlers.onChoice(i));
      this.choices.appendChild(button);
    });
  }

  private renderInventory(state: UiSessionState): void {
    const ids = inventoryIds(state.observation);
    this.inventory.classList.toggle("hidden", state.observation?.full_state === undefined);
    const names = new Map(state.map?.objects.map((o) => [o.id, o.name]) ?? []);
    this.inventory.replaceChildren();
    const title = document.createElement("h3");
    title.textContent = "Carrying";
    this.inventory.appendChild(title);
    if (ids.length === 0) {
      const empty = document.createElement("p");
      empty.textContent = "nothing";
      this.inventory.appendChild(empty);
      return;
    }
    const list = document.createElement("ul");
    for (const id of ids) {
      const li = document.createElement("li");
      li.textContent = names.get(id) ?? id;
      list.appendChild(li);
    }
    this.inventory.appendChild(list);
  }

  private buildForm(root: HTMLElement): void {
    this.form = document.createElement("form");
    this.form.id = "tw-form";
    this.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.handlers.onCreate(this.formValues());
    });

    this.server = this.field("tw-server", "server", "http://127.0.0.1:8000");
    this.level = this.field("tw-level", "level", "1");
    this.level.type = "number";
    this.seed = this.field("tw-seed", "seed", "0");
    this.seed.type = "number";

    this.mode = document.createElement("select");
    this.mode.id = "tw-mode";
    for (const mode of ["parser", "choice"]) {
      const option = document.createElement("option");
      option.value = mode;
      option.textContent = mode;
      this.mode.appendChild(option);
    }
    this.form.appendChild(this.labelled("mode", this.mode));

    this.debug = document.createElement("input");
    this.debug.type = "checkbox";
    this.debug.id = "tw-debug";
    this.form.appendChild(this.labelled("map (debug)", this.debug));

    for (const [key, label, checked] of FLAGS) {
      const box = document.createElement("input");
      box.type = "checkbox";
      box.id = `tw-flag-${key}`;
      box.checked = checked;
      this.flags.set(key, box);
      this.form.appendChild(this.labelled(label, box));
    }

    const create = document.createElement("button");
    create.type = "submit";
    create.id = "tw-create";
    create.textContent = "Start game";
    this.form.appendChild(create);

    root.appendChild(this.form);
  }

  private buildBanner(root: HTMLElement): void {
    this.banner = document.createElement("div");
    this.banner.id = "tw-banner";
    this.banner.className = "banner hidden";
    this.bannerText = document.createElement("span");
    this.banner.appendChild(this.bannerText);
    this.retry = document.createElement("button");
    this.retry.type = "button";
    this.retry.id = "tw-retry";
    this.retry.textContent = "Retry";
    this.retry.addEventListener("click", () => this.handlers.onRetry());
    this.banner.appendChild(this.retry);
    root.appendChild(this.banner);
  }

  private buildGame(root: HTMLElement): void {
    this.game = document.createElement("main");
    this.game.id = "tw-game";
    this.game.className = "hidden";

    const left = document.createElement("section");
    left.className = "play";

    this.objective = document.createElement("p");
    this.objective.id = "tw-objective";
    left.appendChild(this.objective);

    this.outcome = document.createElement("div");
    this.outcome.id = "tw-outcome";
    this.outcome.className = "outcome hidden";
    left.appendChild(this.outcome);

    this.transcript = document.createElement("ol");
    this.transcript.id = "tw-transcript";
    left.appendChild(this.transcript);

    this.choices = document.createElement("div");
    this.choices.id = "tw-choices";
    left.appendChild(this.choices);

    const entry = document.createElement("div");
    entry.className = "entry-row";
    this.input = document.createElement("input");
    this.input.id = "tw-input";
    this.input.autocomplete = "off";
    this.input.placeholder = "type a command";
    this.input.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        ev.preventDefault();
        this.submitText();
      }
    });
    this.send = document.createElement("button");
    this.send.type = "button";
    this.send.id = "tw-send";
    this.send.textContent = "Send";
    this.send.addEventListener("click", () => this.submitText());
    entry.appendChild(this.input);
    entry.appendChild(this.send);
    left.appendChild(entry);

    const side = document.createElement("aside");
    side.className = "side";
    this.scoreline = document.createElement("p");
    this.scoreline.id = "tw-scoreline";
    side.appendChild(this.scoreline);
    this.inventory = document.createElement("div");
    this.inventory.id = "tw-inventory";
    this.inventory.className = "hidden";
    side.appendChild(this.inventory);
    this.mapPanel = document.createElement("div");
    this.mapPanel.id = "tw-map";
    this.mapPanel.className = "hidden";
    side.appendChild(this.mapPanel);

    this.game.appendChild(left);
    this.game.appendChild(side);
    root.appendChild(this.game);
  }

  private submitText(): void {
    if (this.input.disabled) return;
    const text = this.input.value.trim();
    if (!text) return;
    this.input.value = "";
    this.handlers.onSubmit(text);
  }

  private formValues(): CreateFormValues {
    const config: SessionConfig = { mode: this.mode.value as PlayMode };
    for (const [key, box] of this.flags) {
      (config as Record<string, unknown>)[key] = box.checked;
    }
    return {
      server: this.server.value.trim(),
      level: Number(this.level.value),
      seed: Number(this.seed.value),
      mode: this.mode.value as PlayMode,
      debug: this.debug.checked,
      config,
    };
  }

  private field(id: string, label: string, value: string): HTMLInputElement {
    const input = document.createElement("input");
    input.id = id;
    input.value = value;
    this.form.appendChild(this.labelled(label, input));
    return input;
  }

  private labelled(text: string, control: HTMLElement): HTMLLabelElement {
    const label = document.createElement("label");
    const span = document.createElement("span");
    span.textContent = text;
    label.appendChild(span);
    label.appendChild(control);
    return label;
  }
}
