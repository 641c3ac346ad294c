"""Step/reset environment facade over game sessions.

Wraps a Session in an episodic interface: observations filtered down to the
requested information channels, reward as score delta, and a choice mode
where the agent picks from the admissible command list instead of typing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .engine import GameDefinition, Session, StepResult, load_game

UNSUPPORTED_SUFFIXES = (".z5", ".z8", ".ulx", ".zblorb")


class UnsupportedFormat(Exception):
    """A game file in a format this environment cannot drive."""


@dataclass(frozen=True)
class EnvConfig:
    mode: str = "parser"  # parser | choice
    objective: bool = False
    admissible_commands: bool = False
    intermediate_reward: bool = False
    winning_policy: bool = False
    full_state: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ("parser", "choice"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class Observation:
    feedback: str
    description: str
    score: int
    moves: int
    done: bool
    won: bool
    lost: bool
    error_kind: str | None = None
    objective: str | None = None
    admissible_commands: list[str] | None = None
    intermediate_reward: int | None = None
    winning_policy: list[str] | None = None
    full_state: list[str] | None = None


class Env:
    def __init__(self, game: GameDefinition | str | Path, config: EnvConfig | None = None):
        if isinstance(game, (str, Path)):
            path = Path(game)
            if path.suffix in UNSUPPORTED_SUFFIXES:
                raise UnsupportedFormat(
                    f"{path.suffix} story files are not supported; use .twg.json"
                )
            game = load_game(path)
        self.config = config or EnvConfig()
        self.session = Session(game)
        self._last_score = 0
        self._last_admissible: list[str] = []

    # -- episodic interface -------------------------------------------------

    def reset(self) -> Observation:
        result = self.session.reset()
        self._last_score = result.score
        self._last_admissible = result.admissible_commands
        return self._observe(result)

    def step(self, command: str) -> tuple[Observation, int, bool]:
        result = self.session.step(command)
        reward = result.score - self._last_score
        self._last_score = result.score
        self._last_admissible = result.admissible_commands
        return self._observe(result), reward, result.done

    def step_choice(self, index: int) -> tuple[Observation, int, bool]:
        """Act by picking from the last admissible command list."""
        if self.config.mode != "choice":
            raise ValueError("step_choice requires choice mode")
        commands = self._last_admissible
        if not 0 <= index < len(commands):
            raise IndexError(f"choice {index} out of range 0..{len(commands) - 1}")
        return self.step(commands[index])

    def _observe(self, result: StepResult) -> Observation:
        cfg = self.config
        show_admissible = cfg.admissible_commands or cfg.mode == "choice"
        return Observation(
            feedback=result.feedback,
            description=result.description,
            score=result.score,
            moves=result.moves,
            done=result.done,
            won=result.won,
            lost=result.lost,
            error_kind=result.error_kind,
            objective=result.objective if cfg.objective else None,
            admissible_commands=result.admissible_commands if show_admissible else None,
            intermediate_reward=result.intermediate_reward if cfg.intermediate_reward else None,
            winning_policy=result.winning_policy if cfg.winning_policy else None,
            full_state=result.full_state if cfg.full_state else None,
        )
