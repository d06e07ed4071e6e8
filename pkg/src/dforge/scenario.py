"""Line-oriented scenario configuration.

Schema (sections in square brackets, '#' starts a comment)::

    [levels]    comma/whitespace separated level labels, e.g.  g, r, e
    [channels]  one per line:  coupling_symbol : expression [@ delta]
    [params]    symbol = float   (angular frequencies, 1/s); must bind "delta"
    [space]     n_max = int
    [state]     initial = level,n   or   level,coherent(alpha)
    [time]      t_end = float ; samples = int

Unknown sections are rejected.  Every symbol used by a channel expression or
as a coupling symbol must be bound in [params].  A channel line may name its
detuning explicitly with "@ delta"; any other detuning symbol is rejected,
since the derivation assumes one shared detuning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import TimeGrid
from .effective import Channel, ChannelSpec
from .errors import (
    MissingKey,
    NonPositiveTruncation,
    ParseError,
    UnboundParameter,
    UnknownSection,
)
from .parsing import parse_operator_expr
from .spaces import SpaceSpec, build_state

__all__ = ["Scenario", "parse_scenario"]

_SECTIONS = ("levels", "channels", "params", "space", "state", "time")

#: config key carrying the common detuning (also its symbol name in expressions)
DELTA_KEY = "delta"


@dataclass(frozen=True)
class Scenario:
    levels: tuple[str, ...]
    spec: ChannelSpec
    params: dict[str, float]
    n_max: int
    initial: str
    t_end: float
    samples: int

    def space(self) -> SpaceSpec:
        return SpaceSpec(levels=self.levels, n_max=self.n_max)

    def grid(self) -> TimeGrid:
        return TimeGrid(t_end=self.t_end, samples=self.samples)

    def initial_state(self, space: SpaceSpec | None = None):
        return build_state(self.initial, space or self.space())


def _strip(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.strip()


def parse_scenario(config_text: str) -> Scenario:
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in config_text.splitlines():
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise UnknownSection(name)
            current = name
            sections.setdefault(name, [])
            continue
        if current is None:
            raise ParseError(0, "section header before content")
        sections[current].append(line)

    for required in ("levels", "channels", "params", "space", "state", "time"):
        if required not in sections:
            raise MissingKey(f"[{required}]")

    levels: list[str] = []
    for line in sections["levels"]:
        for tok in line.replace(",", " ").split():
            levels.append(tok)
    if len(levels) < 2:
        raise MissingKey("levels")

    def kv(section: str) -> dict[str, str]:
        out = {}
        for line in sections[section]:
            if "=" not in line:
                raise ParseError(0, f"key=value line in [{section}]")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
        return out

    params_raw = kv("params")
    if DELTA_KEY not in params_raw:
        raise MissingKey(DELTA_KEY)
    params = {k: float(v) for k, v in params_raw.items()}

    channels: list[Channel] = []
    used_symbols: set[str] = set()
    for line in sections["channels"]:
        if ":" not in line:
            raise ParseError(0, "'symbol : expression' line in [channels]")
        sym, _, expr_text = line.partition(":")
        sym = sym.strip()
        expr_text = expr_text.strip()
        # optional per-channel detuning tag: "expr @ symbol"
        if "@" in expr_text:
            expr_text, _, det = expr_text.partition("@")
            expr_text = expr_text.strip()
            if det.strip() != DELTA_KEY:
                raise ParseError(0, "common detuning required")
        expr = parse_operator_expr(expr_text, levels)
        channels.append(Channel.from_symbol(sym, expr))
        used_symbols.add(sym)
        used_symbols.update(expr.symbols())
    if not channels:
        raise MissingKey("channels")

    for sym in sorted(used_symbols):
        if sym not in params:
            raise UnboundParameter(sym)

    space_kv = kv("space")
    if "n_max" not in space_kv:
        raise MissingKey("n_max")
    n_max = int(space_kv["n_max"])
    if n_max < 1:
        raise NonPositiveTruncation(n_max)

    state_kv = kv("state")
    if "initial" not in state_kv:
        raise MissingKey("initial")

    time_kv = kv("time")
    for key in ("t_end", "samples"):
        if key not in time_kv:
            raise MissingKey(key)

    scenario = Scenario(
        levels=tuple(levels),
        spec=ChannelSpec(channels=tuple(channels), delta=DELTA_KEY),
        params=params,
        n_max=n_max,
        initial=state_kv["initial"],
        t_end=float(time_kv["t_end"]),
        samples=int(time_kv["samples"]),
    )
    # fail fast on malformed state descriptors
    scenario.initial_state()
    return scenario
