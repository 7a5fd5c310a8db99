"""Experiment configuration: a flat INI file with typed, validated sections.

The flat key-value format (rather than positional flags) keeps experiment
archives reproducible: a config file plus the package version pins a run.
Every key has a default mirroring the reference recall protocol (field sweep
from 2^-5 to 1.2 in 2^-5 steps, 100 shots per point), so a minimal config
only names the memory file and the probe.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

import numpy as np

from .hopfield import MemorySet, parse_spin_string
from .ising import ProbeSpec

__all__ = ["ConfigError", "ExperimentConfig"]

SWEEP_STEP_DEFAULT = 2.0**-5


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration."""


def _find_line(path: Path | None, section: str, key: str) -> str:
    """Locate 'key' under '[section]' for line-precise error messages."""
    if path is None or not path.exists():
        return ""
    current = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].strip() == key:
            return f"{path}:{lineno}: "
    return f"{path}: "


@dataclass
class ExperimentConfig:
    """All knobs of one experiment; see the module docstring for the file format."""

    # [network]
    memories_path: Path | None = None
    # [probe]
    probe_pattern: str | None = None
    probe_from_memory: int | None = None
    probe_flips: int | None = None
    probe_flip_seed: int = 0
    probe_mask: tuple[int, ...] | None = None
    h: float = 0.5
    # [recall]
    engine: str = "oracle"
    seed: int = 0
    shots: int = 100
    majority_vote: bool = False
    # [sweep]
    sweep_start: float = SWEEP_STEP_DEFAULT
    sweep_stop: float = 1.2
    sweep_step: float = SWEEP_STEP_DEFAULT
    # [qa]
    qa_t_anneal: float = 100.0
    qa_steps: int = 2000
    qa_schedule_a: Path | None = None
    qa_schedule_b: Path | None = None
    qa_gap_grid: int = 64
    # [sa]
    sa_t_initial: float = 10.0
    sa_t_final: float = 0.05
    sa_sweeps: int = 1000
    sa_restarts: int = 100
    sa_interpolation: str = "geometric"
    # [capacity]
    capacity_n_max: int = 64
    capacity_tradeoff_points: int = 10
    capacity_montecarlo: bool = False
    # [montecarlo]
    mc_n: int = 12
    mc_p: tuple[int, ...] = (2, 3, 4)
    mc_t_frac: float = 0.25
    mc_trials: int = 200
    mc_seed: int = 1
    mc_engine: str = "oracle"
    # [embed]
    embed_m: int = 1
    embed_missing: tuple[int, ...] = ()
    embed_n_logical: int | None = None
    embed_solve: bool = False
    # [output]
    output_dir: Path = field(default_factory=lambda: Path("."))
    plots: bool = True

    source_path: Path | None = field(default=None, compare=False)

    # (section, key) -> (attribute, parser); the layout of the INI file.
    _SCHEMA = {
        ("network", "memories"): ("memories_path", "path"),
        ("probe", "pattern"): ("probe_pattern", "str"),
        ("probe", "from_memory"): ("probe_from_memory", "int"),
        ("probe", "flips"): ("probe_flips", "int"),
        ("probe", "flip_seed"): ("probe_flip_seed", "int"),
        ("probe", "mask"): ("probe_mask", "int_tuple"),
        ("probe", "h"): ("h", "float"),
        ("recall", "engine"): ("engine", "str"),
        ("recall", "seed"): ("seed", "int"),
        ("recall", "shots"): ("shots", "int"),
        ("recall", "majority_vote"): ("majority_vote", "bool"),
        ("sweep", "start"): ("sweep_start", "float"),
        ("sweep", "stop"): ("sweep_stop", "float"),
        ("sweep", "step"): ("sweep_step", "float"),
        ("qa", "t_anneal"): ("qa_t_anneal", "float"),
        ("qa", "steps"): ("qa_steps", "int"),
        ("qa", "schedule_a"): ("qa_schedule_a", "path"),
        ("qa", "schedule_b"): ("qa_schedule_b", "path"),
        ("qa", "gap_grid"): ("qa_gap_grid", "int"),
        ("sa", "t_initial"): ("sa_t_initial", "float"),
        ("sa", "t_final"): ("sa_t_final", "float"),
        ("sa", "sweeps"): ("sa_sweeps", "int"),
        ("sa", "restarts"): ("sa_restarts", "int"),
        ("sa", "interpolation"): ("sa_interpolation", "str"),
        ("capacity", "n_max"): ("capacity_n_max", "int"),
        ("capacity", "tradeoff_points"): ("capacity_tradeoff_points", "int"),
        ("capacity", "montecarlo"): ("capacity_montecarlo", "bool"),
        ("montecarlo", "n"): ("mc_n", "int"),
        ("montecarlo", "p"): ("mc_p", "int_tuple"),
        ("montecarlo", "t_frac"): ("mc_t_frac", "float"),
        ("montecarlo", "trials"): ("mc_trials", "int"),
        ("montecarlo", "seed"): ("mc_seed", "int"),
        ("montecarlo", "engine"): ("mc_engine", "str"),
        ("embed", "m"): ("embed_m", "int"),
        ("embed", "missing"): ("embed_missing", "int_tuple"),
        ("embed", "n_logical"): ("embed_n_logical", "int"),
        ("embed", "solve"): ("embed_solve", "bool"),
        ("output", "dir"): ("output_dir", "path"),
        ("output", "plots"): ("plots", "bool"),
    }

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        cfg = cls(source_path=path)
        base = path.parent
        known_sections = {s for s, _ in cls._SCHEMA}
        for section in parser.sections():
            if section not in known_sections:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, raw in parser.items(section):
                if (section, key) not in cls._SCHEMA:
                    where = _find_line(path, section, key)
                    raise ConfigError(f"{where}[{section}] {key}: unknown key")
                attr, kind = cls._SCHEMA[(section, key)]
                try:
                    value = _parse_value(raw, kind, base)
                except ValueError as exc:
                    where = _find_line(path, section, key)
                    raise ConfigError(f"{where}[{section}] {key}: {exc}") from None
                setattr(cfg, attr, value)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def fail(section: str, key: str, msg: str) -> None:
            where = _find_line(self.source_path, section, key)
            raise ConfigError(f"{where}[{section}] {key}: {msg}")

        if self.engine not in ("oracle", "qa", "sa"):
            fail("recall", "engine", "must be one of oracle, qa, sa")
        if self.mc_engine not in ("oracle", "sa"):
            fail("montecarlo", "engine", "must be oracle or sa")
        if self.h < 0:
            fail("probe", "h", "must be >= 0")
        if self.sweep_step <= 0:
            fail("sweep", "step", "must be > 0")
        if self.sweep_stop < self.sweep_start:
            fail("sweep", "stop", "must be >= start")
        if self.shots < 1:
            fail("recall", "shots", "must be >= 1")
        if self.qa_steps < 1:
            fail("qa", "steps", "must be >= 1")
        if self.qa_t_anneal <= 0:
            fail("qa", "t_anneal", "must be > 0")
        if self.sa_sweeps < 1:
            fail("sa", "sweeps", "must be >= 1")
        if self.sa_restarts < 1:
            fail("sa", "restarts", "must be >= 1")
        if self.sa_interpolation not in ("geometric", "linear"):
            fail("sa", "interpolation", "must be geometric or linear")
        if self.probe_pattern is not None and self.probe_from_memory is not None:
            fail("probe", "pattern", "give either a pattern or a from_memory recipe, not both")
        if self.probe_from_memory is not None and self.probe_flips is None:
            fail("probe", "flips", "required together with from_memory")
        if self.embed_m < 1:
            fail("embed", "m", "must be >= 1")
        if self.mc_trials < 1:
            fail("montecarlo", "trials", "must be >= 1")

    def to_text(self) -> str:
        """Serialize every effective value; parsing the result reproduces self."""
        parser = configparser.ConfigParser()
        for (section, key), (attr, kind) in self._SCHEMA.items():
            value = getattr(self, attr)
            if value is None:
                continue
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, key, _format_value(value, kind))
        import io

        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    # derived objects -----------------------------------------------------

    def load_memories(self) -> MemorySet:
        if self.memories_path is None:
            raise ConfigError("[network] memories: required for this command")
        try:
            return MemorySet.load(self.memories_path)
        except FileNotFoundError:
            raise ConfigError(f"[network] memories: file not found: {self.memories_path}")
        except ValueError as exc:
            raise ConfigError(f"{self.memories_path}: {exc}") from None

    def probe_spec(self, memories: MemorySet, h: float | None = None) -> ProbeSpec:
        if self.probe_pattern is not None:
            try:
                pattern = parse_spin_string(self.probe_pattern)
            except ValueError as exc:
                raise ConfigError(f"[probe] pattern: {exc}") from None
            if pattern.size != memories.n:
                raise ConfigError(
                    f"[probe] pattern: length {pattern.size} does not match N = {memories.n}"
                )
        elif self.probe_from_memory is not None:
            if not (0 <= self.probe_from_memory < memories.p):
                raise ConfigError("[probe] from_memory: index out of range")
            if not (0 <= self.probe_flips <= memories.n):
                raise ConfigError("[probe] flips: out of range")
            rng = np.random.default_rng(self.probe_flip_seed)
            pattern = memories[self.probe_from_memory].copy()
            sites = rng.choice(memories.n, size=self.probe_flips, replace=False)
            pattern[sites] *= -1
        else:
            raise ConfigError("[probe] pattern: a probe pattern or recipe is required")
        try:
            return ProbeSpec(pattern, self.h if h is None else h, self.probe_mask)
        except ValueError as exc:
            raise ConfigError(f"[probe] mask: {exc}") from None

    def h_grid(self) -> np.ndarray:
        count = int(np.floor((self.sweep_stop - self.sweep_start) / self.sweep_step + 1e-9)) + 1
        return self.sweep_start + self.sweep_step * np.arange(count)


def _parse_value(raw: str, kind: str, base: Path):
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "path":
        p = Path(raw)
        return p if p.is_absolute() else base / p
    if kind == "int_tuple":
        if not raw:
            return ()
        return tuple(int(part) for part in raw.replace(",", " ").split())
    raise AssertionError(kind)


def _format_value(value, kind: str) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind == "int_tuple":
        return ",".join(str(v) for v in value)
    if kind == "float":
        return repr(float(value))
    return str(value)
