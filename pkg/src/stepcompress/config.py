"""INI configuration for pipeline runs.

Three sections, all optional: [run] maps onto RunConfig, [translator] onto
TranslatorSettings, and [aliases] adds operation-name spellings on top of
the built-in table (spelling = canonical-op). Unknown keys are errors so
typos fail loudly instead of silently keeping a default.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .model import CommentStrategy, LabelMode, RunConfig
from .normalize import AliasTable
from .translator import DEFAULT_TOKEN_ENV


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class TranslatorSettings:
    endpoint: str = "http://localhost:8000/v1/chat/completions"
    model: str = "local-translator"
    token_env: str = DEFAULT_TOKEN_ENV
    tag_scheme: str = "step"
    max_workers: int = 8
    max_retries: int = 4
    backoff_base: float = 0.25
    timeout: float = 60.0

    def __post_init__(self):
        if self.tag_scheme not in ("step", "code"):
            raise ConfigError(f"tag_scheme must be 'step' or 'code', got {self.tag_scheme!r}")
        if self.max_workers < 1:
            raise ConfigError("max_workers must be at least 1")


@dataclass
class AppConfig:
    run: RunConfig = field(default_factory=RunConfig)
    translator: TranslatorSettings = field(default_factory=TranslatorSettings)
    aliases: AliasTable = field(default_factory=AliasTable.default)


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def _convert(raw: str, target_type, key: str):
    raw = raw.strip()
    try:
        if target_type is bool:
            lowered = raw.lower()
            if lowered not in _BOOL_VALUES:
                raise ValueError(raw)
            return _BOOL_VALUES[lowered]
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        if target_type is CommentStrategy:
            return CommentStrategy(raw)
        if target_type is LabelMode:
            return LabelMode(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def _load_section(parser: configparser.ConfigParser, name: str, cls):
    spec = {f.name: f.type for f in fields(cls)}
    type_map = {
        "int": int, "float": float, "bool": bool, "str": str,
        "CommentStrategy": CommentStrategy, "LabelMode": LabelMode,
    }
    values = {}
    if parser.has_section(name):
        for key, raw in parser.items(name):
            if key not in spec:
                raise ConfigError(f"unknown key [{name}] {key}")
            target = type_map.get(str(spec[key]), str)
            values[key] = _convert(raw, target, f"[{name}] {key}")
    try:
        return cls(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> AppConfig:
    """Read an INI file into an AppConfig; None gives all defaults."""
    if path is None:
        return AppConfig()
    parser = configparser.ConfigParser()
    read = parser.read(Path(path), encoding="utf-8")
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section in parser.sections():
        if section not in ("run", "translator", "aliases"):
            raise ConfigError(f"unknown config section [{section}]")
    run = _load_section(parser, "run", RunConfig)
    translator = _load_section(parser, "translator", TranslatorSettings)
    aliases = AliasTable.default()
    if parser.has_section("aliases"):
        overrides = dict(parser.items("aliases"))
        try:
            aliases = aliases.with_overrides(overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return AppConfig(run=run, translator=translator, aliases=aliases)
