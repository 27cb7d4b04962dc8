"""Flat ``key = value`` config files with dotted keys."""

from __future__ import annotations

from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_config_text(text: str, allowed: set[str] | None = None) -> dict[str, str]:
    """Parse lines of ``key = value``; ``#`` starts a comment. Unknown keys are rejected."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if allowed is not None and key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def load_config(path: str | Path, allowed: set[str] | None = None) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(), allowed)


def dump_config(cfg: dict[str, object]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in sorted(cfg.items()))
