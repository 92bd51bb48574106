"""Output formatting shared by the CLI: CSV emission and run reports."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


def fmt6(value) -> str:
    """Numbers at 6 significant digits, everything else as-is.

    Single formatting choke point so CSV and report text stay diffable
    across platforms.
    """
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        return format(value, ".6g")
    return str(value)


def write_csv(path, header, rows) -> None:
    """UTF-8, LF line endings, values through fmt6."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt6(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def input_digest(config_text: str, command: str, flags: dict) -> str:
    """Stable identity of one invocation: config content plus flags."""
    h = hashlib.sha256()
    h.update(command.encode())
    h.update(b"\0")
    h.update(config_text.encode())
    for key in sorted(flags):
        h.update(f"\0{key}={flags[key]}".encode())
    return h.hexdigest()[:16]


@dataclass
class RunReport:
    """What one subcommand did: headline numbers and emitted files."""

    command: str
    digest: str
    headline: list = field(default_factory=list)   # (name, value) pairs
    outputs: list = field(default_factory=list)    # emitted file paths

    def add(self, name: str, value) -> None:
        self.headline.append((name, value))

    def add_output(self, path) -> None:
        self.outputs.append(str(path))

    def render(self) -> str:
        lines = [f"pvrfid {self.command}  (input {self.digest})"]
        for name, value in self.headline:
            lines.append(f"  {name} = {fmt6(value)}")
        for path in self.outputs:
            lines.append(f"  wrote {path}")
        return "\n".join(lines)
