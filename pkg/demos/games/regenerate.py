"""Rewrite the expected outputs listed in CASES.

Run from anywhere; paths are resolved relative to this file. Each case
writes ``expected/<game>.<command>.txt`` (stdout, or stderr for rejected
inputs) and the machine form to ``expected/<game>.<command>.json``.
"""

from __future__ import annotations

import contextlib
import io
import os
from pathlib import Path

from dynkin.cli import main

HERE = Path(__file__).resolve().parent


def cases():
    for line in (HERE / "CASES").read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            game, command, code = line.split()
            yield game, command, int(code)


def run(argv: list[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    os.chdir(HERE)
    for game, command, expected in cases():
        stem = f"expected/{Path(game).stem}.{command}"
        code, out, err = run([command, game])
        if code != expected:
            raise SystemExit(f"{game} {command}: exit {code}, CASES says {expected}")
        Path(stem + ".txt").write_text(out if code in (0, 1) else err)
        if code in (0, 1):
            Path(stem + ".json").write_text(run([command, game, "--machine"])[1])
        print(f"{stem}: exit {code}")
