"""
CSV output for CLI tables.

Floats are written with 17 significant digits so every value round-trips
exactly; identical inputs produce byte-identical files.
"""

import sys
from pathlib import Path
from typing import Optional

import pandas as pd

FLOAT_FORMAT = "%.17g"


def render_table(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_table(frame: pd.DataFrame, out: Optional[str] = None) -> None:
    """Write ``frame`` to ``out``, or to standard output when ``out`` is None or '-'."""
    text = render_table(frame)
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
