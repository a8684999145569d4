"""Append-only store for calibrated quantities (decay rate, cone exponent).

Entries are JSON objects, one per line, keyed by kind, (d, alpha) and a
domain descriptor, with full provenance (seed, n, h, fit window, wall
time).  Lookups return the most recent matching entry.
"""

from __future__ import annotations

import json
import os
import time
from typing import Optional

from .montecarlo import MCEstimate


def append_entry(
    path,
    kind: str,
    d: int,
    alpha: float,
    domain_desc: dict,
    estimate: MCEstimate,
    fit_window,
    extra: Optional[dict] = None,
) -> dict:
    entry = {
        "kind": kind,
        "d": d,
        "alpha": alpha,
        "domain": domain_desc,
        "value": estimate.mean,
        "stderr": estimate.stderr,
        "n": estimate.n,
        "seed": estimate.seed,
        "h": estimate.step,
        "fit_window": list(fit_window),
        "wall_time": estimate.wall_time,
        "recorded_at": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    if extra:
        entry.update(extra)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "a") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return entry


def lookup(path, kind: str, d: int, alpha: float, domain_desc: Optional[dict] = None):
    """Most recent stored value for the key, or None."""
    if not os.path.exists(path):
        return None
    found = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            if entry.get("kind") != kind or entry.get("d") != d:
                continue
            if abs(entry.get("alpha", -1) - alpha) > 1e-12:
                continue
            if domain_desc is not None and entry.get("domain") != domain_desc:
                continue
            found = entry
    return found
