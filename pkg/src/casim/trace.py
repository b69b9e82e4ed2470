"""Per-cycle experiment traces and their CSV form.

One row per (episode, cycle, UE); column order is part of the public contract.
Floats are rendered at 9 significant digits, so emit -> parse -> emit is
byte-stable.
"""

import numpy as np

from .errors import CasimError

COLUMNS = [
    "episode", "cycle", "gnb", "ue", "num_cc", "rb_cc1", "rb_cc2", "rb_total",
    "p_total_w", "p_cc1_w", "p_cc2_w", "p_si_w", "rate_bps", "state_bit", "reward",
]
_INT_COLUMNS = {"episode", "cycle", "gnb", "ue", "num_cc",
                "rb_cc1", "rb_cc2", "rb_total", "state_bit"}


class EpisodeTrace:
    """Column-oriented trace of one experiment run."""

    def __init__(self, scenario_name="", seed=0):
        self.scenario_name = scenario_name
        self.seed = seed
        self.rows = {c: [] for c in COLUMNS}

    def append(self, **values):
        if set(values) != set(COLUMNS):
            missing = set(COLUMNS) - set(values)
            extra = set(values) - set(COLUMNS)
            raise CasimError(f"bad trace row (missing {missing}, extra {extra})")
        for c in COLUMNS:
            self.rows[c].append(values[c])

    def __len__(self):
        return len(self.rows["episode"])

    def column(self, name):
        if name not in self.rows:
            raise CasimError(f"unknown trace column {name!r}")
        dtype = np.int64 if name in _INT_COLUMNS else float
        return np.asarray(self.rows[name], dtype=dtype)

    def episodes(self):
        eps = self.column("episode")
        return np.unique(eps)

    def episode_mean(self, metric, ue=None, gnb=None):
        """Per-episode mean over cycles of the metric.

        For network-wide rate-like metrics the per-cycle value is the sum over
        the UEs present that cycle; with ue= (or gnb=) given, rows are filtered
        to that UE (or gNB) first and summed within each cycle.
        """
        eps = self.column("episode")
        cyc = self.column("cycle")
        val = self.column(metric).astype(float)
        mask = np.ones(len(eps), dtype=bool)
        if ue is not None:
            mask &= self.column("ue") == ue
        if gnb is not None:
            mask &= self.column("gnb") == gnb
        eps, cyc, val = eps[mask], cyc[mask], val[mask]
        uniq = np.unique(eps)
        out = np.empty(len(uniq))
        for j, e in enumerate(uniq):
            sel = eps == e
            # sum within each cycle, then mean over the episode's cycles
            cycles = cyc[sel]
            per_cycle = np.zeros(cycles.max())
            np.add.at(per_cycle, cycles - 1, val[sel])
            out[j] = per_cycle[np.unique(cycles) - 1].mean()
        return uniq, out


def _fmt(name, value):
    if name in _INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".9g")


def emit_csv(trace, path):
    """Write the trace with the documented column order; header always present."""
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            cols = [trace.rows[c] for c in COLUMNS]
            for row in zip(*cols):
                fh.write(",".join(_fmt(n, v) for n, v in zip(COLUMNS, row)) + "\n")
    except OSError as exc:
        raise CasimError(f"cannot write trace to {path}: {exc}") from exc
    return path


def parse_csv(path):
    trace = EpisodeTrace()
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != COLUMNS:
            raise CasimError(f"{path}: unexpected CSV header")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(COLUMNS):
                raise CasimError(f"{path}: malformed row {line!r}")
            for name, text in zip(COLUMNS, parts):
                value = int(text) if name in _INT_COLUMNS else float(text)
                trace.rows[name].append(value)
    return trace
