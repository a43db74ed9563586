"""Parameter sweeps, flat-file output and the two comparison figures.

Tables are written as plain CSV: one header row, comma separated, floats
with 17 significant digits so that reading a file back reproduces every
value bit for bit.  Complex quantities occupy two columns (``*_re``,
``*_im``).
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eom import approximate_cumulants
from .fcs import analytic_cumulants_n1, stationary_cumulants
from .model import ModelParams

__all__ = [
    "METHODS",
    "AXES",
    "ME_CAP",
    "SweepSpec",
    "Table",
    "parse_grid",
    "run_sweep",
    "read_config",
    "fig2_spec",
    "fig3_spec",
    "reproduce_figure",
]

METHODS = ("me", "approx1", "approx2", "approx3", "n1-analytic")
AXES = ("N", "n_S", "n_D", "gamma_S", "gamma_D")
ME_CAP = 512
PARAM_COLUMNS = ("N", "gamma_S", "gamma_D", "n_S", "n_D")


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return "" if value is None else str(value)


def _parse(text: str):
    if text == "":
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, Table) or list(self.columns) != list(other.columns):
            return False
        if len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            for x, y in zip(a, b):
                if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
                    continue
                if x != y:
                    return False
        return True

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "Table":
        text = source if "\n" in str(source) else Path(source).read_text()
        reader = csv.reader(io.StringIO(text))
        columns = next(reader)
        return cls(columns, [tuple(_parse(v) for v in row) for row in reader])


# ---------------------------------------------------------------------------
# sweep specification
# ---------------------------------------------------------------------------

def parse_grid(text: str) -> list:
    """``"1,2,5"``, ``"lin:start:stop:num"`` or ``"log:start:stop:num"``."""
    text = text.strip()
    if text.startswith(("lin:", "log:")):
        kind, start, stop, num = text.split(":")
        start, stop, num = float(start), float(stop), int(num)
        if kind == "lin":
            return [float(x) for x in np.linspace(start, stop, num)]
        if start <= 0 or stop <= 0:
            raise ValueError("log grid bounds must be positive")
        return [float(x) for x in np.geomspace(start, stop, num)]
    return [_parse(v.strip()) for v in text.split(",") if v.strip()]


@dataclass(frozen=True)
class SweepSpec:
    """One axis scanned over ``grid`` with everything else in ``fixed``."""

    axis: str
    grid: tuple
    fixed: dict = field(default_factory=dict)
    methods: tuple = ("me",)
    order: int = 2
    me_cap: int = ME_CAP

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.grid:
            raise ValueError("grid is empty")
        diffs = np.diff(np.asarray(self.grid, dtype=float))
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid must be strictly monotone")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not 1 <= int(self.order) <= 6:
            raise ValueError("order must be in 1..6")
        bad = set(self.fixed) - set(AXES)
        if bad:
            raise ValueError(f"unknown fixed parameters {sorted(bad)}")
        if self.axis in self.fixed:
            raise ValueError(f"{self.axis!r} is both the axis and fixed")

    def points(self):
        for value in self.grid:
            kwargs = dict(self.fixed)
            kwargs[self.axis] = value
            kwargs.setdefault("N", 1)
            yield kwargs

    @property
    def columns(self):
        return list(PARAM_COLUMNS) + ["method"] + [f"k{k}" for k in range(1, self.order + 1)] \
            + ["wall_time", "error"]


def _evaluate(task):
    kwargs, method, order, me_cap = task
    start = time.perf_counter()
    values, error = [math.nan] * order, ""
    try:
        params = ModelParams(**kwargs)
        if method == "me":
            if params.N > me_cap:
                raise ValueError(f"me limited to N <= {me_cap}")
            values = list(stationary_cumulants(params, order).values)
        elif method == "n1-analytic":
            values = list(analytic_cumulants_n1(params, order).values)
        else:
            values = list(approximate_cumulants(params, method, order).values)
    except Exception as exc:  # recorded per point, the sweep goes on
        error = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    row = tuple(_coerce(kwargs, c) for c in PARAM_COLUMNS)
    return row + (method,) + tuple(float(v) for v in values) + (elapsed, error)


def _coerce(kwargs, name):
    value = kwargs.get(name, ModelParams.__dataclass_fields__[name].default)
    return int(value) if name == "N" else float(value)


def run_sweep(spec: SweepSpec, workers: int = 1, timing: bool = True) -> Table:
    """One row per grid point and method, in grid-then-method order.

    ``workers > 1`` dispatches points to a process pool; results are
    reassembled in the deterministic order.  With ``timing=False`` the
    ``wall_time`` column is zeroed so output is reproducible byte for byte.
    """
    tasks = [(kwargs, m, int(spec.order), spec.me_cap)
             for kwargs in spec.points() for m in spec.methods]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_evaluate(t) for t in tasks]
    if not timing:
        wt = spec.columns.index("wall_time")
        rows = [r[:wt] + (0.0,) + r[wt + 1:] for r in rows]
    return Table(spec.columns, rows)


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

#: Recognised keys of a ``key = value`` config file and their types.
CONFIG_SCHEMA = {
    "N": int,
    "gamma_s": float,
    "gamma_d": float,
    "ns": float,
    "nd": float,
    "order": int,
    "method": str,
    "chi_max": float,
    "grid": str,
    "axis": str,
    "out": str,
    "workers": int,
    "me_cap": int,
    "t": float,
    "n_max": int,
}


def read_config(path) -> dict:
    """Read ``key = value`` lines (``#`` comments) into a typed dict."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[config]\n" + Path(path).read_text())
    out = {}
    lookup = {k.lower(): k for k in CONFIG_SCHEMA}
    for key, raw in parser["config"].items():
        name = lookup.get(key.lower().replace("-", "_"))
        if name is None:
            raise ValueError(f"unknown config key {key!r}")
        out[name] = CONFIG_SCHEMA[name](raw.strip())
    return out


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

FIG2_OCCUPATIONS = (0.1, 1.0, 10.0)
FIG3_SIZES = (5, 10, 20, 40, 80)


def fig2_sizes(n_max: int = 500, num: int = 40) -> list:
    return sorted({int(round(x)) for x in np.geomspace(1, n_max, num)})


def fig2_spec(n_S: float, n_max: int = 500) -> SweepSpec:
    return SweepSpec(axis="N", grid=fig2_sizes(n_max), fixed={"n_S": n_S, "n_D": 0.0},
                     methods=("me", "approx1", "approx2", "approx3"), order=1)


def fig3_spec(N: int, num: int = 41) -> SweepSpec:
    return SweepSpec(axis="n_S", grid=parse_grid(f"log:0.01:1000:{num}"),
                     fixed={"N": N, "n_D": 0.0},
                     methods=("me", "approx1", "approx2", "approx3"), order=2)


_FIG2_PLOT = '''"""Ratio of approximate to exact first cumulant versus N (generated)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("fig2.csv")))
panels = sorted({float(r["n_S"]) for r in rows})
fig, axes = plt.subplots(len(panels), 1, sharex=True, figsize=(5, 8))
for ax, n_s in zip(axes, panels):
    for method, style in (("approx1", "ko-"), ("approx2", "rs:"), ("approx3", "bd--")):
        sel = [r for r in rows if float(r["n_S"]) == n_s and r["method"] == method]
        ax.semilogx([int(r["N"]) for r in sel], [float(r["ratio"]) for r in sel], style,
                    label=method, markersize=3)
    ax.set_ylabel(f"I1 approx / I1 ME  (n_S = {n_s:g})")
axes[0].legend()
axes[-1].set_xlabel("N")
fig.savefig("fig2.pdf")
'''

_FIG3_PLOT = '''"""Second cumulant versus source occupation (generated)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("fig3.csv")))
styles = {"me": "k-.", "approx1": "k-", "approx2": "r:", "approx3": "b--"}
fig, ax = plt.subplots(figsize=(5, 4))
for N in sorted({int(r["N"]) for r in rows}):
    for method, style in styles.items():
        sel = [r for r in rows if int(r["N"]) == N and r["method"] == method]
        ax.loglog([float(r["n_S"]) for r in sel], [float(r["k2"]) for r in sel], style,
                  linewidth=2 if method == "me" else 1)
ax.set_xlabel("n_S")
ax.set_ylabel("I2 / Gamma")
fig.savefig("fig3.pdf")
'''


def _figure_table(which: str, workers: int = 1) -> Table:
    if which == "fig2":
        table = Table(["n_S", "N", "method", "k1_approx", "k1_me", "ratio"])
        for n_S in FIG2_OCCUPATIONS:
            sweep = run_sweep(fig2_spec(n_S), workers=workers, timing=False)
            k1 = {(r[0], r[5]): r[6] for r in sweep.rows}
            for N in fig2_sizes():
                me = k1[(N, "me")]
                for method in ("approx1", "approx2", "approx3"):
                    value = k1[(N, method)]
                    table.rows.append((n_S, N, method, value, me, value / me))
        return table
    if which == "fig3":
        table = Table(["N", "n_S", "method", "k2"])
        for N in FIG3_SIZES:
            sweep = run_sweep(fig3_spec(N), workers=workers, timing=False)
            for r in sweep.rows:
                table.rows.append((N, r[3], r[5], r[7]))
        return table
    raise ValueError(f"unknown figure {which!r}; expected fig2 or fig3")


def reproduce_figure(which: str, outdir=".", workers: int = 1) -> list:
    """Write ``<which>.csv`` and a plotting script ``<which>_plot.py`` into ``outdir``."""
    table = _figure_table(which, workers)
    outdir = Path(outdir)
    os.makedirs(outdir, exist_ok=True)
    csv_path = outdir / f"{which}.csv"
    plot_path = outdir / f"{which}_plot.py"
    table.to_csv(csv_path)
    plot_path.write_text(_FIG2_PLOT if which == "fig2" else _FIG3_PLOT)
    return [csv_path, plot_path]
