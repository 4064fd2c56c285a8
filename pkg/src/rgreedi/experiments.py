"""Desk-scale experiment runner: configs, result rows, CSV and SVG output."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable
from xml.etree import ElementTree as ET

import numpy as np

from .constraints import Cardinality, Intersection
from .core import derive_seed
from .distributed import det_greedi, nm_rand_greedi, partition_fixed, partition_random, rand_greedi
from .greedy import greedy
from .instances import (Instance, gen_diverse_relevant, gen_exemplar, gen_matroid_coverage, gen_random_coverage,
                        gen_tight_instance, load_fimi)
from .verify import MAX_ENUMERATION, brute_force_opt

EXPERIMENTS = ("coverage_ratio", "exemplar", "diversity", "matroid_ellipse", "tight_instance", "bound_suite")
CSV_HEADER = ["experiment", "instance", "algorithm", "partition", "k", "m", "stat", "value", "ratio",
              "oracle_calls", "wall_ms"]


class ConfigError(ValueError):
    pass


def parse_k_range(text: str) -> list[int]:
    """'1:5' (inclusive), '1:10:3' (with step) or '1,2,4'."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                lo, hi, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                lo, hi, step = parts
            else:
                raise ValueError
            ks = list(range(lo, hi + 1, step))
        else:
            ks = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"bad k range {text!r}") from None
    return ks


@dataclass
class ExperimentConfig:
    experiment: str = "coverage_ratio"
    k_range: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    m: int = 4
    trials: int = 30
    seed: int = 0
    partition_strategies: list[str] = field(default_factory=lambda: ["random", "block", "round_robin"])
    output_dir: str = "results"
    timing: bool = False
    plot: bool = True
    reference: str = "auto"
    # instance parameters
    fimi_path: str = ""
    n: int = 14
    universe: int = 30
    density: float = 0.2
    d: int = 16
    l: int = 3
    n_facilities: int = 25
    r: int = 3
    demand_grid: int = 100

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.k_range or any(b <= a for a, b in zip(self.k_range, self.k_range[1:])):
            raise ConfigError("k_range must be non-empty and strictly ascending")
        if min(self.k_range) < 1:
            raise ConfigError("k values must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.reference not in ("auto", "opt", "greedy"):
            raise ConfigError("reference must be one of auto, opt, greedy")

    @classmethod
    def from_pairs(cls, pairs: dict[str, str], base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        """Build a config from string key/value pairs (file entries or CLI overrides)."""
        kw = dataclasses.asdict(base) if base is not None else {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        for raw_key, raw in pairs.items():
            key = raw_key.strip().replace("-", "_")
            if key == "out":
                key = "output_dir"
            if key not in types:
                raise ConfigError(f"unknown config key {raw_key!r}")
            t = types[key]
            raw = raw.strip()
            try:
                if key == "k_range":
                    kw[key] = parse_k_range(raw)
                elif key == "partition_strategies":
                    kw[key] = [p.strip() for p in raw.split(",") if p.strip()]
                elif t in ("int", int):
                    kw[key] = int(raw)
                elif t in ("float", float):
                    kw[key] = float(raw)
                elif t in ("bool", bool):
                    if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                        raise ValueError
                    kw[key] = raw.lower() in ("1", "true", "yes")
                else:
                    kw[key] = raw
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        return cls(**kw)

    @classmethod
    def from_file(cls, path, overrides: dict[str, str] | None = None) -> "ExperimentConfig":
        pairs = read_config_file(path)
        pairs.update(overrides or {})
        return cls.from_pairs(pairs)


def read_config_file(path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    instance: str
    algorithm: str
    partition: str
    k: int
    m: int
    stat: str
    value: float
    ratio: float
    oracle_calls: int
    wall_ms: float

    def __post_init__(self):
        object.__setattr__(self, "ratio", _sig6(self.ratio))
        object.__setattr__(self, "wall_ms", round(float(self.wall_ms), 3))
        object.__setattr__(self, "value", float(self.value))

    def sort_key(self):
        return (self.experiment, self.instance, self.algorithm, self.partition, self.k, self.stat)


def _fmt_row(r: ResultRow) -> list[str]:
    return [r.experiment, r.instance, r.algorithm, r.partition, str(r.k), str(r.m), r.stat,
            repr(r.value), f"{r.ratio:.6g}", str(r.oracle_calls), f"{r.wall_ms:.3f}"]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(_fmt_row(r))
    return buf.getvalue()


def emit_csv(rows, path) -> Path:
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    try:
        path.write_text(rows_to_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> list[ResultRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        out = []
        for rec in reader:
            out.append(ResultRow(rec[0], rec[1], rec[2], rec[3], int(rec[4]), int(rec[5]), rec[6],
                                 float(rec[7]), float(rec[8]), int(rec[9]), float(rec[10])))
    return out


def emit_plot(rows, path) -> Path:
    """SVG line chart of ratio against k, one polyline per (algorithm, partition).

    Only point-value rows are drawn (stat 'value:*' or 'mean:*').
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    if len({r.experiment for r in rows}) != 1:
        raise ValueError("plot rows must come from a single experiment")
    pts = [r for r in rows if r.stat.split(":")[0] in ("value", "mean")]
    series: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for r in sorted(pts, key=lambda r: (r.algorithm, r.partition, r.k)):
        series.setdefault((r.algorithm, r.partition), []).append((r.k, r.ratio))
    W, H, pad = 640, 400, 50
    ks = [r.k for r in pts] or [0, 1]
    kmin, kmax = min(ks), max(ks)
    if kmin == kmax:
        kmin, kmax = kmin - 1, kmax + 1
    ymax = max([1.0] + [r.ratio for r in pts])

    def sx(k):
        return pad + (k - kmin) / (kmax - kmin) * (W - 2 * pad)

    def sy(v):
        return H - pad - v / ymax * (H - 2 * pad)

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H))
    ET.SubElement(svg, "line", x1=str(pad), y1=str(H - pad), x2=str(W - pad), y2=str(H - pad), stroke="black")
    ET.SubElement(svg, "line", x1=str(pad), y1=str(pad), x2=str(pad), y2=str(H - pad), stroke="black")
    xl = ET.SubElement(svg, "text", x=str(W // 2), y=str(H - 10))
    xl.text = "k"
    yl = ET.SubElement(svg, "text", x="10", y=str(H // 2))
    yl.text = "ratio"
    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
    for i, ((alg, part), xs) in enumerate(sorted(series.items())):
        col = colours[i % len(colours)]
        ET.SubElement(svg, "polyline", fill="none", stroke=col,
                      points=" ".join(f"{sx(k):.2f},{sy(v):.2f}" for k, v in xs))
        lab = ET.SubElement(svg, "text", x=str(W - pad - 150), y=str(pad + 15 * i), fill=col)
        lab.text = f"{alg} ({part})"
    path = Path(path)
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    return path


def _reference(inst: Instance, mode: str = "auto") -> tuple[float, str]:
    """Reference value and its tag: exact OPT when known or enumerable, else centralized greedy."""
    if mode != "greedy":
        if inst.known_opt is not None:
            return inst.known_opt, "opt"
        if inst.n <= MAX_ENUMERATION:
            return brute_force_opt(range(inst.n), inst.f, inst.c).opt_value, "opt"
        if mode == "opt":
            raise ConfigError(f"instance {inst.name} has {inst.n} > {MAX_ENUMERATION} elements; "
                              "no exact reference available")
    return greedy(range(inst.n), inst.f, inst.c, lazy=inst.f.monotone).value, "greedy"


class _Rows:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.rows: list[ResultRow] = []

    def add(self, inst, alg, part, k, m, stat, value, ref, calls, secs):
        ratio = value / ref if ref > 0 else 1.0
        if stat.startswith("se"):
            ratio = value / ref if ref > 0 else 0.0
        ms = secs * 1000.0 if self.cfg.timing else 0.0
        self.rows.append(ResultRow(self.cfg.experiment, inst.name, alg, part, k, m, stat, value, ratio,
                                   int(calls), ms))

    def randomized(self, inst, alg, k, m, ref, tag, run: Callable[[int], object]):
        t0 = time.perf_counter()
        vals, calls = [], []
        for t in range(self.cfg.trials):
            rep = run(derive_seed(self.cfg.seed, t))
            vals.append(rep.final_value)
            calls.append(rep.oracle_calls)
        secs = time.perf_counter() - t0
        arr = np.asarray(vals)
        mean_calls = round(float(np.mean(calls)))
        if len(arr) == 1:
            self.add(inst, alg, "random", k, m, f"value:{tag}", float(arr[0]), ref, mean_calls, secs)
            return
        se = float(arr.std(ddof=1) / math.sqrt(len(arr)))
        self.add(inst, alg, "random", k, m, f"mean:{tag}", float(arr.mean()), ref, mean_calls, secs)
        self.add(inst, alg, "random", k, m, f"se:{tag}", se, ref, mean_calls, secs)

    def deterministic(self, inst, alg, part_name, partition, k, ref, tag):
        t0 = time.perf_counter()
        rep = det_greedi(inst, partition)
        self.add(inst, alg, part_name, k, partition.m, f"value:{tag}", rep.final_value, ref, rep.oracle_calls,
                 time.perf_counter() - t0)


def _monotone_sweep(out: _Rows, inst_for_k: Callable[[int], Instance], nonmonotone: bool = False):
    cfg = out.cfg
    for k in cfg.k_range:
        inst = inst_for_k(k)
        ref, tag = _reference(inst, cfg.reference)
        lazy = inst.f.monotone
        t0 = time.perf_counter()
        central = greedy(range(inst.n), inst.f, inst.c, lazy=lazy)
        out.add(inst, "greedy", "central", k, 1, f"value:{tag}", central.value, ref, central.oracle_calls,
                time.perf_counter() - t0)
        if nonmonotone:
            out.randomized(inst, "nm_rand_greedi", k, cfg.m, ref, tag,
                           lambda s: nm_rand_greedi(inst, cfg.m, s))
        if "random" in cfg.partition_strategies:
            out.randomized(inst, "rand_greedi", k, cfg.m, ref, tag,
                           lambda s: rand_greedi(inst, cfg.m, seed=s, lazy=lazy))
        for strat in cfg.partition_strategies:
            if strat == "random":
                continue
            out.deterministic(inst, "greedi", strat, partition_fixed(inst.n, cfg.m, strat), k, ref, tag)


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every (k, algorithm, partition) cell of ``cfg`` and return sorted rows.

    The reference is the exact optimum when the ground set is small enough
    to enumerate (or known by construction), otherwise centralized greedy;
    the ``stat`` column records which.
    """
    cfg.validate()
    out = _Rows(cfg)
    exp = cfg.experiment
    if exp == "coverage_ratio":
        if cfg.fimi_path:
            base = load_fimi(cfg.fimi_path, cfg.k_range[0])
        else:
            base = gen_random_coverage(cfg.n, cfg.universe, cfg.density, cfg.seed)
        _monotone_sweep(out, lambda k: base.with_constraint(Cardinality(k)))
    elif exp == "exemplar":
        base = gen_exemplar(cfg.n, cfg.d, cfg.seed)
        _monotone_sweep(out, lambda k: base.with_constraint(Cardinality(k)))
    elif exp == "diversity":
        _monotone_sweep(out, lambda k: gen_diverse_relevant(cfg.n, k, cfg.seed), nonmonotone=True)
    elif exp == "matroid_ellipse":
        base = gen_matroid_coverage(cfg.n_facilities, cfg.r, cfg.demand_grid, cfg.seed)
        matroid = base.meta["matroid"]
        _monotone_sweep(out, lambda k: base.with_constraint(Intersection([Cardinality(k), matroid])))
    elif exp == "tight_instance":
        inst = gen_tight_instance(cfg.l)
        k = inst.c.k
        ref, tag = inst.known_opt, "opt"
        m = inst.adversarial_partition.m
        out.deterministic(inst, "greedi", "adversarial", inst.adversarial_partition, k, ref, tag)
        for strat in cfg.partition_strategies:
            if strat != "random":
                out.deterministic(inst, "greedi", strat, partition_fixed(inst.n, m, strat), k, ref, tag)
        out.randomized(inst, "rand_greedi", k, m, ref, tag, lambda s: rand_greedi(inst, m, seed=s, lazy=True))
    elif exp == "bound_suite":
        from .suites import run_suites

        for res in run_suites(scale="quick", seed=cfg.seed):
            out.rows.append(ResultRow(exp, res.name, "suite", "-", 0, 0, "pass" if res.passed else "fail",
                                      1.0 if res.passed else 0.0, res.worst if res.worst is not None else 0.0,
                                      0, res.seconds * 1000.0 if cfg.timing else 0.0))
    return sorted(out.rows, key=ResultRow.sort_key)


def run_and_write(cfg: ExperimentConfig) -> tuple[list[ResultRow], Path]:
    rows = run_experiment(cfg)
    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {outdir}: {exc}") from exc
    csv_path = emit_csv(rows, outdir / f"{cfg.experiment}.csv")
    if cfg.plot and cfg.experiment != "bound_suite":
        emit_plot(rows, outdir / f"{cfg.experiment}.svg")
    return rows, csv_path
