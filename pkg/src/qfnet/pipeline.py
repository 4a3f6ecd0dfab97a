"""End-to-end run orchestration.

A run ingests (or generates) tuning curves, computes the requested distance
matrices, compares them all-pairs with the Mantel test, builds the requested
networks, renders SVG heatmaps and PNG report figures, and writes a manifest.

Determinism contract: every output byte is a pure function of the resolved
config and seeds, for any worker count.  The one exception is timings.json
(wall-clock per stage), which is why timings live in their own file and not
in manifest.json.  On any stage failure the partial outputs are removed and
a StageError names the failed stage.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .curveprep import TuningCurve
from .errors import DataFormatError, NonFiniteMetricError, StageError
from .heatmap import render_heatmap_svg
from .io import ingest_csv
from .metrics import (
    METRIC_NAMES,
    MetricSpec,
    build_distance_matrix,
    matrix_to_csv,
    matrix_to_json,
    to_canonical_distance,
)
from .netgraph import mst, to_graphml, to_json as network_to_json, top_percent_network
from .rng import hash_fields
from .stats import mantel
from .synthetic import SyntheticSpec, curves_to_csv, generate_synthetic

DEFAULT_METRICS = (
    "correlation",
    "euclidean",
    "classical_fidelity",
    "ang",
    "amp",
    "amp_qft",
)
DEFAULT_NETWORKS = ("mst", "top:5", "top:10")

# every inferred convention a run relies on, recorded in the manifest
INFERRED_DEFAULTS = {
    "quantum_mode_default": "analytic",
    "compute_uncompute_repetitions": 2,
    "compute_uncompute_hadamard_layers": True,
    "amp_qft_placement": "on_load",
    "pair_enumeration": "a < b, mirrored",
    "negative_shot_estimates": "retained",
    "classical_fidelity_negatives": "clamped to zero before L1 normalization",
    "euclidean_rescaling": "L1 normalization without the pi factor",
    "resample_abscissae": "sample indices 0..s-1",
    "mantel_statistic": "spearman",
    "mantel_tail": "two_sided",
    "top_percent_rounding": "round_half_up",
    "top_percent_direction": "smallest canonical distance = strongest",
    "depth_convention": "greedy ASAP layering",
}


@dataclass(frozen=True)
class NetworkRequest:
    kind: str  # "mst" | "top_percent"
    percent: float | None = None

    @property
    def tag(self) -> str:
        return "mst" if self.kind == "mst" else f"top{self.percent:g}"


@dataclass
class RunConfig:
    outdir: str
    input: str | None = None  # curves CSV; None -> synthetic generation
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    metrics: tuple[str, ...] = DEFAULT_METRICS
    mode: str = "analytic"
    shots: int = 1000
    seed: int = 0
    metric_overrides: dict = field(default_factory=dict)  # name -> {mode/shots/seed}
    permutations: int = 999
    networks: tuple[NetworkRequest, ...] = ()
    jobs: int = 1
    skip_degenerate: bool = False
    figures: bool = True

    def __post_init__(self):
        if not self.networks:
            self.networks = tuple(parse_network_request(s) for s in DEFAULT_NETWORKS)
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.permutations < 1:
            raise ValueError("permutations must be >= 1")

    def metric_specs(self) -> list[MetricSpec]:
        specs = []
        for name in self.metrics:
            over = self.metric_overrides.get(name, {})
            specs.append(
                MetricSpec(
                    name,
                    mode=over.get("mode", self.mode),
                    shots=int(over.get("shots", self.shots)),
                    seed=int(over.get("seed", hash_fields(self.seed, name))),
                )
            )
        return specs


def parse_network_request(text: str) -> NetworkRequest:
    """'mst' or 'top:<percent>' (e.g. top:5)."""
    if text == "mst":
        return NetworkRequest("mst")
    if text.startswith("top:"):
        percent = float(text.split(":", 1)[1])
        if not 0.0 < percent <= 100.0:
            raise ValueError(f"network percent must be in (0, 100], got {percent}")
        return NetworkRequest("top_percent", percent)
    raise ValueError(f"unknown network request {text!r}; use 'mst' or 'top:<percent>'")


def load_config_file(path) -> dict:
    """Parse a `key = value` config file; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(f"{path}: line {lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


_CONFIG_SYNTHETIC_KEYS = {
    "neurons": int,
    "stimuli": int,
    "sigma": float,
    "noise": float,
    "amplitude": float,
}


def config_from_sources(outdir, file_values: dict | None, flag_values: dict) -> RunConfig:
    """Resolve a RunConfig from defaults, then config file, then CLI flags."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in flag_values.items() if v is not None})

    synth_kwargs = {}
    for key, cast in _CONFIG_SYNTHETIC_KEYS.items():
        if key in merged:
            synth_kwargs[key] = cast(merged[key])
    if "box" in merged:
        parts = str(merged["box"]).split(",")
        if len(parts) != 3:
            raise ValueError("box must be three comma-separated extents")
        synth_kwargs["box"] = tuple(float(p) for p in parts)
    seed = int(merged.get("seed", 0))
    synth_kwargs["seed"] = int(merged.get("synthetic_seed", hash_fields(seed, "synthetic")))

    metric_names = tuple(
        s.strip() for s in str(merged.get("metrics", ",".join(DEFAULT_METRICS))).split(",") if s.strip()
    )
    for name in metric_names:
        if name not in METRIC_NAMES:
            raise ValueError(
                f"unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}"
            )
    overrides: dict[str, dict] = {}
    for key, value in merged.items():
        if "." in key:
            name, attr = key.split(".", 1)
            if name in metric_names and attr in ("mode", "shots", "seed"):
                overrides.setdefault(name, {})[attr] = value

    networks = tuple(
        parse_network_request(s.strip())
        for s in str(merged.get("networks", ",".join(DEFAULT_NETWORKS))).split(",")
        if s.strip()
    )
    return RunConfig(
        outdir=str(outdir),
        input=merged.get("input"),
        synthetic=SyntheticSpec(**synth_kwargs),
        metrics=metric_names,
        mode=str(merged.get("mode", "analytic")),
        shots=int(merged.get("shots", 1000)),
        seed=seed,
        metric_overrides=overrides,
        permutations=int(merged.get("permutations", 999)),
        networks=networks,
        jobs=int(merged.get("jobs", 1)),
        skip_degenerate=bool(int(merged.get("skip_degenerate", 0))),
        figures=bool(int(merged.get("figures", 1))),
    )


class _Workspace:
    """Tracks written files so a failed run can remove its partial outputs."""

    def __init__(self, outdir: str):
        self.outdir = outdir
        self.created_dirs: list[str] = []
        self.written: list[str] = []
        if not os.path.isdir(outdir):
            os.makedirs(outdir)
            self.created_dirs.append(outdir)

    def path(self, *parts) -> str:
        full = os.path.join(self.outdir, *parts)
        parent = os.path.dirname(full)
        if parent and not os.path.isdir(parent):
            os.makedirs(parent)
            self.created_dirs.append(parent)
        self.written.append(full)
        return full

    def write_text(self, content: str, *parts) -> str:
        full = self.path(*parts)
        with open(full, "w", encoding="utf-8") as fh:
            fh.write(content)
        return full

    def cleanup(self):
        for full in self.written:
            if os.path.isfile(full):
                os.remove(full)
        for d in reversed(self.created_dirs):
            if os.path.isdir(d) and not os.listdir(d):
                os.rmdir(d)

    def relative(self) -> list[str]:
        return sorted(os.path.relpath(p, self.outdir) for p in self.written)


def _degenerate_reasons(curve: TuningCurve, metric_names) -> list[str]:
    reasons = []
    r = curve.responses
    if "correlation" in metric_names and np.all(r == r[0]):
        reasons.append("zero variance")
    if np.sum(np.abs(r)) == 0.0 and (
        {"euclidean", "ang"} & set(metric_names)
    ):
        reasons.append("zero L1 norm")
    if "classical_fidelity" in metric_names and np.all(r <= 0.0):
        reasons.append("no positive response mass")
    if {"amp", "amp_qft"} & set(metric_names) and np.linalg.norm(r) == 0.0:
        reasons.append("zero L2 norm")
    return reasons


def run_pipeline(config: RunConfig) -> dict:
    """Execute all stages; returns the manifest dict.  See module docstring."""
    ws = _Workspace(config.outdir)
    timings: dict[str, float] = {}
    try:
        return _run_stages(config, ws, timings)
    except StageError:
        ws.cleanup()
        raise
    except Exception as exc:  # tag unexpected failures with a stage too
        ws.cleanup()
        raise StageError("internal", str(exc)) from exc


def _run_stages(config: RunConfig, ws: _Workspace, timings: dict) -> dict:
    def staged(stage, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except StageError:
            raise
        except (DataFormatError, NonFiniteMetricError, ValueError, OSError) as exc:
            raise StageError(stage, str(exc)) from exc
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start
        return result

    # ingest ---------------------------------------------------------------
    def ingest():
        if config.input is not None:
            curves = ingest_csv(config.input)
        else:
            curves = generate_synthetic(config.synthetic)
        skipped = []
        if config.skip_degenerate:
            kept = []
            for c in curves:
                reasons = _degenerate_reasons(c, config.metrics)
                if reasons:
                    skipped.append({"neuron_id": c.neuron_id, "reasons": reasons})
                else:
                    kept.append(c)
            curves = kept
        if len(curves) < 2:
            raise DataFormatError("need at least two usable curves")
        ws.write_text(curves_to_csv(curves), "curves.csv")
        return curves, skipped

    curves, skipped = staged("ingest", ingest)
    specs = config.metric_specs()

    # metrics ----------------------------------------------------------------
    def compute_metrics():
        executor = None
        try:
            if config.jobs > 1:
                executor = ThreadPoolExecutor(max_workers=config.jobs)
            out = {}
            for spec in specs:
                m = build_distance_matrix(curves, spec, executor=executor)
                ws.write_text(matrix_to_csv(m), "metrics", f"{spec.name}.csv")
                ws.write_text(matrix_to_json(m), "metrics", f"{spec.name}.json")
                ws.write_text(
                    matrix_to_csv(to_canonical_distance(m)),
                    "metrics",
                    f"{spec.name}.canonical.csv",
                )
                out[spec.name] = m
            return out
        finally:
            if executor is not None:
                executor.shutdown()

    matrices = staged("metrics", compute_metrics)

    # mantel -----------------------------------------------------------------
    def compare_all():
        names = [s.name for s in specs]
        k = len(names)
        r = [[1.0 if i == j else None for j in range(k)] for i in range(k)]
        p = [[None] * k for _ in range(k)]
        pairs = []
        for i in range(k):
            for j in range(i + 1, k):
                seed = hash_fields(config.seed, "mantel", names[i], names[j])
                res = mantel(
                    matrices[names[i]],
                    matrices[names[j]],
                    permutations=config.permutations,
                    seed=seed,
                )
                r[i][j] = r[j][i] = res.statistic_r
                p[i][j] = p[j][i] = res.p_value
                pairs.append(
                    {
                        "metric_a": names[i],
                        "metric_b": names[j],
                        "r": res.statistic_r,
                        "p": res.p_value,
                        "permutations": res.permutations,
                        "seed": seed,
                    }
                )
        doc = {"metrics": names, "permutations": config.permutations, "pairs": pairs,
               "r": r, "p": p}
        ws.write_text(json.dumps(doc, indent=2) + "\n", "mantel.json")
        return doc

    mantel_doc = staged("mantel", compare_all)

    # networks -----------------------------------------------------------------
    def build_networks():
        positions = [c.position for c in curves]
        nets = []
        for spec in specs:
            m = matrices[spec.name]
            for req in config.networks:
                if req.kind == "mst":
                    net = mst(m, positions)
                else:
                    net = top_percent_network(m, req.percent, positions)
                base = f"{spec.name}.{req.tag}"
                ws.write_text(to_graphml(net), "networks", f"{base}.graphml")
                ws.write_text(network_to_json(net), "networks", f"{base}.json")
                nets.append((base, net))
        return nets

    networks = staged("networks", build_networks)

    # render -----------------------------------------------------------------
    def render():
        for spec in specs:
            render_heatmap_svg(matrices[spec.name], ws.path("heatmaps", f"{spec.name}.svg"))
        if config.figures:
            from . import figures  # heavy import, deferred

            for base, net in networks:
                figures.render_network_png(net, ws.path("figures", f"{base}.png"))
            if len(specs) > 1:
                figures.render_mantel_png(
                    mantel_doc["metrics"],
                    [[v if v is not None else np.nan for v in row] for row in mantel_doc["r"]],
                    [[v if v is not None else np.nan for v in row] for row in mantel_doc["p"]],
                    ws.path("figures", "mantel.png"),
                )

    staged("render", render)

    # manifest -----------------------------------------------------------------
    n = len(curves)
    manifest = {
        "package": "qfnet",
        "version": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "seed": config.seed,
        "config": {
            "input": config.input,
            "synthetic": None if config.input else vars(config.synthetic) | {
                "box": list(config.synthetic.box)
            },
            "metrics": list(config.metrics),
            "mode": config.mode,
            "shots": config.shots,
            "permutations": config.permutations,
            "networks": [
                {"kind": r.kind, "percent": r.percent} for r in config.networks
            ],
            "jobs": config.jobs,
            "skip_degenerate": config.skip_degenerate,
            "figures": config.figures,
        },
        "inferred_defaults": INFERRED_DEFAULTS,
        "neurons": n,
        "pairs": n * (n - 1) // 2,
        "skipped_neurons": skipped,
        "metrics": {
            spec.name: {
                "mode": spec.mode,
                "shots": spec.shots,
                "seed": spec.seed,
                "orientation": spec.orientation,
                "pair_evaluations": n * (n - 1) // 2,
            }
            for spec in specs
        },
    }
    manifest["outputs"] = sorted(ws.relative() + ["manifest.json", "timings.json"])
    ws.write_text(json.dumps(manifest, indent=2) + "\n", "manifest.json")
    ws.write_text(
        json.dumps({k: round(v, 6) for k, v in timings.items()}, indent=2) + "\n",
        "timings.json",
    )
    return manifest
