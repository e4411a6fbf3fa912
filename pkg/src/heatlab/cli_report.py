"""Command-line front end and report emission.

Subcommands: ``generate``, ``compute``, ``fit``, ``verify``, ``mc``, ``report``.
Exit codes: 0 success, 1 a ``fails`` verdict under ``--strict``, 2 usage
or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import generators
from .errors import HeatlabError
from .graph_core import WeightedGraph, bfs_distances, read_edges, volume, write_edges
from .markov_kernel import heat_kernel
from .monte_carlo import mc_exit_site, mc_exit_time, mc_kernel
from .potential_theory import (
    annulus_resistance,
    green,
    mean_exit_time,
    smallest_eigenvalue,
)
from .graph_core import ball
from .scaling_laws import ScalingTable, build_scaling_table, fit_exponents, volume_table
from .verify import (
    VERIFIERS,
    ConditionReport,
    VerifierConfig,
    coherence,
    default_centers,
    run_conditions,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ALL_CONDITIONS = "vd,tc,h,gf,er,due,ndle,ple,le,pmv,psmv,ph,mv"


class UsageError(HeatlabError):
    """Bad invocation or unreadable input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# canonical serialisation


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def canonical_json(obj) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    obj = _plain(obj)

    def enc(o, ind):
        pad, pad2 = "  " * ind, "  " * (ind + 1)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad2}{json.dumps(k)}: {enc(o[k], ind + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad2 + enc(v, ind + 1) for v in o) + "\n" + pad + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt_float(o)
        if isinstance(o, int):
            return str(o)
        return json.dumps(o)

    return enc(obj, 0) + "\n"


def _num(s: str):
    if s == "":
        return None
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def samples_to_csv(doc: dict) -> str:
    """Flat per-sample rows ``condition, <fields...>`` with a union header."""
    rows = []
    for cond in doc["conditions"]:
        for s in cond.get("samples", []):
            rows.append({"condition": cond["name"], **_plain(s)})
    cols = ["condition"] + sorted({k for r in rows for k in r} - {"condition"})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else (format(r[c], ".17g") if isinstance(r[c], float)
                                                 else r[c]) for c in cols])
    return buf.getvalue()


def load_csv(text: str) -> list[dict]:
    """Inverse of :func:`samples_to_csv`; empty cells are dropped."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        rec = {"condition": row.pop("condition")}
        rec.update({k: _num(v) for k, v in row.items() if v != ""})
        out.append(rec)
    return out


def rows_to_csv(rows: list[dict]) -> str:
    """Write rows from :func:`load_csv` back in the same layout."""
    by = {}
    for r in rows:
        by.setdefault(r["condition"], []).append({k: v for k, v in r.items() if k != "condition"})
    return samples_to_csv({"conditions": [{"name": k, "samples": v} for k, v in by.items()]})


def _g(v) -> str:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return format(v, ".6g")
    return str(v)


def report_markdown(doc: dict) -> str:
    """Summary table plus the coherence matrix, formatted from the JSON document."""
    lines = [f"# heatlab report: {doc['graph'].get('family', '?')}", "",
             f"graph: `{doc['graph'].get('source', '?')}`, "
             f"{doc['graph'].get('vertex_count', '?')} vertices, config `{doc.get('config_digest', '')[:12]}`",
             "", "| condition | measure | constant | verdict | curve |", "|---|---|---|---|---|"]
    for cond in doc["conditions"]:
        for m in cond["measures"]:
            curve = ", ".join(f"{R}: {_g(v)}" for R, v in sorted(m["curve"].items(), key=lambda kv: int(kv[0])))
            lines.append(f"| {cond['name']} | {m['key']} | {_g(m['constant'])} | {m['verdict']} | {curve} |")
    coh = doc.get("coherence")
    if coh:
        lines += ["", "## coherence", "", "| group | members | verdict |", "|---|---|---|"]
        for gname, grp in coh["groups"].items():
            mem = ", ".join(f"{k}: {v}" for k, v in grp["members"].items())
            lines.append(f"| {gname} | {mem} | {grp['verdict']} |")
        state = "agree" if coh["coherent"] else "DISAGREE: " + ", ".join(coh["split"])
        lines += ["", f"groups: {state}"]
    for cond in doc["conditions"]:
        for note in cond.get("notes", []):
            lines.append(f"- {cond['name']}: {note}")
    return "\n".join(lines) + "\n"


def emit_report(reports, fmt: str = "json", path=None, graph: dict | None = None,
                config: VerifierConfig | None = None) -> str:
    """Serialise condition reports as canonical JSON, per-sample CSV or Markdown.

    ``reports`` is a list of :class:`ConditionReport` or an already built
    report document.  Returns the text and writes it to ``path`` if given.
    """
    if isinstance(reports, dict):
        doc = reports
    else:
        reports = list(reports)
        if not reports:
            raise ValueError("no condition reports to emit")
        doc = build_document(reports, graph or {}, config or VerifierConfig())
    if not doc.get("conditions"):
        raise ValueError("no condition reports to emit")
    if fmt == "json":
        text = canonical_json(doc)
    elif fmt == "csv":
        text = samples_to_csv(doc)
    elif fmt in ("md", "markdown"):
        text = report_markdown(doc)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return text


def build_document(reports: list[ConditionReport], graph: dict, cfg: VerifierConfig) -> dict:
    return _plain({"graph": graph, "config": cfg.to_dict(), "config_digest": cfg.digest(),
                   "conditions": [r.to_dict() for r in reports], "coherence": coherence(reports)})


@dataclass
class RunManifest:
    """What ran, on which input, with which resolved configuration."""

    subcommand: str
    graph_source: str | None = None
    config_digest: str | None = None
    outputs: list = field(default_factory=list)
    wall_clock: float = 0.0
    solver_stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "graph_source": self.graph_source,
                "config_digest": self.config_digest, "outputs": list(self.outputs),
                "wall_clock": self.wall_clock, "solver_stats": self.solver_stats}

    def write(self, path) -> None:
        Path(path).write_text(canonical_json(self.to_dict()))


# ---------------------------------------------------------------------------
# helpers


def _load_graph(path) -> WeightedGraph:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"graph file not found: {path}")
    try:
        return read_edges(p)
    except (ValueError, OSError) as exc:
        raise UsageError(f"cannot read graph {path}: {exc}") from exc


def _load_config(path, overrides: dict) -> VerifierConfig:
    data = {}
    if path:
        p = Path(path)
        if not p.exists():
            raise UsageError(f"config file not found: {path}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = VerifierConfig.from_dict(data)
        cfg.validate()
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad configuration: {exc}") from exc
    return cfg


def _int_list(text):
    if text is None:
        return None
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def table_radius_cap(g: WeightedGraph, centers, want: int) -> int:
    """Largest ``R <= want`` with every ``B(c, R)`` free of truncation and not the whole graph."""
    cap = want
    for c in centers:
        bd = g.boundary_distance[c]
        if np.isfinite(bd):
            cap = min(cap, int(bd))
        else:
            ecc = int(bfs_distances(g, [c]).max())
            cap = min(cap, ecc)
    return cap


def auto_table(g: WeightedGraph, cfg: VerifierConfig) -> ScalingTable:
    """Exit-time table on radii ``1..2 max(radii)`` (clipped to what the graph allows)."""
    centers = default_centers(g, cfg)
    cap = table_radius_cap(g, centers, 2 * max(cfg.radii))
    if cap < 1:
        raise UsageError("graph too small for any exit-time radius")
    return build_scaling_table(g, "exit_time", centers, range(1, cap + 1))


def _write_or_print(text: str, out) -> list:
    if out:
        Path(out).write_text(text)
        return [str(out)]
    sys.stdout.write(text)
    return []


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(a) -> int:
    kw = {"dim": a.dim, "side": a.side, "level": a.level}
    kw = {k: v for k, v in kw.items() if v is not None}
    g = generators.from_family(a.family, **kw)
    write_edges(g, a.out)
    man = RunManifest("generate", None, None, [a.out, a.out + ".json"])
    _finish_manifest(man, a)
    print(canonical_json({"family": g.family, "vertices": g.vertex_count, "edges": g.edge_count,
                          "labels": g.labels}), end="")
    return EXIT_OK


def cmd_compute(a) -> int:
    g = _load_graph(a.graph)
    x = g.vertex(a.x) if a.x is not None else default_centers(g, VerifierConfig(n_centers=1))[0]
    q = a.quantity
    if q == "exit_time":
        f = mean_exit_time(g, x, a.R)
        res = {"E": f.E, "E_bar": f.E_bar}
    elif q == "volume":
        res = {"V": volume(g, x, a.R)}
    elif q == "resistance":
        r = annulus_resistance(g, x, a.r, a.R)
        res = {"rho": r.resistance}
    elif q == "green":
        B = ball(g, x, a.R)
        res = {"g": green(g, B, x).at(g.vertex(a.y) if a.y is not None else x)}
    elif q == "eigenvalue":
        e = smallest_eigenvalue(g, ball(g, x, a.R))
        res = {"lambda": e.value, "iterations": e.iterations}
    elif q == "kernel":
        y = g.vertex(a.y) if a.y is not None else x
        k0, k1 = heat_kernel(g, x, a.n).values[y], heat_kernel(g, x, a.n + 1).values[y]
        res = {"p": float(k0), "p_tilde": float(k0 + k1)}
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(q)
    doc = {"quantity": q, "x": x, "R": a.R, "r": a.r, "n": a.n, "y": a.y, "result": res}
    _write_or_print(canonical_json(doc), a.out)
    return EXIT_OK


def cmd_fit(a) -> int:
    if a.table:
        p = Path(a.table)
        if not p.exists():
            raise UsageError(f"table file not found: {a.table}")
        table = ScalingTable.from_csv(p.read_text())
        vols = ScalingTable.from_csv(Path(a.volumes).read_text()) if a.volumes else None
    elif a.graph:
        g = _load_graph(a.graph)
        cfg = VerifierConfig(n_centers=a.centers)
        centers = default_centers(g, cfg)
        radii = _int_list(a.radii) or list(range(1, table_radius_cap(g, centers, 64) + 1))
        table = build_scaling_table(g, a.source, centers, radii)
        vols = volume_table(g, centers, radii)
        if a.out_table:
            Path(a.out_table).write_text(table.to_csv())
    else:
        raise UsageError("fit needs --table or --graph")
    ex = fit_exponents(table, vols)
    doc = ex.as_dict()
    doc["violations"] = [vars(v) for v in table.violations]
    _write_or_print(canonical_json(doc), a.out)
    return EXIT_OK


def cmd_verify(a) -> int:
    t0 = time.perf_counter()
    g = _load_graph(a.graph)
    overrides = {"radii": _int_list(a.radii), "centers": _int_list(a.center_ids),
                 "stability_factor": a.stability_factor}
    cfg = _load_config(a.config, overrides)
    names = [c.strip() for c in a.conditions.split(",") if c.strip()]
    bad = [c for c in names if c not in VERIFIERS]
    if bad:
        raise UsageError(f"unknown conditions: {', '.join(bad)}")
    table = None
    if any(VERIFIERS[c][1] for c in names):
        if a.table:
            if not Path(a.table).exists():
                raise UsageError(f"table file not found: {a.table}")
            table = ScalingTable.from_csv(Path(a.table).read_text())
            from .scaling_laws import _center_distances
            table.center_distance = _center_distances(g, table.centers)
        else:
            table = auto_table(g, cfg)
    threads = _threads(a.threads)
    if threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: run_conditions(g, [c], table, cfg), names))
        seen, reports = set(), []
        for part in parts:
            for r in part:
                if r.name not in seen:
                    seen.add(r.name)
                    reports.append(r)
    else:
        reports = run_conditions(g, names, table, cfg)
    graph = {"source": str(a.graph), "family": g.family, "vertex_count": g.vertex_count,
             "edge_count": g.edge_count}
    doc = build_document(reports, graph, cfg)
    outputs = _write_or_print(emit_report(doc, "json"), a.out)
    if a.csv:
        emit_report(doc, "csv", a.csv)
        outputs.append(a.csv)
    man = RunManifest("verify", str(a.graph), cfg.digest(), outputs, time.perf_counter() - t0,
                      {"conditions": len(reports), "table_radii": None if table is None
                       else [int(table.radii.min()), int(table.radii.max())]})
    _finish_manifest(man, a)
    if a.strict and any(r.verdict == "fails" for r in reports):
        return EXIT_FAIL
    return EXIT_OK


def cmd_mc(a) -> int:
    g = _load_graph(a.graph)
    x = g.vertex(a.x) if a.x is not None else default_centers(g, VerifierConfig(n_centers=1))[0]
    if a.what == "exittime":
        doc = mc_exit_time(g, x, a.R, a.trials, a.seed, a.threads).to_dict()
    elif a.what == "exitsite":
        doc = mc_exit_site(g, x, a.R, a.trials, a.seed, a.threads).to_dict()
    else:
        if a.y is None:
            raise UsageError("mc kernel needs --y")
        doc = mc_kernel(g, x, g.vertex(a.y), a.n, a.trials, a.seed, a.threads).to_dict()
    _write_or_print(canonical_json(doc), a.out)
    return EXIT_OK


def cmd_report(a) -> int:
    p = Path(a.input)
    if not p.exists():
        raise UsageError(f"report file not found: {a.input}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{a.input} is not a JSON report: {exc}") from exc
    text = emit_report(doc, a.format)
    _write_or_print(text, a.out)
    return EXIT_OK


def _threads(n):
    if n is not None:
        return max(1, n)
    return max(1, int(os.environ.get("HEATLAB_THREADS", "1") or 1))


def _finish_manifest(man: RunManifest, a) -> None:
    if getattr(a, "manifest", None):
        man.outputs.append(a.manifest)
        man.write(a.manifest)


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heatlab", description="Random-walk heat kernel and potential theory lab.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("generate", help="write a generated graph as an edge list")
    s.add_argument("--family", required=True, choices=["lattice", "gasket", "vicsek", "path"])
    s.add_argument("--dim", type=int)
    s.add_argument("--side", type=int)
    s.add_argument("--level", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--manifest")
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("compute", help="one exact quantity")
    s.add_argument("--graph", required=True)
    s.add_argument("--quantity", required=True,
                   choices=["exit_time", "volume", "resistance", "green", "eigenvalue", "kernel"])
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--R", type=int, default=4)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_compute)

    s = sub.add_parser("fit", help="fit scaling exponents")
    s.add_argument("--table")
    s.add_argument("--volumes")
    s.add_argument("--graph")
    s.add_argument("--source", default="exit_time", choices=["exit_time", "rho_v"])
    s.add_argument("--radii", help="e.g. 1..32 or 4,8,16,32")
    s.add_argument("--centers", type=int, default=3)
    s.add_argument("--out-table")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_fit)

    s = sub.add_parser("verify", help="run condition verifiers")
    s.add_argument("--graph", required=True)
    s.add_argument("--conditions", default=ALL_CONDITIONS)
    s.add_argument("--config")
    s.add_argument("--table")
    s.add_argument("--radii")
    s.add_argument("--center-ids", dest="center_ids")
    s.add_argument("--stability-factor", type=float)
    s.add_argument("--threads", type=int)
    s.add_argument("--out")
    s.add_argument("--csv")
    s.add_argument("--manifest")
    s.add_argument("--strict", action="store_true")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("mc", help="Monte Carlo estimates")
    s.add_argument("what", choices=["exittime", "exitsite", "kernel"])
    s.add_argument("--graph", required=True)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--R", type=int, default=4)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_mc)

    s = sub.add_parser("report", help="render a saved report")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--format", default="md", choices=["md", "csv", "json"])
    s.add_argument("--out")
    s.set_defaults(fn=cmd_report)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"heatlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HeatlabError, OSError) as exc:
        print(f"heatlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
