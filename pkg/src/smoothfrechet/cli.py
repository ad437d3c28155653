"""Command-line front end.

Every command prints a JSON report on stdout.  ``decide`` exits with 0 for
yes and 1 for no; all commands exit with 2 on bad input, unsupported norms,
dimension mismatch or an unwritable output path.  ``SMOOTHFRECHET_THREADS``
caps the number of threads used by the compiled kernels.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import struct
import sys
import time
import warnings
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .approx import approx_compute, approx_decide
from .curves import NormConfig, PiecewiseCurve, curve_from_dict, curve_to_dict
from .decision import decide_detailed
from .errors import FrechetError, NearCriticalWarning, ParameterOutOfRange
from .frechet import compute_detailed
from .freespace import PairContext, PointKind, build_graph
from .oracle import (
    c_packed_curve,
    discrete_frechet,
    free_grid,
    march_boundary,
    random_bezier,
    random_polygonal,
    sample,
    spiral,
)
from .simplify import simplify

__all__ = ["RunReport", "main", "build_parser", "render_svg"]

THREADS_ENV = "SMOOTHFRECHET_THREADS"

KIND_COLORS = {
    PointKind.EH_PLUS: "#d62728",
    PointKind.EH_MINUS: "#ff9896",
    PointKind.EV_PLUS: "#1f77b4",
    PointKind.EV_MINUS: "#aec7e8",
    PointKind.WALL: "#2ca02c",
    PointKind.CUT: "#9467bd",
    PointKind.CORNER: "#000000",
}


@dataclass
class RunReport:
    """JSON record of one command run.

    ``answer`` is a bool for ``decide``, a float for ``compute`` and a dict
    for the other commands.
    """

    command: list[str]
    inputs: dict[str, Any]
    answer: Any
    tolerances: dict[str, float] = field(default_factory=dict)
    perturbations: list[float] = field(default_factory=list)
    cells_touched: int | None = None
    wall_time: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


class UsageError(FrechetError):
    """Bad command-line input that is not a numeric range problem."""


# ---------------------------------------------------------------------------
# I/O helpers


def _read_curve(path: str) -> PiecewiseCurve:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    norm = data.get("norm", 2)
    NormConfig(p=norm.get("p", 2) if isinstance(norm, dict) else norm)
    try:
        return curve_from_dict(data)
    except FrechetError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed curve ({exc})") from exc


def _read_pair(a: str, b: str) -> tuple[PiecewiseCurve, PiecewiseCurve]:
    c1, c2 = _read_curve(a), _read_curve(b)
    if c1.dim != c2.dim:
        raise UsageError(f"dimension mismatch: {c1.dim} vs {c2.dim}")
    return c1, c2


def _write_text(path: str, text: str):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _curve_json(curve: PiecewiseCurve) -> str:
    # fixed key order and float repr keep generated files byte-identical
    return json.dumps(curve_to_dict(curve), indent=1) + "\n"


def _apply_threads():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return
    try:
        k = int(raw)
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be an integer") from exc
    if k < 1:
        raise ParameterOutOfRange(f"{THREADS_ENV} must be at least 1")
    import numba

    with warnings.catch_warnings():
        # numba reports unusable threading layers while probing for one
        warnings.simplefilter("ignore")
        numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args) -> tuple[RunReport, int]:
    if not args.delta > 0:
        raise ParameterOutOfRange("--delta must be positive")
    c1, c2 = _read_pair(args.curve_a, args.curve_b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearCriticalWarning)
        r = decide_detailed(c1, c2, args.delta)
    report = RunReport(
        [], {"curve_a": args.curve_a, "curve_b": args.curve_b, "delta": args.delta},
        bool(r.answer), {"perturbation_eta": 1e-9},
        list(r.perturbations), r.cells_touched)
    report.inputs["near_critical"] = r.near_critical
    report.inputs["delta_used"] = r.delta_used
    return report, 0 if r.answer else 1


def cmd_compute(args) -> tuple[RunReport, int]:
    if not args.tol >= 1e-12:
        raise ParameterOutOfRange("--tol must be at least 1e-12")
    c1, c2 = _read_pair(args.curve_a, args.curve_b)
    r = compute_detailed(c1, c2, tol=args.tol)
    report = RunReport(
        [], {"curve_a": args.curve_a, "curve_b": args.curve_b},
        float(r.value), {"tol": args.tol}, list(r.perturbations))
    report.inputs.update(bracket=[float(r.lower), float(r.value)], source=r.source,
                         decisions=r.decisions, near_critical=r.near_critical)
    return report, 0


def cmd_approx(args) -> tuple[RunReport, int]:
    if not 0.0 < args.eps <= 1.0:
        raise ParameterOutOfRange("--eps must lie in (0, 1]")
    c1, c2 = _read_pair(args.curve_a, args.curve_b)
    inputs = {"curve_a": args.curve_a, "curve_b": args.curve_b, "eps": args.eps}
    if args.delta is None:
        v = approx_compute(c1, c2, args.eps)
        return RunReport([], inputs, {"kind": "value", "value": v}, {"eps": args.eps}), 0
    if not args.delta > 0:
        raise ParameterOutOfRange("--delta must be positive")
    inputs["delta"] = args.delta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearCriticalWarning)
        out = approx_decide(c1, c2, args.delta, args.eps)
    variant = asdict(out.variant)
    answer = {"kind": out.kind, **variant, "mu": out.mu, "near_critical": out.near_critical}
    return RunReport([], inputs, answer, {"eps": args.eps, "mu": out.mu},
                     list(out.perturbations), out.cells_touched), 0


def cmd_simplify(args) -> tuple[RunReport, int]:
    if not args.mu > 0:
        raise ParameterOutOfRange("--mu must be positive")
    curve = _read_curve(args.curve)
    res = simplify(curve, args.mu)
    _write_text(args.output, _curve_json(res.curve))
    answer = {"output": args.output, "pieces": len(res.curve),
              "log": [asdict(e) for e in res.log]}
    return RunReport([], {"curve": args.curve, "mu": args.mu}, answer, {"mu": args.mu}), 0


GENERATORS: dict[str, Callable[..., PiecewiseCurve]] = {
    "bezier": lambda a: random_bezier(a.pieces, a.degree, a.dim, a.seed),
    "polygonal": lambda a: random_polygonal(a.pieces, a.dim, a.seed),
    "cpacked": lambda a: c_packed_curve(a.c, a.pieces, a.seed),
    "spiral": lambda a: spiral(a.turns, a.pieces, a.seed),
}


def cmd_gen(args) -> tuple[RunReport, int]:
    if args.pieces < 1:
        raise ParameterOutOfRange("--pieces must be positive")
    curve = GENERATORS[args.kind](args)
    text = _curve_json(curve)
    if args.output == "-":
        sys.stdout.write(text)
        return None, 0
    _write_text(args.output, text)
    inputs = {k: getattr(args, k) for k in ("kind", "pieces", "degree", "dim", "seed", "c")}
    return RunReport([], inputs, {"output": args.output, "pieces": len(curve)}), 0


def _png(mask: np.ndarray, free_rgb=(222, 235, 247), forbidden_rgb=(255, 255, 255)) -> bytes:
    """Minimal RGB PNG of a boolean image (row 0 at the top)."""
    h, w = mask.shape
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[mask] = free_rgb
    img[~mask] = forbidden_rgb
    raw = b"".join(b"\x00" + img[r].tobytes() for r in range(h))

    def chunk(tag: bytes, data: bytes) -> bytes:
        return (struct.pack(">I", len(data)) + tag + data
                + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF))

    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header)
            + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))


def render_svg(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
               resolution: int = 512, size: int = 640) -> tuple[str, Any]:
    """SVG of the free space diagram with the boundary graph on top.

    The free space is a raster of ``resolution + 1`` samples per axis
    embedded as a PNG; cell walls, marked points and graph edges are vector
    elements.  Each marked point is a ``circle`` whose ``data-x`` and
    ``data-y`` attributes hold its global parameters at full precision.

    Returns
    -------
    svg : str
    graph : BoundaryGraph
    """
    if not 64 <= resolution <= 8192:
        raise ParameterOutOfRange("resolution must lie in [64, 8192]")
    ctx = PairContext(curve1, curve2)
    graph = build_graph(curve1, curve2, delta, context=ctx)
    mask = free_grid(curve1, curve2, graph.delta, resolution)
    # image rows run top to bottom, parameter y runs bottom to top
    png = base64.b64encode(_png(mask.T[::-1])).decode("ascii")
    m, n = len(curve1), len(curve2)
    pad = 20

    def X(x):
        return pad + x * size

    def Y(y):
        return pad + (1.0 - y) * size

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad}" '
           f'height="{size + 2 * pad}" data-delta="{graph.delta!r}" data-m="{m}" data-n="{n}">',
           f'<image x="{pad}" y="{pad}" width="{size}" height="{size}" '
           f'preserveAspectRatio="none" style="image-rendering:pixelated" '
           f'href="data:image/png;base64,{png}"/>',
           '<g id="grid" stroke="#888888" stroke-width="0.5">']
    for i in range(m + 1):
        out.append(f'<line x1="{X(i / m):.3f}" y1="{Y(0):.3f}" x2="{X(i / m):.3f}" '
                   f'y2="{Y(1):.3f}"/>')
    for j in range(n + 1):
        out.append(f'<line x1="{X(0):.3f}" y1="{Y(j / n):.3f}" x2="{X(1):.3f}" '
                   f'y2="{Y(j / n):.3f}"/>')
    out.append("</g>")
    pos = {v.id: v.position for v in graph.vertices}
    out.append('<g id="edges" stroke="#333333" stroke-width="1">')
    for e in graph.edges:
        (x1, y1), (x2, y2) = pos[e.u], pos[e.v]
        out.append(f'<line x1="{X(x1):.3f}" y1="{Y(y1):.3f}" x2="{X(x2):.3f}" '
                   f'y2="{Y(y2):.3f}" data-u="{e.u}" data-v="{e.v}" '
                   f'data-direction="{e.direction}"/>')
    out.append("</g>")
    out.append('<g id="points">')
    for v in graph.vertices:
        x, y = v.position
        out.append(f'<circle class="marked" cx="{X(x):.3f}" cy="{Y(y):.3f}" r="3" '
                   f'fill="{KIND_COLORS[v.kind]}" data-id="{v.id}" data-kind="{v.kind.value}" '
                   f'data-x="{float(x)!r}" data-y="{float(y)!r}"/>')
    out.append("</g>")
    out.append('<g id="legend" font-size="10" font-family="sans-serif">')
    for k, (kind, color) in enumerate(KIND_COLORS.items()):
        out.append(f'<circle cx="{pad + 8 + 90 * k}" cy="{pad / 2}" r="3" fill="{color}"/>'
                   f'<text x="{pad + 14 + 90 * k}" y="{pad / 2 + 3}">{kind.value}</text>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n", graph


def cmd_plot(args) -> tuple[RunReport, int]:
    if not 64 <= args.resolution <= 8192:
        raise ParameterOutOfRange("--resolution must lie in [64, 8192]")
    if not args.delta > 0:
        raise ParameterOutOfRange("--delta must be positive")
    c1, c2 = _read_pair(args.curve_a, args.curve_b)
    svg, graph = render_svg(c1, c2, args.delta, args.resolution)
    _write_text(args.output, svg)
    answer = {"output": args.output, "vertices": len(graph.vertices), "edges": len(graph.edges)}
    inputs = {"curve_a": args.curve_a, "curve_b": args.curve_b, "delta": args.delta,
              "resolution": args.resolution}
    return RunReport([], inputs, answer, {"resolution": 1.0 / args.resolution},
                     list(graph.perturbations)), 0


def cmd_oracle(args) -> tuple[RunReport, int]:
    c1, c2 = _read_pair(args.curve_a, args.curve_b)
    inputs: dict[str, Any] = {"curve_a": args.curve_a, "curve_b": args.curve_b,
                              "method": args.method}
    if args.method == "discrete":
        if not args.h > 0:
            raise ParameterOutOfRange("--h must be positive")
        P, Q = sample(c1, args.h), sample(c2, args.h)
        v = discrete_frechet(P, Q)
        inputs["h"] = args.h
        return RunReport([], inputs, {"value": v, "samples": [len(P.points), len(Q.points)]},
                         {"h": args.h}), 0
    if not 64 <= args.resolution <= 8192:
        raise ParameterOutOfRange("--resolution must lie in [64, 8192]")
    if args.delta is None or not args.delta > 0:
        raise ParameterOutOfRange("--delta must be positive")
    g = march_boundary(c1.pieces[args.i], c2.pieces[args.j], args.delta, args.resolution)
    inputs.update(delta=args.delta, resolution=args.resolution, cell=[args.i, args.j])
    answer = {"vertices": [list(map(float, v)) for v in g.vertices],
              "kinds": list(g.kinds), "pairs": [list(p) for p in g.pairs]}
    return RunReport([], inputs, answer, {"resolution": 1.0 / args.resolution}), 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smoothfrechet",
        description="Fréchet distance between piecewise polynomial curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def pair(sp):
        sp.add_argument("curve_a", help="first curve (JSON)")
        sp.add_argument("curve_b", help="second curve (JSON)")

    sp = sub.add_parser("decide", help="is the distance at most --delta? (exit 0 yes, 1 no)")
    pair(sp)
    sp.add_argument("--delta", type=float, required=True)
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("compute", help="distance with its certified bracket")
    pair(sp)
    sp.add_argument("--tol", type=float, default=1e-9, help="relative bracket width")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("approx", help="(1 + eps)-approximate decision or value")
    pair(sp)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, default=None,
                    help="decide against this value instead of approximating the distance")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("simplify", help="mu-simplification of a curve")
    sp.add_argument("curve")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_simplify)

    sp = sub.add_parser("gen", help="seeded random curve")
    sp.add_argument("--kind", choices=sorted(GENERATORS), default="bezier")
    sp.add_argument("--pieces", type=int, default=4)
    sp.add_argument("--degree", type=int, default=3)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--c", type=int, default=4, help="packedness of the cpacked family")
    sp.add_argument("--turns", type=float, default=3.0, help="turns of the spiral")
    sp.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("plot", help="SVG of the free space diagram")
    pair(sp)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--resolution", type=int, default=512)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("oracle", help="reference computations")
    sp.add_argument("method", choices=["discrete", "march"])
    pair(sp)
    sp.add_argument("--h", type=float, default=1e-3, help="sampling step for 'discrete'")
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--resolution", type=int, default=2048)
    sp.add_argument("--i", type=int, default=0, help="piece of curve_a for 'march'")
    sp.add_argument("--j", type=int, default=0, help="piece of curve_b for 'march'")
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        _apply_threads()
        report, code = args.func(args)
    except (FrechetError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if report is not None:
        report.command = ["smoothfrechet"] + argv
        report.wall_time = time.perf_counter() - start
        print(report.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
