"""Walk through the library on two random cubic curves and one packed pair.

Writes ``free_space.svg`` next to this script.

    python demos/pipeline.py
"""

from pathlib import Path

from smoothfrechet import approx_compute, compute_detailed, decide_detailed, simplify
from smoothfrechet.cli import render_svg
from smoothfrechet.oracle import c_packed_curve, discrete_frechet, random_bezier, sample


def main():
    a = random_bezier(4, degree=3, seed=1)
    b = random_bezier(5, degree=3, seed=2)

    r = compute_detailed(a, b)
    print(f"d_F = {r.value:.9f}  bracket [{r.lower:.9f}, {r.value:.9f}]  via {r.source}, "
          f"{r.decisions} decisions")
    h = 1e-3 * max(a.scale, b.scale)
    print(f"sampled discrete distance at step {h:.1e}: "
          f"{discrete_frechet(sample(a, h), sample(b, h)):.6f}")

    for delta in (0.9 * r.value, 1.1 * r.value):
        d = decide_detailed(a, b, delta)
        print(f"decide({delta:.4f}) = {d.answer}  cells {d.cells_touched}, "
              f"subcells {d.subcells_processed}")

    mu = 0.1 * a.length
    s = simplify(a, mu)
    print(f"simplify(mu={mu:.3f}): {len(a)} -> {len(s.curve)} pieces, "
          f"{len(s.segments)} chords")

    p = c_packed_curve(4, 32, seed=3, length=16.0, gap=1.0)
    q = c_packed_curve(4, 32, seed=4, length=16.0, gap=1.0)
    for eps in (0.5, 0.1):
        print(f"approx_compute(eps={eps}) on 32-piece packed curves: {approx_compute(p, q, eps):.6f}")

    out = Path(__file__).with_name("free_space.svg")
    svg, _ = render_svg(a, b, 1.1 * r.value, 512)
    out.write_text(svg)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
