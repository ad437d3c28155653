"""Compiled kernels for Bernstein polynomials on [0, 1] and [0, 1]^2.

Everything here works on raw coefficient arrays.  Univariate coefficient
vectors have shape ``(k + 1,)``, vector-valued pieces ``(k + 1, d)`` and
tensor-product polynomials ``(p + 1, q + 1)`` with the first axis in x.
"""

import numpy as np
from numba import njit

__all__ = [
    "decasteljau",
    "decasteljau1",
    "split1",
    "split_rows",
    "tensor_eval",
    "tensor_eval_many",
    "tensor_restrict",
    "isolate_kernel",
    "solve_box_system",
    "sphere_coeffs",
    "line_at_x",
    "line_at_y",
    "level_system",
    "segment_extrema",
    "line_profile",
    "probe_from_start",
    "interval_values",
    "KIND_SIMPLE",
    "KIND_ODD_CLUSTER",
    "KIND_EVEN_CLUSTER",
]

KIND_SIMPLE = 0
KIND_ODD_CLUSTER = 1
KIND_EVEN_CLUSTER = 2


@njit(cache=True)
def decasteljau(c, t):
    """Evaluate a vector-valued Bernstein polynomial at ``t``."""
    n, d = c.shape
    b = c.copy()
    s = 1.0 - t
    for r in range(1, n):
        for i in range(n - r):
            for k in range(d):
                b[i, k] = s * b[i, k] + t * b[i + 1, k]
    return b[0].copy()


@njit(cache=True)
def decasteljau1(c, t):
    """Evaluate a scalar Bernstein polynomial at ``t``."""
    n = c.shape[0]
    b = c.copy()
    s = 1.0 - t
    for r in range(1, n):
        for i in range(n - r):
            b[i] = s * b[i] + t * b[i + 1]
    return b[0]


@njit(cache=True)
def split1(c, t):
    """Subdivide a scalar Bernstein polynomial at ``t``."""
    n = c.shape[0]
    b = c.copy()
    s = 1.0 - t
    left = np.empty(n)
    right = np.empty(n)
    left[0] = b[0]
    right[n - 1] = b[n - 1]
    for r in range(1, n):
        for i in range(n - r):
            b[i] = s * b[i] + t * b[i + 1]
        left[r] = b[0]
        right[n - 1 - r] = b[n - 1 - r]
    return left, right


@njit(cache=True)
def split_rows(c, t):
    """Subdivide along the first axis of a 2-D coefficient array."""
    n, d = c.shape
    b = c.copy()
    s = 1.0 - t
    left = np.empty((n, d))
    right = np.empty((n, d))
    left[0] = b[0]
    right[n - 1] = b[n - 1]
    for r in range(1, n):
        for i in range(n - r):
            for k in range(d):
                b[i, k] = s * b[i, k] + t * b[i + 1, k]
        left[r] = b[0]
        right[n - 1 - r] = b[n - 1 - r]
    return left, right


@njit(cache=True)
def _split_cols(c, t):
    a, n = c.shape
    s = 1.0 - t
    left = np.empty((a, n))
    right = np.empty((a, n))
    b = np.empty(n)
    for i in range(a):
        for j in range(n):
            b[j] = c[i, j]
        left[i, 0] = b[0]
        right[i, n - 1] = b[n - 1]
        for r in range(1, n):
            for j in range(n - r):
                b[j] = s * b[j] + t * b[j + 1]
            left[i, r] = b[0]
            right[i, n - 1 - r] = b[n - 1 - r]
    return left, right


@njit(cache=True)
def _basis(n, t, out):
    # Bernstein basis of degree n - 1 at t, by the de Casteljau recurrence
    out[0] = 1.0
    s = 1.0 - t
    for r in range(1, n):
        out[r] = t * out[r - 1]
        for i in range(r - 1, 0, -1):
            out[i] = s * out[i] + t * out[i - 1]
        out[0] = s * out[0]


@njit(cache=True)
def tensor_eval(T, x, y):
    """Evaluate a tensor-product Bernstein polynomial at ``(x, y)``."""
    a, b = T.shape
    bx = np.empty(a)
    by = np.empty(b)
    _basis(a, x, bx)
    _basis(b, y, by)
    val = 0.0
    for i in range(a):
        acc = 0.0
        for j in range(b):
            acc += T[i, j] * by[j]
        val += bx[i] * acc
    return val


@njit(cache=True)
def tensor_eval_many(T, xs, ys):
    out = np.empty(xs.shape[0])
    for k in range(xs.shape[0]):
        out[k] = tensor_eval(T, xs[k], ys[k])
    return out


@njit(cache=True)
def _restrict_rows(c, t0, t1):
    # coefficients of the same polynomial re-parametrised over [t0, t1]
    _, right = split_rows(c, t0)
    if t0 >= 1.0:
        return right
    left, _ = split_rows(right, (t1 - t0) / (1.0 - t0))
    return left


@njit(cache=True)
def tensor_restrict(T, x0, x1, y0, y1):
    """Coefficients of ``T`` over the box ``[x0, x1] x [y0, y1]``."""
    R = _restrict_rows(T, x0, x1)
    R = _restrict_rows(R.T.copy(), y0, y1)
    return R.T.copy()


# ---------------------------------------------------------------------------
# univariate root isolation


@njit(cache=True)
def _sign_first(c):
    for v in c:
        if v > 0.0:
            return 1
        if v < 0.0:
            return -1
    return 0


@njit(cache=True)
def _sign_last(c):
    for k in range(c.shape[0] - 1, -1, -1):
        if c[k] > 0.0:
            return 1
        if c[k] < 0.0:
            return -1
    return 0


@njit(cache=True)
def _variations(c):
    count = 0
    last = 0
    for v in c:
        if v > 0.0:
            s = 1
        elif v < 0.0:
            s = -1
        else:
            continue
        if last != 0 and s != last:
            count += 1
        last = s
    return count


@njit(cache=True)
def _bisect(c, lo, hi, tol):
    s0 = _sign_first(c)
    u0 = 0.0
    u1 = 1.0
    w = hi - lo
    for _ in range(200):
        if (u1 - u0) * w <= tol:
            break
        m = 0.5 * (u0 + u1)
        if m <= u0 or m >= u1:
            break
        v = decasteljau1(c, m)
        if v == 0.0:
            return lo + m * w, lo + m * w
        if (v > 0.0) == (s0 > 0):
            u0 = m
        else:
            u1 = m
    return lo + u0 * w, lo + u1 * w


@njit(cache=True)
def _leading_zeros(c):
    k = 0
    while k < c.shape[0] and c[k] == 0.0:
        k += 1
    return k


@njit(cache=True)
def isolate_kernel(c, a, b, tol, cluster_width):
    """Isolate the real roots of a Bernstein polynomial given over [a, b].

    Returns
    -------
    lo, hi : ndarray
        Bracket of each root, sorted by ``lo``.
    kind : ndarray of int
        ``KIND_SIMPLE`` for a bracketed sign change, ``KIND_ODD_CLUSTER`` for
        an unseparated cluster with a net sign change and
        ``KIND_EVEN_CLUSTER`` for one without (a tangency).
    """
    los = [0.0]
    his = [0.0]
    kinds = [0]
    los.pop()
    his.pop()
    kinds.pop()
    n = c.shape[0]
    z = _leading_zeros(c)
    if 0 < z < n:
        los.append(a)
        his.append(a)
        kinds.append(KIND_SIMPLE if z % 2 == 1 else KIND_EVEN_CLUSTER)
    z = _leading_zeros(c[::-1].copy())
    if 0 < z < n:
        los.append(b)
        his.append(b)
        kinds.append(KIND_SIMPLE if z % 2 == 1 else KIND_EVEN_CLUSTER)

    stack_c = [c.copy()]
    stack_lo = [a]
    stack_hi = [b]
    while len(stack_c) > 0:
        cc = stack_c.pop()
        lo = stack_lo.pop()
        hi = stack_hi.pop()
        v = _variations(cc)
        if v == 0:
            continue
        if v == 1:
            r0, r1 = _bisect(cc, lo, hi, tol)
            los.append(r0)
            his.append(r1)
            kinds.append(KIND_SIMPLE)
            continue
        if hi - lo <= cluster_width:
            los.append(lo)
            his.append(hi)
            if _sign_first(cc) == _sign_last(cc):
                kinds.append(KIND_EVEN_CLUSTER)
            else:
                kinds.append(KIND_ODD_CLUSTER)
            continue
        left, right = split1(cc, 0.5)
        mid = 0.5 * (lo + hi)
        if right[0] == 0.0:
            los.append(mid)
            his.append(mid)
            if _sign_last(left) == _sign_first(right):
                kinds.append(KIND_EVEN_CLUSTER)
            else:
                kinds.append(KIND_SIMPLE)
        stack_c.append(right)
        stack_lo.append(mid)
        stack_hi.append(hi)
        stack_c.append(left)
        stack_lo.append(lo)
        stack_hi.append(mid)

    k = len(los)
    out_lo = np.empty(k)
    out_hi = np.empty(k)
    out_kind = np.empty(k, dtype=np.int64)
    for i in range(k):
        out_lo[i] = los[i]
        out_hi[i] = his[i]
        out_kind[i] = kinds[i]
    order = np.argsort(out_lo, kind="mergesort")
    return out_lo[order], out_hi[order], out_kind[order]


# ---------------------------------------------------------------------------
# bivariate systems by subdivision


@njit(cache=True)
def _excluded(T):
    lo = T.min()
    hi = T.max()
    return lo > 0.0 or hi < 0.0


@njit(cache=True)
def _jacobian(Fx, Fy, Gx, Gy, x, y):
    return (
        tensor_eval(Fx, x, y),
        tensor_eval(Fy, x, y),
        tensor_eval(Gx, x, y),
        tensor_eval(Gy, x, y),
    )


@njit(cache=True)
def _newton(F, G, Fx, Fy, Gx, Gy, x, y, iters):
    prev = np.inf
    for _ in range(iters):
        f = tensor_eval(F, x, y)
        g = tensor_eval(G, x, y)
        a, b, c, d = _jacobian(Fx, Fy, Gx, Gy, x, y)
        det = a * d - b * c
        if det == 0.0:
            return x, y, False
        dx = (d * f - b * g) / det
        dy = (a * g - c * f) / det
        x -= dx
        y -= dy
        step = abs(dx) + abs(dy)
        if step <= 1e-15 * (1.0 + abs(x) + abs(y)):
            return x, y, True
        # stalled at rounding level
        if step >= prev and step <= 1e-12:
            return x, y, True
        prev = step
    return x, y, True


@njit(cache=True)
def _gauss_newton(F, G, Fx, Fy, Gx, Gy, x, y, iters):
    # minimum-norm steps, usable on rank-deficient solution sets
    for _ in range(iters):
        f = tensor_eval(F, x, y)
        g = tensor_eval(G, x, y)
        a, b, c, d = _jacobian(Fx, Fy, Gx, Gy, x, y)
        J = np.array([[a, b], [c, d]])
        step = np.linalg.pinv(J, rcond=1e-6) @ np.array([f, g])
        x -= step[0]
        y -= step[1]
        if abs(step[0]) + abs(step[1]) <= 1e-15:
            break
    return x, y


@njit(cache=True)
def _extend_rows(T, t0, t1, out):
    # out[:, j] holds column j of T re-expanded over [t0, t1]
    n, m = T.shape
    tmp = np.empty(n)
    u = t0 / t1
    for j in range(m):
        for i in range(n):
            tmp[i] = T[i, j]
        s = 1.0 - t1
        out[0, j] = tmp[0]
        for r in range(1, n):
            for i in range(n - r):
                tmp[i] = s * tmp[i] + t1 * tmp[i + 1]
            out[r, j] = tmp[0]
        for i in range(n):
            tmp[i] = out[i, j]
        s = 1.0 - u
        out[n - 1, j] = tmp[n - 1]
        for r in range(1, n):
            for i in range(n - r):
                tmp[i] = s * tmp[i] + u * tmp[i + 1]
            out[n - 1 - r, j] = tmp[n - 1 - r]


@njit(cache=True)
def _gradient_hull(Tb, t0, t1, wx, wy):
    """Bounds of both partials of a box polynomial over a stretched box.

    ``Tb`` holds coefficients over a box of width ``wx`` by ``wy``; the bounds
    are taken over the same box stretched to local ``[t0, t1]^2``.
    """
    a, b = Tb.shape
    W1 = np.empty((a, b))
    _extend_rows(Tb, t0, t1, W1)
    W2 = np.empty((b, a))
    _extend_rows(W1.T.copy(), t0, t1, W2)
    # W2[j, i] = coefficient (i, j) over the stretched box
    span = t1 - t0
    xlo = np.inf
    xhi = -np.inf
    ylo = np.inf
    yhi = -np.inf
    if a > 1:
        sx = (a - 1) / (span * wx)
        for i in range(a - 1):
            for j in range(b):
                v = (W2[j, i + 1] - W2[j, i]) * sx
                xlo = min(xlo, v)
                xhi = max(xhi, v)
    else:
        xlo = 0.0
        xhi = 0.0
    if b > 1:
        sy = (b - 1) / (span * wy)
        for i in range(a):
            for j in range(b - 1):
                v = (W2[j + 1, i] - W2[j, i]) * sy
                ylo = min(ylo, v)
                yhi = max(yhi, v)
    else:
        ylo = 0.0
        yhi = 0.0
    return xlo, xhi, ylo, yhi


@njit(cache=True)
def _box_gradient(Tb, wx, wy):
    # partial-derivative bounds over the box itself, no re-expansion
    a, b = Tb.shape
    xlo = 0.0
    xhi = 0.0
    ylo = 0.0
    yhi = 0.0
    if a > 1:
        xlo = np.inf
        xhi = -np.inf
        sx = (a - 1) / wx
        for i in range(a - 1):
            for j in range(b):
                v = (Tb[i + 1, j] - Tb[i, j]) * sx
                xlo = min(xlo, v)
                xhi = max(xhi, v)
    if b > 1:
        ylo = np.inf
        yhi = -np.inf
        sy = (b - 1) / wy
        for i in range(a):
            for j in range(b - 1):
                v = (Tb[i, j + 1] - Tb[i, j]) * sy
                ylo = min(ylo, v)
                yhi = max(yhi, v)
    return xlo, xhi, ylo, yhi


@njit(cache=True)
def _imul(a0, a1, b0, b1):
    p0 = a0 * b0
    p1 = a0 * b1
    p2 = a1 * b0
    p3 = a1 * b1
    return min(min(p0, p1), min(p2, p3)), max(max(p0, p1), max(p2, p3))


@njit(cache=True)
def _det_excludes_zero(Fb, Gb, wx, wy):
    fx0, fx1, fy0, fy1 = _box_gradient(Fb, wx, wy)
    gx0, gx1, gy0, gy1 = _box_gradient(Gb, wx, wy)
    p0, p1 = _imul(fx0, fx1, gy0, gy1)
    q0, q1 = _imul(fy0, fy1, gx0, gx1)
    return p0 - q1 > 0.0 or p1 - q0 < 0.0


@njit(cache=True)
def _krawczyk(F, G, Fx, Fy, Gx, Gy, Fb, Gb, x0, x1, y0, y1):
    """Return 1 if the box provably holds one root, 0 if none, -1 if unknown.

    The test runs on the box inflated by 25% so roots on box faces are
    certified by at least one of the neighbouring boxes.
    """
    cx = 0.5 * (x0 + x1)
    cy = 0.5 * (y0 + y1)
    rx = 0.625 * (x1 - x0)
    ry = 0.625 * (y1 - y0)
    a, b, c, d = _jacobian(Fx, Fy, Gx, Gy, cx, cy)
    det = a * d - b * c
    scale = abs(a) + abs(b) + abs(c) + abs(d)
    if scale == 0.0 or abs(det) <= 1e-14 * scale * scale:
        return -1
    y00 = d / det
    y01 = -b / det
    y10 = -c / det
    y11 = a / det
    f = tensor_eval(F, cx, cy)
    g = tensor_eval(G, cx, cy)
    k0x = cx - (y00 * f + y01 * g)
    k0y = cy - (y10 * f + y11 * g)
    bx0, bx1, by0, by1 = cx - rx, cx + rx, cy - ry, cy + ry
    fx0, fx1, fy0, fy1 = _gradient_hull(Fb, -0.125, 1.125, x1 - x0, y1 - y0)
    gx0, gx1, gy0, gy1 = _gradient_hull(Gb, -0.125, 1.125, x1 - x0, y1 - y0)
    # M = I - Y J(X'), bounded entrywise in absolute value
    lo, hi = _imul(y00, y00, fx0, fx1)
    l2, h2 = _imul(y01, y01, gx0, gx1)
    m00 = max(abs(1.0 - lo - l2), abs(1.0 - hi - h2))
    lo, hi = _imul(y00, y00, fy0, fy1)
    l2, h2 = _imul(y01, y01, gy0, gy1)
    m01 = max(abs(lo + l2), abs(hi + h2))
    lo, hi = _imul(y10, y10, fx0, fx1)
    l2, h2 = _imul(y11, y11, gx0, gx1)
    m10 = max(abs(lo + l2), abs(hi + h2))
    lo, hi = _imul(y10, y10, fy0, fy1)
    l2, h2 = _imul(y11, y11, gy0, gy1)
    m11 = max(abs(1.0 - lo - l2), abs(1.0 - hi - h2))
    radx = (m00 * rx + m01 * ry) * (1.0 + 1e-10) + 1e-16
    rady = (m10 * rx + m11 * ry) * (1.0 + 1e-10) + 1e-16
    if (
        k0x - radx > bx1
        or k0x + radx < bx0
        or k0y - rady > by1
        or k0y + rady < by0
    ):
        return 0
    if (
        k0x - radx > bx0
        and k0x + radx < bx1
        and k0y - rady > by0
        and k0y + rady < by1
    ):
        return 1
    return -1


@njit(cache=True)
def _singular_direction(Fx, Fy, Gx, Gy, x, y):
    a, b, c, d = _jacobian(Fx, Fy, Gx, Gy, x, y)
    J = np.array([[a, b], [c, d]])
    _, s, vt = np.linalg.svd(J)
    return s[0], s[1], vt[1, 0], vt[1, 1]


@njit(cache=True)
def solve_box_system(F, G, Fx, Fy, Gx, Gy, min_width, curve_width, scale,
                     max_boxes):
    """Solve ``F = G = 0`` on the closed unit square by subdivision.

    Parameters
    ----------
    F, G : ndarray
        Tensor Bernstein coefficients of the two equations.
    Fx, Fy, Gx, Gy : ndarray
        Coefficients of their partial derivatives.
    min_width : float
        Boxes that neither certify nor vanish below this width are reported
        as clusters.
    curve_width : float
        Below this width, a box whose solution set continues along the
        kernel of the Jacobian is reported as part of a solution curve.
    scale : float
        Magnitude of the equations, used for residual thresholds.
    max_boxes : int
        Work cap; boxes left when it is reached are reported as clusters.

    Returns
    -------
    roots : ndarray, shape (k, 2)
        Certified isolated roots.
    clusters : ndarray, shape (c, 4)
        Unresolved boxes ``(x0, x1, y0, y1)``.
    curve : ndarray, shape (e, 4)
        Boxes on a positive-dimensional solution set with a point on it,
        ``(x, y, x1 - x0, y1 - y0)``.
    """
    roots_x = [0.0]
    roots_y = [0.0]
    roots_x.pop()
    roots_y.pop()
    clusters = [(0.0, 0.0, 0.0, 0.0)]
    clusters.pop()
    curve = [(0.0, 0.0, 0.0, 0.0)]
    curve.pop()

    stack_F = [F.copy()]
    stack_G = [G.copy()]
    stack_box = [(0.0, 1.0, 0.0, 1.0)]
    processed = 0
    tiny = 1e-13 * scale
    while len(stack_F) > 0:
        Fb = stack_F.pop()
        Gb = stack_G.pop()
        x0, x1, y0, y1 = stack_box.pop()
        processed += 1
        if processed > max_boxes:
            clusters.append((x0, x1, y0, y1))
            continue
        if _excluded(Fb) or _excluded(Gb):
            continue
        wx = x1 - x0
        wy = y1 - y0
        w = max(wx, wy)
        if w <= 0.5 and _det_excludes_zero(Fb, Gb, wx, wy):
            status = _krawczyk(F, G, Fx, Fy, Gx, Gy, Fb, Gb, x0, x1, y0, y1)
            if status == 0:
                continue
            if status == 1:
                rx, ry, _ = _newton(F, G, Fx, Fy, Gx, Gy,
                                    0.5 * (x0 + x1), 0.5 * (y0 + y1), 60)
                ex = 1e-12 + 0.25 * wx
                ey = 1e-12 + 0.25 * wy
                if x0 - ex <= rx <= x1 + ex and y0 - ey <= ry <= y1 + ey:
                    roots_x.append(rx)
                    roots_y.append(ry)
                continue
        if w <= curve_width:
            px, py = _gauss_newton(F, G, Fx, Fy, Gx, Gy,
                                   0.5 * (x0 + x1), 0.5 * (y0 + y1), 30)
            res = abs(tensor_eval(F, px, py)) + abs(tensor_eval(G, px, py))
            inside = (x0 - wx <= px <= x1 + wx) and (y0 - wy <= py <= y1 + wy)
            if res <= tiny and inside:
                s0, s1, vx, vy = _singular_direction(Fx, Fy, Gx, Gy, px, py)
                if s1 <= 1e-7 * max(s0, 1e-300) or s0 == 0.0:
                    h = 0.5 * w
                    qx, qy = _gauss_newton(F, G, Fx, Fy, Gx, Gy,
                                           px + h * vx, py + h * vy, 30)
                    moved = abs(qx - px - h * vx) + abs(qy - py - h * vy)
                    qres = (abs(tensor_eval(F, qx, qy))
                            + abs(tensor_eval(G, qx, qy)))
                    if qres <= tiny and moved <= 0.05 * h:
                        curve.append((px, py, wx, wy))
                        continue
        if w <= min_width:
            clusters.append((x0, x1, y0, y1))
            continue
        if wx >= wy:
            F0, F1 = split_rows(Fb, 0.5)
            G0, G1 = split_rows(Gb, 0.5)
            xm = 0.5 * (x0 + x1)
            b0 = (x0, xm, y0, y1)
            b1 = (xm, x1, y0, y1)
        else:
            F0, F1 = _split_cols(Fb, 0.5)
            G0, G1 = _split_cols(Gb, 0.5)
            ym = 0.5 * (y0 + y1)
            b0 = (x0, x1, y0, ym)
            b1 = (x0, x1, ym, y1)
        stack_F.append(F1)
        stack_G.append(G1)
        stack_box.append(b1)
        stack_F.append(F0)
        stack_G.append(G0)
        stack_box.append(b0)

    out_roots = np.empty((len(roots_x), 2))
    for k in range(len(roots_x)):
        out_roots[k, 0] = roots_x[k]
        out_roots[k, 1] = roots_y[k]
    out_clusters = np.empty((len(clusters), 4))
    for k in range(len(clusters)):
        for j in range(4):
            out_clusters[k, j] = clusters[k][j]
    out_curve = np.empty((len(curve), 4))
    for k in range(len(curve)):
        for j in range(4):
            out_curve[k, j] = curve[k][j]
    return out_roots, out_clusters, out_curve


@njit(cache=True)
def sphere_coeffs(cp, center, r2):
    """Bernstein coefficients of ``|P(t) - center|^2 - r2`` for a piece ``P``."""
    n, d = cp.shape
    k = n - 1
    wk = np.empty(n)
    wk[0] = 1.0
    for i in range(1, n):
        wk[i] = wk[i - 1] * (k - i + 1) / i
    w2 = np.empty(2 * k + 1)
    w2[0] = 1.0
    for i in range(1, 2 * k + 1):
        w2[i] = w2[i - 1] * (2 * k - i + 1) / i
    out = np.zeros(2 * k + 1)
    diff = np.empty(n)
    for j in range(d):
        for i in range(n):
            diff[i] = (cp[i, j] - center[j]) * wk[i]
        for a in range(n):
            for b in range(n):
                out[a + b] += diff[a] * diff[b]
    for i in range(2 * k + 1):
        out[i] = out[i] / w2[i] - r2
    return out


@njit(cache=True)
def line_at_x(T, x):
    """Coefficients in ``y`` of ``T`` restricted to the vertical line ``x``."""
    a, b = T.shape
    bx = np.empty(a)
    _basis(a, x, bx)
    out = np.zeros(b)
    for i in range(a):
        for j in range(b):
            out[j] += bx[i] * T[i, j]
    return out


@njit(cache=True)
def line_at_y(T, y):
    """Coefficients in ``x`` of ``T`` restricted to the horizontal line ``y``."""
    a, b = T.shape
    by = np.empty(b)
    _basis(b, y, by)
    out = np.zeros(a)
    for i in range(a):
        for j in range(b):
            out[i] += by[j] * T[i, j]
    return out


@njit(cache=True)
def _diff0(T):
    a, b = T.shape
    if a == 1:
        return np.zeros((1, b))
    out = np.empty((a - 1, b))
    for i in range(a - 1):
        for j in range(b):
            out[i, j] = (a - 1) * (T[i + 1, j] - T[i, j])
    return out


@njit(cache=True)
def _diff1(T):
    a, b = T.shape
    if b == 1:
        return np.zeros((a, 1))
    out = np.empty((a, b - 1))
    for i in range(a):
        for j in range(b - 1):
            out[i, j] = (b - 1) * (T[i, j + 1] - T[i, j])
    return out


@njit(cache=True)
def level_system(F, G, d2, min_width, curve_width, scale, max_boxes):
    """Solve ``F - d2 = G = 0``, building the derivative tensors in place."""
    FF = F - d2
    return solve_box_system(FF, G, _diff0(FF), _diff1(FF), _diff0(G), _diff1(G),
                            min_width, curve_width, scale, max_boxes)


@njit(cache=True)
def _orth(u, v):
    # component of u orthogonal to v
    vv = 0.0
    uv = 0.0
    for k in range(u.shape[0]):
        vv += v[k] * v[k]
        uv += u[k] * v[k]
    out = u.copy()
    if vv > 0.0:
        for k in range(u.shape[0]):
            out[k] -= uv / vv * v[k]
    return out, uv, vv


@njit(cache=True)
def segment_extrema(p0, p1, q0, q1, d2, along_x):
    """Points of ``|P(x) - Q(y)|^2 = d2`` with an axis-parallel tangent.

    Closed form for two segments.  With ``along_x`` the condition is
    ``f_x = 0``, otherwise ``f_y = 0``.  Returns ``(points, status)`` where
    status 1 flags a degenerate (critical) configuration.
    """
    a = p0 - q0
    b = p1 - p0
    c = q1 - q0
    out = np.empty((2, 2))
    if along_x:
        # f_x = 0 gives x = (<c, b> y - <a, b>) / |b|^2
        u, ab, bb = _orth(a, b)
        w, cb, _ = _orth(c, b)
        v = -w
        if bb == 0.0:
            return out[:0], 1
    else:
        u, ac, cc = _orth(a, c)
        v, bc, _ = _orth(b, c)
        if cc == 0.0:
            return out[:0], 1
    A = 0.0
    B = 0.0
    C = -d2
    for k in range(a.shape[0]):
        A += v[k] * v[k]
        B += u[k] * v[k]
        C += u[k] * u[k]
    tiny = 1e-13 * max(d2, 1e-300)
    if A <= 1e-14 * (abs(C) + d2):
        # parallel pieces: no extrema unless the level set degenerates
        if abs(C) <= tiny:
            return out[:0], 1
        return out[:0], 0
    disc = B * B - A * C
    if abs(disc) <= 1e-13 * max(B * B, abs(A * C), 1e-300):
        return out[:0], 1
    if disc < 0.0:
        return out[:0], 0
    sq = np.sqrt(disc)
    # stable roots of A t^2 + 2 B t + C
    qv = -(B + sq) if B >= 0.0 else -(B - sq)
    r1 = qv / A
    r2 = C / qv if qv != 0.0 else r1
    n = 0
    for t in (min(r1, r2), max(r1, r2)):
        if along_x:
            y = t
            x = (cb * y - ab) / bb
        else:
            x = t
            y = (ac + bc * x) / cc
        out[n, 0] = x
        out[n, 1] = y
        n += 1
    return out[:n], 0


@njit(cache=True)
def line_profile(c, tol, cluster_width):
    """Roots of a univariate polynomial and its values between them.

    Returns ``(roots, kinds, values)`` where ``values[k]`` is the polynomial
    at the midpoint of the ``k``-th interval of ``[0, roots..., 1]``.
    """
    lo, hi, kind = isolate_kernel(c, 0.0, 1.0, tol, cluster_width)
    k = lo.shape[0]
    roots = np.empty(k)
    kinds = np.empty(k, dtype=np.int64)
    n = 0
    last_hi = -1.0
    for q in range(k):
        if n > 0 and lo[q] <= last_hi:
            continue  # exact zero shared by neighbouring subintervals
        roots[n] = 0.5 * (lo[q] + hi[q])
        kinds[n] = kind[q]
        last_hi = hi[q]
        n += 1
    roots = roots[:n]
    kinds = kinds[:n]
    values = np.empty(n + 1)
    prev = 0.0
    for q in range(n + 1):
        nxt = roots[q] if q < n else 1.0
        values[q] = decasteljau1(c, 0.5 * (prev + nxt))
        prev = nxt
    return roots, kinds, values


@njit(cache=True)
def probe_from_start(c, skip):
    """Value of ``c`` just past ``t = 0``, before its next root.

    Roots below ``skip`` are taken to be the starting point itself.  The probe
    sits halfway to the first later root, or at 0.5 when there is none.
    """
    lo, hi, kind = isolate_kernel(c, 0.0, 1.0, 1e-12, 1e-10)
    h = 1.0
    for q in range(lo.shape[0]):
        mid = 0.5 * (lo[q] + hi[q])
        if mid > skip:
            h = mid
            break
    h *= 0.5
    return decasteljau1(c, h), h


@njit(cache=True)
def interval_values(c, roots):
    """Values of ``c`` at the midpoints of ``[0, roots..., 1]``."""
    n = roots.shape[0]
    values = np.empty(n + 1)
    prev = 0.0
    for q in range(n + 1):
        nxt = roots[q] if q < n else 1.0
        values[q] = decasteljau1(c, 0.5 * (prev + nxt))
        prev = nxt
    return values
