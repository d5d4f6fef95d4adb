"""Area quadrature over extrinsic balls on a chart grid.

``region_integral`` computes integrals of smooth densities over {r < t}:

* cells fully inside the ball use per-cell Gauss-Legendre 4x4 integrals,
  cached on the field the first time any ball is integrated, because the
  same cells are re-summed for every radius in a schedule;
* cut cells are sliced into Gauss-Legendre strips along the grid axis
  best aligned with the level curve's graph direction; each strip locates
  its crossing with a safeguarded Newton iteration on the exact ambient
  distance and then integrates the inside subinterval with a 1-D
  Gauss-Legendre rule, so the only error left is the smooth-quadrature
  remainder;
* cells where the strip picture fails (saddles of r, curve tangent to a
  strip) subdivide recursively, re-trying the slicer on each child, with
  a linear marching-squares polygon estimate at the maximum depth.

Features of the region smaller than one grid cell (for example an island
of the outside region just after a critical level) are resolved only once
they span a cell; the radius schedule's critical-value skipping keeps
such levels out of reported results.
"""

from __future__ import annotations

import numpy as np

from .. import backend
from ..errors import GeometryError
from ..immersion import FrameBatch, frames
from .field import DistanceField

_X4, _W4 = np.polynomial.legendre.leggauss(4)
_X4 = 0.5 * (_X4 + 1.0)
_W4 = 0.5 * _W4
_X2, _W2 = np.polynomial.legendre.leggauss(2)
_X2 = 0.5 * (_X2 + 1.0)
_W2 = 0.5 * _W2

_MAX_DEPTH = 6
_STRIP_TOL = 1e-9

CHANNELS = {
    "one": lambda fb: np.sqrt(fb.detg),
    "normBsq": lambda fb: fb.normBsq * np.sqrt(fb.detg),
    "K": lambda fb: fb.K * np.sqrt(fb.detg),
}


def _densities(fb: FrameBatch, names: tuple[str, ...]) -> dict[str, np.ndarray]:
    return {name: CHANNELS[name](fb) for name in names}


def _cell_corner_indices(field: DistanceField):
    """Corner node indices (i, j), (i+1, j), (i+1, j+1), (i, j+1) per cell."""
    n_u = field.spec.n_u
    i = np.arange(field.n_cells_u)
    j = np.arange(field.n_cells_v)
    ii, jj = np.meshgrid(i, j, indexing="ij")
    inext = (ii + 1) % n_u if field.periodic_u else ii + 1
    return ii, jj, inext


def ensure_cell_cache(field: DistanceField,
                      names: tuple[str, ...] = ("one", "normBsq", "K"),
                      chunk_cells: int = 16384) -> dict[str, np.ndarray]:
    """Precompute full-cell GL4x4 integrals for every cell a ball can cover.

    Only cells with at least one corner below t_max can ever be fully
    inside a requested ball; all other cells keep a zero entry that is
    never read.  The evaluation runs in chunks to bound peak memory.
    """
    missing = [n for n in names if f"cell::{n}" not in field.quad_cache]
    if not missing:
        return {n: field.quad_cache[f"cell::{n}"] for n in names}

    ii, jj, inext = _cell_corner_indices(field)
    corner_min = np.minimum(
        np.minimum(field.r[ii, jj], field.r[inext, jj]),
        np.minimum(field.r[inext, jj + 1], field.r[ii, jj + 1]),
    )
    mask = corner_min < field.t_max
    ci, cj = np.nonzero(mask)

    out = {n: np.zeros((field.n_cells_u, field.n_cells_v)) for n in missing}
    u0 = field.u_nodes[ci]
    v0 = field.v_nodes[cj]
    wgrid = (_W4[:, None] * _W4[None, :]).ravel() * field.h_u * field.h_v
    ugrid = (field.h_u * _X4)[:, None].repeat(4, axis=1).ravel()
    vgrid = (field.h_v * _X4)[None, :].repeat(4, axis=0).ravel()

    for start in range(0, len(ci), chunk_cells):
        sl = slice(start, start + chunk_cells)
        U = u0[sl, None] + ugrid[None, :]
        V = v0[sl, None] + vgrid[None, :]
        fb = frames(field.surface, U, V)
        dens = _densities(fb, tuple(missing))
        for n in missing:
            out[n][ci[sl], cj[sl]] = dens[n] @ wgrid
    for n in missing:
        field.quad_cache[f"cell::{n}"] = out[n]
    return {n: field.quad_cache[f"cell::{n}"] for n in names}


def _newton_strips(field: DistanceField, tt: float,
                   base_u, base_v, du, dv, lo, hi, flo, fhi, iters: int = 3):
    """Solve r(base + s * (du, dv)) = tt on bracketed strips, vectorized.

    (du, dv) spans the whole strip; lo/hi bracket the crossing in the
    strip parameter s with f(lo) and f(hi) of opposite signs.
    """
    surf = field.surface
    form = surf.form
    s = lo + (hi - lo) * flo / (flo - fhi)
    lo = lo.copy()
    hi = hi.copy()
    flo = flo.copy()
    for _ in range(iters):
        U = base_u + s * du
        V = base_v + s * dv
        F, Fu, Fv, _, _, _ = surf.jet(U, V)
        f = form.distance(field.pole, F, check=False) - tt
        rad = form.radial_unit(field.pole, F)
        fp = form.inner(rad, Fu * np.asarray(du)[..., None]
                        + Fv * np.asarray(dv)[..., None])
        on_lo = (f < 0.0) == (flo < 0.0)
        lo = np.where(on_lo, s, lo)
        flo = np.where(on_lo, f, flo)
        hi = np.where(on_lo, hi, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            s_new = s - f / fp
        bad = ~np.isfinite(s_new) | (s_new <= lo) | (s_new >= hi)
        s = np.where(np.abs(f) <= _STRIP_TOL, s,
                     np.where(bad, 0.5 * (lo + hi), s_new))
    U = base_u + s * du
    V = base_v + s * dv
    f = field.eval_r(U, V) - tt
    ok = np.abs(f) <= 1e-8
    return s, ok


def _cell_crossings(field: DistanceField, tt: float, u0, v0,
                    hu: float, hv: float, f00, f10, f11, f01, ok):
    """Locate the level curve's two boundary crossings per non-saddle cell.

    Marking saddle cells (four cut edges) not-ok, every remaining cut cell
    has exactly two cut edges; each gets a Newton-refined crossing.
    Returns (cross_u, cross_v) of shape (n, 2) plus the updated ok mask.
    """
    n = len(u0)
    in00, in10, in11, in01 = f00 < 0, f10 < 0, f11 < 0, f01 < 0
    cuts = (
        (in00 != in10, u0, v0, hu, 0.0, f00, f10),            # bottom
        (in10 != in11, u0 + hu, v0, 0.0, hv, f10, f11),       # right
        (in01 != in11, u0, v0 + hv, hu, 0.0, f01, f11),       # top
        (in00 != in01, u0, v0, 0.0, hv, f00, f01),            # left
    )
    n_cut = sum(c[0].astype(np.int8) for c in cuts)
    ok &= n_cut != 4

    cross_u = np.zeros((n, 2))
    cross_v = np.zeros((n, 2))
    slot = np.zeros(n, dtype=np.int64)
    for cut, bu, bv, du, dv, fa, fb_ in cuts:
        sel = np.nonzero(cut & ok)[0]
        if len(sel) == 0:
            continue
        zeros = np.zeros(len(sel))
        s, nok = _newton_strips(field, tt, bu[sel], bv[sel], du, dv,
                                zeros, zeros + 1.0, fa[sel], fb_[sel],
                                iters=4)
        ok[sel] &= nok
        cross_u[sel, slot[sel]] = bu[sel] + s * du
        cross_v[sel, slot[sel]] = bv[sel] + s * dv
        slot[sel] += 1
    return cross_u, cross_v, ok


def _slice_cells(field: DistanceField, tt: float, u0, v0, hu: float, hv: float,
                 f00, f10, f11, f01, names: tuple[str, ...]):
    """Integrate cut cells by Gauss-Legendre slices between the crossings.

    The curve enters and leaves a non-saddle cut cell at two refined
    boundary crossings.  Between their coordinates (along the axis the
    curve is a graph over) every transverse line meets the curve exactly
    once, so the one-crossing strip construction is smooth there; outside
    that span the cell is uniformly full or empty, handled by plain 2-D
    Gauss-Legendre on the end pieces.  Splitting at the crossings is what
    keeps the rule high-order: slicing the whole cell instead puts an
    integrable kink under the u-rule wherever the curve exits a side.

    Returns (contrib: dict name -> (n,) array, ok: (n,) bool); the cells
    flagged not-ok (saddles, failed Newtons, strips whose three-point sign
    pattern is inconsistent with one crossing) contribute zero and are the
    caller's to subdivide.
    """
    n = len(u0)
    contrib = {name: np.zeros(n) for name in names}
    if n == 0:
        return contrib, np.ones(0, dtype=bool)
    ok = np.ones(n, dtype=bool)

    cross_u, cross_v, ok = _cell_crossings(
        field, tt, u0, v0, hu, hv, f00, f10, f11, f01, ok)

    in00, in10, in11, in01 = f00 < 0, f10 < 0, f11 < 0, f01 < 0
    a_u = (f10 + f11 - f00 - f01) / (2.0 * hu)
    a_v = (f01 + f11 - f00 - f10) / (2.0 * hv)
    along_u = np.abs(a_v) >= np.abs(a_u)

    for axis_along_u in (True, False):
        sel = np.nonzero((along_u == axis_along_u) & ok)[0]
        if len(sel) == 0:
            continue
        if axis_along_u:
            AB = np.sort(cross_u[sel], axis=1)
            base0, span_t = u0[sel], hv
            lo_full = in00[sel] & in01[sel]
            hi_full = in10[sel] & in11[sel]
            axis_h = hu
        else:
            AB = np.sort(cross_v[sel], axis=1)
            base0, span_t = v0[sel], hu
            lo_full = in00[sel] & in10[sel]
            hi_full = in01[sel] & in11[sel]
            axis_h = hv
        A, B = AB[:, 0], AB[:, 1]
        totals_named = {name: np.zeros(len(sel)) for name in names}

        # Middle span: one crossing per transverse strip.
        mid_w = B - A
        q = A[:, None] + mid_w[:, None] * _X4[None, :]
        if axis_along_u:
            bu, bv = q, np.broadcast_to(v0[sel][:, None], q.shape)
            du, dv = 0.0, hv
        else:
            bu, bv = np.broadcast_to(u0[sel][:, None], q.shape), q
            du, dv = hu, 0.0
        f_a = field.eval_r(bu, bv) - tt
        f_b = field.eval_r(bu + du, bv + dv) - tt
        f_m = field.eval_r(bu + 0.5 * du, bv + 0.5 * dv) - tt
        in_a, in_b, in_m = f_a < 0, f_b < 0, f_m < 0
        bad_strip = in_a == in_b
        cell_bad = np.any(bad_strip, axis=1)

        lower = in_a != in_m
        lo = np.where(lower, 0.0, 0.5)
        hi = np.where(lower, 0.5, 1.0)
        flo = np.where(lower, f_a, f_m)
        fhi = np.where(lower, f_m, f_b)
        s, nok = _newton_strips(field, tt, bu, bv, du, dv, lo, hi, flo, fhi)
        cell_bad |= np.any(~nok, axis=1)
        s_lo = np.where(in_a, 0.0, s)
        s_hi = np.where(in_a, s, 1.0)

        span = s_hi - s_lo
        nodes_s = s_lo[..., None] + span[..., None] * _X4[None, None, :]
        w_mid = ((mid_w[:, None] * _W4[None, :])[..., None]
                 * span_t * span[..., None] * _W4[None, None, :])
        if axis_along_u:
            NU = bu[..., None] + 0.0 * nodes_s
            NV = v0[sel][:, None, None] + hv * nodes_s
        else:
            NU = u0[sel][:, None, None] + hu * nodes_s
            NV = bv[..., None] + 0.0 * nodes_s
        fb = frames(field.surface, NU, NV)
        dens = _densities(fb, names)
        for name in names:
            totals_named[name] += np.sum(dens[name] * w_mid, axis=(1, 2))

        # End pieces: uniformly full or empty slabs beside the crossings.
        for lo_edge, full_mask, width in (
                (base0, lo_full, A - base0),
                (B, hi_full, base0 + axis_h - B)):
            width = np.where(full_mask, np.maximum(width, 0.0), 0.0)
            if not np.any(width > 0.0):
                continue
            qa = lo_edge[:, None] + width[:, None] * _X4[None, :]
            if axis_along_u:
                EU = qa[:, :, None] + np.zeros((1, 1, 4))
                EV = (v0[sel][:, None, None]
                      + (hv * _X4)[None, None, :] + 0.0 * qa[:, :, None])
            else:
                EU = (u0[sel][:, None, None]
                      + (hu * _X4)[None, None, :] + 0.0 * qa[:, :, None])
                EV = qa[:, :, None] + np.zeros((1, 1, 4))
            w_end = ((width[:, None] * _W4[None, :])[..., None]
                     * span_t * _W4[None, None, :])
            fb = frames(field.surface, EU, EV)
            dens = _densities(fb, names)
            for name in names:
                totals_named[name] += np.sum(dens[name] * w_end, axis=(1, 2))

        ok[sel] &= ~cell_bad
        for name in names:
            contrib[name][sel] = totals_named[name]

    for name in names:
        contrib[name][~ok] = 0.0
    return contrib, ok


def _gl2_full_cells(field: DistanceField, u0, v0, hu: float, hv: float,
                    names: tuple[str, ...]) -> dict[str, np.ndarray]:
    """GL2x2 integrals of whole (sub)cells, vectorized over cells."""
    U = u0[:, None, None] + (hu * _X2)[None, :, None]
    V = v0[:, None, None] + (hv * _X2)[None, None, :]
    U, V = np.broadcast_arrays(U, V)
    fb = frames(field.surface, U, V)
    dens = _densities(fb, names)
    w = (hu * _W2)[:, None] * (hv * _W2)[None, :]
    return {name: np.sum(dens[name] * w[None], axis=(1, 2)) for name in names}


_POLY_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))
_POLY_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def _terminal_polygon(fc: np.ndarray) -> float:
    """Inside-area fraction of a terminal cell by linear marching clip.

    fc holds the four corner values of r - tt in the conventional corner
    order.  Saddle configurations get the half-cell estimate; terminal
    saddles only occur in the immediate neighborhood of a saddle point of
    r and contribute at most a few cells of size (h / 64)^2.
    """
    inside = fc < 0.0
    n_in = int(np.count_nonzero(inside))
    if n_in == 0:
        return 0.0
    if n_in == 4:
        return 1.0
    if n_in == 2 and inside[0] == inside[2]:
        return 0.5
    poly: list[np.ndarray] = []
    for a, b in _POLY_EDGES:
        if inside[a]:
            poly.append(_POLY_CORNERS[a])
        if inside[a] != inside[b]:
            s = fc[a] / (fc[a] - fc[b])
            poly.append(_POLY_CORNERS[a]
                        + s * (_POLY_CORNERS[b] - _POLY_CORNERS[a]))
    pts = np.asarray(poly)
    x, y = pts[:, 0], pts[:, 1]
    return float(0.5 * np.abs(np.dot(x, np.roll(y, -1))
                              - np.dot(y, np.roll(x, -1))))


def integrate_cut_cells(field: DistanceField, tt: float,
                        ci: np.ndarray, cj: np.ndarray,
                        names: tuple[str, ...]) -> dict[str, float]:
    """Integrate the inside part of all cut cells at level tt."""
    n_u = field.spec.n_u
    inext = (ci + 1) % n_u if field.periodic_u else ci + 1
    u0 = field.u_nodes[ci].astype(np.float64)
    v0 = field.v_nodes[cj].astype(np.float64)
    f00 = field.r[ci, cj] - tt
    f10 = field.r[inext, cj] - tt
    f11 = field.r[inext, cj + 1] - tt
    f01 = field.r[ci, cj + 1] - tt

    totals = {name: 0.0 for name in names}
    hu, hv = field.h_u, field.h_v

    for depth in range(_MAX_DEPTH + 1):
        if len(u0) == 0:
            return totals
        contrib, ok = _slice_cells(field, tt, u0, v0, hu, hv,
                                   f00, f10, f11, f01, names)
        for name in names:
            totals[name] += float(np.sum(contrib[name][ok]))
        if bool(np.all(ok)) or depth == _MAX_DEPTH:
            break
        # Subdivide the cells the slicer rejected: five fresh corner
        # evaluations per cell give the four children's corner values.
        w = np.nonzero(~ok)[0]
        pu, pv = u0[w], v0[w]
        p00, p10, p11, p01 = f00[w], f10[w], f11[w], f01[w]
        um, vm = pu + 0.5 * hu, pv + 0.5 * hv
        eb = field.eval_r(um, pv) - tt
        et = field.eval_r(um, pv + hv) - tt
        el = field.eval_r(pu, vm) - tt
        er = field.eval_r(pu + hu, vm) - tt
        ec = field.eval_r(um, vm) - tt

        hu, hv = 0.5 * hu, 0.5 * hv
        cu = np.concatenate([pu, um, um, pu])
        cv = np.concatenate([pv, pv, vm, vm])
        c00 = np.concatenate([p00, eb, ec, el])
        c10 = np.concatenate([eb, p10, er, ec])
        c11 = np.concatenate([ec, er, p11, et])
        c01 = np.concatenate([el, ec, et, p01])

        c_in = (c00 < 0) & (c10 < 0) & (c11 < 0) & (c01 < 0)
        c_out = (c00 >= 0) & (c10 >= 0) & (c11 >= 0) & (c01 >= 0)
        if np.any(c_in):
            full = _gl2_full_cells(field, cu[c_in], cv[c_in], hu, hv, names)
            for name in names:
                totals[name] += float(np.sum(full[name]))
        keep = ~c_in & ~c_out
        u0, v0 = cu[keep], cv[keep]
        f00, f10, f11, f01 = c00[keep], c10[keep], c11[keep], c01[keep]

    # Terminal estimate for whatever survived to the depth cap.
    left = np.nonzero(~ok)[0]
    if len(left):
        um = u0[left] + 0.5 * hu
        vm = v0[left] + 0.5 * hv
        fb = frames(field.surface, um, vm)
        dens = _densities(fb, names)
        for k, idx in enumerate(left):
            fc = np.array([f00[idx], f10[idx], f11[idx], f01[idx]])
            frac = _terminal_polygon(fc) * hu * hv
            for name in names:
                totals[name] += frac * float(dens[name][k])
    return totals


def region_integral(field: DistanceField, tt: float,
                    names: tuple[str, ...] = ("one",)) -> dict[str, float]:
    """Integrals of the named densities over the extrinsic ball {r < tt}."""
    for name in names:
        if name not in CHANNELS:
            raise GeometryError(f"unknown quadrature channel {name!r}")
    kern = backend.get_kernels()
    codes = kern.classify_cells(field.r, tt, field.periodic_u)
    cache = ensure_cell_cache(field)
    totals = {}
    inside = codes == 1
    for name in names:
        totals[name] = float(np.sum(cache[name][inside]))
    ci, cj = np.nonzero(codes == 2)
    cut = integrate_cut_cells(field, tt, ci, cj, names)
    for name in names:
        totals[name] += cut[name]
    return totals
