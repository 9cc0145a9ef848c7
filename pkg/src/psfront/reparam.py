"""Reparametrization tools: arc-length normalization and local graph patches.

chebyshev_normalize rescales the two parameter axes by their arc lengths so
both families of parameter curves become unit speed; it refuses surfaces whose
metric coefficients are not functions of one variable each, since that is the
structural signature of the fronts built here. graph_patch writes a piece of
the surface as a height field over its tangent plane, which is the form in
which curvature can be checked without any reference to the construction that
produced the surface.
"""

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .analysis import d_x, d_y
from .loops import sup_abs
from .sym import SurfaceGrid


class ChebyshevError(ValueError):
    """Metric is not split (E a function of x, G of y): not a front of this kind."""


class PatchError(RuntimeError):
    """Graph patch failed: near a cusp, across a fold, or Newton stalled."""


class ReparamMap1D:
    """Monotone coordinate map t -> s(t) sampled on grid nodes, s(0) = 0."""

    def __init__(self, nodes, s):
        self.nodes = np.asarray(nodes, float)
        self.s = np.asarray(s, float)
        if np.any(np.diff(self.s) <= 0):
            raise ChebyshevError("reparametrization is not strictly monotone")
        i0 = int(np.argmin(np.abs(self.nodes)))
        if abs(self.s[i0]) > 1e-10:
            raise ChebyshevError("reparametrization does not fix the origin")

    def forward(self, t):
        return np.interp(t, self.nodes, self.s)

    def inverse(self, sv):
        return np.interp(sv, self.s, self.nodes)

    def __repr__(self):
        return f"ReparamMap1D([{self.nodes[0]:g}, {self.nodes[-1]:g}])"


class ChebyshevResult:
    """Normalized surface with the two axis maps and the split-metric defects."""

    def __init__(self, surface, map_x, map_y, variation_E, variation_G):
        self.surface = surface
        self.map_x = map_x
        self.map_y = map_y
        self.variation_E = variation_E
        self.variation_G = variation_G


def _metric_rows(S):
    if S.fx is not None and S.fy is not None:
        fx, fy = S.fx, S.fy
        analytic = True
    else:
        hx = float(S.x[1] - S.x[0])
        hy = float(S.y[1] - S.y[0])
        fx, fy = d_x(S.f, hx), d_y(S.f, hy)
        analytic = False
    E = np.einsum("...k,...k->...", fx, fx)
    G = np.einsum("...k,...k->...", fy, fy)
    return E, G, analytic


def _resample(x, y, field, xs, ys):
    comps = [RectBivariateSpline(x, y, field[..., k])(xs, ys) for k in
             range(field.shape[-1])]
    return np.stack(comps, axis=-1)


def chebyshev_normalize(S, var_tol=None):
    """Reparametrize both axes by arc length; returns a ChebyshevResult.

    E must depend only on x and G only on y (up to var_tol; the default is
    tight for exact tangent fields and O(h^2) for finite-difference ones).
    The new parameters are s = int sqrt(E) dx and t = int sqrt(G) dy on
    uniform grids of the original size, with fields resampled by cubic
    splines and tangents rescaled by the chain rule. Running it twice gives
    identity maps: the result already has unit-speed axes.
    """
    E, G, analytic = _metric_rows(S)
    if var_tol is None:
        h = max(float(S.x[1] - S.x[0]), float(S.y[1] - S.y[0]))
        var_tol = 1e-6 if analytic else max(1e-6, 25.0 * h * h)
    E_row = E.mean(axis=1)
    G_col = G.mean(axis=0)
    var_E = sup_abs(E - E_row[:, None]) / max(1.0, sup_abs(E))
    var_G = sup_abs(G - G_col[None, :]) / max(1.0, sup_abs(G))
    if max(var_E, var_G) > var_tol:
        raise ChebyshevError(
            f"metric is not split: E varies {var_E:.3e} across rows, "
            f"G varies {var_G:.3e} across columns (tol {var_tol:.1e})")
    hx = float(S.x[1] - S.x[0])
    hy = float(S.y[1] - S.y[0])
    rootE, rootG = np.sqrt(E_row), np.sqrt(G_col)

    def arc(nodes, speed, h):
        s = np.zeros_like(speed)
        np.cumsum(0.5 * (speed[1:] + speed[:-1]) * h, out=s[1:])
        i0 = int(np.argmin(np.abs(nodes)))
        return s - s[i0]

    s_of_x = arc(S.x, rootE, hx)
    t_of_y = arc(S.y, rootG, hy)
    map_x = ReparamMap1D(S.x, s_of_x)
    map_y = ReparamMap1D(S.y, t_of_y)
    s_new = np.linspace(s_of_x[0], s_of_x[-1], len(S.x))
    t_new = np.linspace(t_of_y[0], t_of_y[-1], len(S.y))
    xs = map_x.inverse(s_new)
    ys = map_y.inverse(t_new)
    f_new = _resample(S.x, S.y, S.f, xs, ys)
    N_new = _resample(S.x, S.y, S.N, xs, ys)
    N_new /= np.linalg.norm(N_new, axis=-1, keepdims=True)
    kwargs = {}
    if S.fx is not None:
        dx_ds = 1.0 / np.interp(xs, S.x, rootE)
        dy_dt = 1.0 / np.interp(ys, S.y, rootG)
        kwargs["fx"] = _resample(S.x, S.y, S.fx, xs, ys) * dx_ds[:, None, None]
        kwargs["fy"] = _resample(S.x, S.y, S.fy, xs, ys) * dy_dt[None, :, None]
        if S.Nx is not None:
            kwargs["Nx"] = _resample(S.x, S.y, S.Nx, xs, ys) * dx_ds[:, None, None]
            kwargs["Ny"] = _resample(S.x, S.y, S.Ny, xs, ys) * dy_dt[None, :, None]
    out = SurfaceGrid(s_new, t_new, 1.0, f_new, N_new, **kwargs)
    return ChebyshevResult(out, map_x, map_y, var_E, var_G)


# ---------------------------------------------------------------------------
# graph patch

def _rotation_to_vertical(n0):
    """Proper rotation taking the unit vector n0 to (0, 0, 1)."""
    e3 = np.array([0.0, 0.0, 1.0])
    v = np.cross(n0, e3)
    c = float(n0 @ e3)
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


class GraphPatch:
    """Height-field chart of a surface piece over its tangent plane.

    R maps world coordinates into the chart frame (normal at the center goes
    to +z); f0 is the world position of the center. h is the height over the
    (u, v) square spanned by uu, sampled ngrid x ngrid. K is the Gauss
    curvature of the height field by finite differences; its edge rows use
    one-sided stencils and are first-order only.
    """

    def __init__(self, center, radius, R, f0, uu, h, K, normal_angle, sign,
                 preimage_x, preimage_y, s_half, iters, residual):
        self.center = center
        self.radius = radius
        self.R = R
        self.f0 = f0
        self.uu = uu
        self.h = h
        self.K = K
        self.normal_angle = normal_angle
        self.sign = sign
        self.preimage_x = preimage_x
        self.preimage_y = preimage_y
        self.s_half = s_half
        self.iters = iters
        self.residual = residual

    def world_points(self):
        """World coordinates of the chart grid."""
        UU, VV = np.meshgrid(self.uu, self.uu, indexing="ij")
        return np.stack([UU, VV, self.h], axis=-1) @ self.R + self.f0

    def to_chart(self, points):
        """World points expressed in the chart frame (u, v, z)."""
        return (np.asarray(points, float) - self.f0) @ self.R.T

    def __repr__(self):
        return (f"GraphPatch(center={self.center}, s_half={self.s_half:.4f}, "
                f"iters={self.iters})")


class _SplineVec:
    """Componentwise bivariate spline evaluation of a vector field."""

    def __init__(self, x, y, field):
        self.splines = [RectBivariateSpline(x, y, field[..., k])
                        for k in range(field.shape[-1])]

    def __call__(self, xs, ys, dx=0, dy=0):
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        return np.stack([s(xs, ys, dx=dx, dy=dy, grid=False)
                         for s in self.splines], axis=-1)


def graph_patch(S, center, radius, ngrid=33, newton_tol=1e-12, max_iter=25):
    """Graph chart of S over the tangent plane at a parameter-space center.

    The parameter disc of the given radius must lie inside the grid, stay on
    one sheet of the front and keep clear of the cusp lines; violations raise
    PatchError (reduce the radius or move the center). See
    graph_patch_evaluated for the chart construction itself.
    """
    f_ev = _SplineVec(S.x, S.y, S.f)
    N_ev = _SplineVec(S.x, S.y, S.N)
    if S.fx is not None and S.fy is not None:
        fx_s = _SplineVec(S.x, S.y, S.fx)
        fy_s = _SplineVec(S.x, S.y, S.fy)
        fx_ev = lambda xs, ys: fx_s(xs, ys)
        fy_ev = lambda xs, ys: fy_s(xs, ys)
    else:
        fx_ev = lambda xs, ys: f_ev(xs, ys, dx=1)
        fy_ev = lambda xs, ys: f_ev(xs, ys, dy=1)
    return graph_patch_evaluated(f_ev, fx_ev, fy_ev, N_ev, S.x, S.y,
                                 center, radius, ngrid=ngrid,
                                 newton_tol=newton_tol, max_iter=max_iter)


def graph_patch_evaluated(f_ev, fx_ev, fy_ev, N_ev, x_grid, y_grid, center,
                          radius, ngrid=33, newton_tol=1e-12, max_iter=25):
    """Graph chart from direct surface evaluators (see graph_patch).

    The chart square is sized to the projected footprint of the parameter
    disc: its half side is 0.95 / sqrt(2) of the smallest tangent-plane radius
    reached by the disc boundary, so every chart target has a preimage on the
    center's sheet. Preimages come from vectorized Newton iteration seeded at
    the nearest disc sample.
    """
    cx, cy = float(center[0]), float(center[1])
    if not (x_grid[0] <= cx - radius and cx + radius <= x_grid[-1]
            and y_grid[0] <= cy - radius and cy + radius <= y_grid[-1]):
        raise PatchError(f"parameter disc of radius {radius:g} at "
                         f"({cx:g}, {cy:g}) leaves the grid")
    f0 = f_ev(np.array(cx), np.array(cy))
    n0 = N_ev(np.array(cx), np.array(cy))
    n0 = n0 / np.linalg.norm(n0)
    sin_center = float(np.cross(fx_ev(np.array(cx), np.array(cy)),
                                fy_ev(np.array(cx), np.array(cy))) @ n0)
    if abs(sin_center) <= 0.3:
        raise PatchError(f"center sits near a cusp line: "
                         f"|sin omega| = {abs(sin_center):.3f} <= 0.3")
    XS, YS = np.meshgrid(x_grid, y_grid, indexing="ij")
    rr = np.hypot(XS - cx, YS - cy)
    keep = rr <= radius
    xs_s, ys_s = XS[keep], YS[keep]
    # single-sheet precheck: the disc must not reach or cross a fold, where
    # the area element changes sign and a converged chart would be a lie
    sheet = np.einsum("pk,pk->p",
                      np.cross(fx_ev(xs_s, ys_s), fy_ev(xs_s, ys_s)),
                      N_ev(xs_s, ys_s))
    if (np.sign(sin_center) * sheet).min() <= 0.05:
        raise PatchError("parameter disc touches a cusp line or a second "
                         "sheet; reduce the radius")
    Rm = _rotation_to_vertical(n0)
    ps = (f_ev(xs_s, ys_s) - f0) @ Rm.T
    hgrid = float(x_grid[1] - x_grid[0])
    ring = keep & (rr > radius - 2 * hgrid)
    pr = (f_ev(XS[ring], YS[ring]) - f0) @ Rm.T
    rho = float(np.hypot(pr[:, 0], pr[:, 1]).min())
    s_half = 0.95 * rho / np.sqrt(2.0)
    uu = np.linspace(-s_half, s_half, ngrid)
    UU, VV = np.meshgrid(uu, uu, indexing="ij")
    d = uu[1] - uu[0]
    ut, vt = UU.ravel(), VV.ravel()
    d2 = (ps[None, :, 0] - ut[:, None]) ** 2 + (ps[None, :, 1] - vt[:, None]) ** 2
    idx = np.argmin(d2, axis=-1)
    xt = xs_s[idx].astype(float)
    yt = ys_s[idx].astype(float)
    res = None
    iters = 0
    for iters in range(max_iter):
        pw = (f_ev(xt, yt) - f0) @ Rm.T
        res = np.stack([pw[..., 0] - ut, pw[..., 1] - vt], axis=-1)
        if np.abs(res).max() < newton_tol:
            break
        Jx = (fx_ev(xt, yt) @ Rm.T)[..., :2]
        Jy = (fy_ev(xt, yt) @ Rm.T)[..., :2]
        J = np.stack([Jx, Jy], axis=-1)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.abs(det).min() < 1e-12:
            raise PatchError("projection Jacobian is singular inside the "
                             "patch (fold reached); reduce the radius")
        step = np.linalg.solve(J, res[..., None])[..., 0]
        xt -= step[..., 0]
        yt -= step[..., 1]
    if np.abs(res).max() >= newton_tol:
        raise PatchError(f"preimage iteration stalled at residual "
                         f"{np.abs(res).max():.2e}; reduce the radius")
    hgt = (((f_ev(xt, yt) - f0) @ Rm.T)[..., 2]).reshape(ngrid, ngrid)
    hu = d_x(hgt, d)
    hv = d_y(hgt, d)
    huu = np.empty_like(hgt)
    huu[1:-1] = (hgt[2:] - 2 * hgt[1:-1] + hgt[:-2]) / d ** 2
    huu[0], huu[-1] = huu[1], huu[-2]
    hvv = np.empty_like(hgt)
    hvv[:, 1:-1] = (hgt[:, 2:] - 2 * hgt[:, 1:-1] + hgt[:, :-2]) / d ** 2
    hvv[:, 0], hvv[:, -1] = hvv[:, 1], hvv[:, -2]
    huv = d_y(hu, d)
    W = 1.0 + hu ** 2 + hv ** 2
    K = (huu * hvv - huv ** 2) / W ** 2
    Nh = np.stack([-hu, -hv, np.ones_like(hu)], axis=-1) / np.sqrt(W)[..., None]
    Ntr = N_ev(xt, yt)
    Ntr = (Ntr / np.linalg.norm(Ntr, axis=-1, keepdims=True)) @ Rm.T
    dot = np.einsum("pk,pk->p", Nh.reshape(-1, 3), Ntr).reshape(ngrid, ngrid)
    angle = np.arccos(np.clip(np.abs(dot), -1.0, 1.0))
    return GraphPatch((cx, cy), radius, Rm, f0, uu, hgt, K, angle,
                      np.sign(dot), xt.reshape(ngrid, ngrid),
                      yt.reshape(ngrid, ngrid), s_half, iters,
                      float(np.abs(res).max()))
