"""Geometric verification: fundamental forms, angle field, torsion, integrability.

Everything here consumes a SurfaceGrid and reports how well it satisfies the
identities a constant-curvature front must satisfy. The ops prefer the exact
tangent and normal-derivative fields attached by the builder when present and
fall back to order-2 finite differences, so the same checks run on surfaces
from any source.
"""

import warnings

import numpy as np

from .loops import sup_abs


def d_x(F, h):
    """Order-2 derivative along axis 0, one-sided at the edges."""
    out = np.empty_like(F)
    out[1:-1] = (F[2:] - F[:-2]) / (2 * h)
    out[0] = (-3 * F[0] + 4 * F[1] - F[2]) / (2 * h)
    out[-1] = (3 * F[-1] - 4 * F[-2] + F[-3]) / (2 * h)
    return out


def d_y(F, h):
    return np.swapaxes(d_x(np.swapaxes(F, 0, 1), h), 0, 1)


def _spacing(S):
    return float(S.x[1] - S.x[0]), float(S.y[1] - S.y[0])


def _tangents(S):
    if S.fx is not None and S.fy is not None:
        return S.fx, S.fy
    hx, hy = _spacing(S)
    return d_x(S.f, hx), d_y(S.f, hy)


def _dot(a, b):
    return np.einsum("...k,...k->...", a, b)


class GeometryReport:
    """First and second fundamental forms with the curvature field.

    K is NaN where the first form is degenerate (EG - F^2 at or below the
    regularity threshold); `regular` marks the nodes where it is defined.
    """

    def __init__(self, E, F, G, ell, m, n, K, regular, reg_threshold):
        self.E = E
        self.F = F
        self.G = G
        self.ell = ell
        self.m = m
        self.n = n
        self.K = K
        self.regular = regular
        self.reg_threshold = reg_threshold

    @property
    def regular_count(self):
        return int(self.regular.sum())

    def __repr__(self):
        return (f"GeometryReport(regular {self.regular_count}/{self.K.size}, "
                f"threshold {self.reg_threshold:g})")


def fundamental_forms(S, tangents=None, normal_derivs=None, reg_threshold=0.01):
    """Both fundamental forms and Gauss curvature of a surface grid.

    tangents and normal_derivs override the fields attached to S; with neither
    available the derivatives are taken by finite differences. For the
    surfaces built here EG - F^2 = sin^2 of the asymptotic angle, so the
    default threshold 0.01 excludes nodes within |sin| <= 0.1 of a cusp line.
    """
    fx, fy = tangents if tangents is not None else _tangents(S)
    if normal_derivs is not None:
        Nx, Ny = normal_derivs
    elif S.Nx is not None and S.Ny is not None:
        Nx, Ny = S.Nx, S.Ny
    else:
        hx, hy = _spacing(S)
        Nx, Ny = d_x(S.N, hx), d_y(S.N, hy)
    E = _dot(fx, fx)
    F = _dot(fx, fy)
    G = _dot(fy, fy)
    ell = -_dot(fx, Nx)
    m = -_dot(fx, Ny)
    n = -_dot(fy, Ny)
    denom = E * G - F * F
    regular = denom > reg_threshold
    K = np.full_like(E, np.nan)
    K[regular] = (ell * n - m * m)[regular] / denom[regular]
    return GeometryReport(E, F, G, ell, m, n, K, regular, reg_threshold)


# ---------------------------------------------------------------------------
# adapted frame and angle field

class FrameReport:
    """Orthonormal adapted frame along the surface.

    tx is the unit x tangent, fxp = N x tx completes the tangent plane; after
    the angle field is known, e1 and e2 are the frame turned by theta = omega/2
    so that the asymptotic directions sit symmetrically about e1.
    """

    def __init__(self, tx, fxp, N, theta=None, e1=None, e2=None):
        self.tx = tx
        self.fxp = fxp
        self.N = N
        self.theta = theta
        self.e1 = e1
        self.e2 = e2

    def det_defects(self):
        d1 = sup_abs(_dot(np.cross(self.tx, self.fxp), self.N) - 1.0)
        if self.e1 is None:
            return d1, None
        d2 = sup_abs(_dot(np.cross(self.e1, self.e2), self.N) - 1.0)
        return d1, d2


def tangent_frame(S, det_tol=1e-8):
    """Unit x tangent and its in-plane normal rotation, orthonormalized.

    The x tangent is projected off the normal before normalizing, so the
    triple (tx, fxp, N) has unit determinant to rounding regardless of whether
    the tangents are exact or finite differences.
    """
    fx, _ = _tangents(S)
    tx = fx - S.N * _dot(fx, S.N)[..., None]
    tx = tx / np.linalg.norm(tx, axis=-1, keepdims=True)
    fxp = np.cross(S.N, tx)
    frame = FrameReport(tx, fxp, S.N)
    d1, _ = frame.det_defects()
    if d1 > det_tol:
        raise ValueError(f"adapted frame determinant defect {d1:.3e}")
    return frame


def angle_field(S, frame):
    """Unwrapped angle from the x tangent to the y tangent.

    atan2 against the adapted frame, unwrapped column-wise along x and then
    along y, with the branch fixed so the origin value lands in [0, 2 pi).
    """
    _, fy = _tangents(S)
    omega = np.arctan2(_dot(fy, frame.fxp), _dot(fy, frame.tx))
    omega = np.unwrap(np.unwrap(omega, axis=0), axis=1)
    omega -= 2.0 * np.pi * np.floor(omega[S.i0x, S.i0y] / (2.0 * np.pi))
    return omega


def complete_frame(frame, omega, det_tol=1e-8):
    """Turn the adapted frame by half the angle field; validates determinants."""
    theta = 0.5 * omega
    c, s = np.cos(theta)[..., None], np.sin(theta)[..., None]
    e1 = c * frame.tx + s * frame.fxp
    e2 = -s * frame.tx + c * frame.fxp
    out = FrameReport(frame.tx, frame.fxp, frame.N, theta, e1, e2)
    d1, d2 = out.det_defects()
    if max(d1, d2) > det_tol:
        raise ValueError(f"frame determinant defects {d1:.3e}, {d2:.3e}")
    return out


# ---------------------------------------------------------------------------
# residual fields

def sine_gordon_residual(omega, hx, hy):
    """Mixed-derivative residual omega_xy - sin(omega); NaN on the boundary."""
    res = np.full_like(omega, np.nan)
    res[1:-1, 1:-1] = (omega[2:, 2:] - omega[2:, :-2] - omega[:-2, 2:]
                       + omega[:-2, :-2]) / (4.0 * hx * hy) \
        - np.sin(omega[1:-1, 1:-1])
    return res


def harmonicity_residual(S, omega):
    """Defect of the normal field against its mixed-derivative law.

    Returns (residual, h_harm): residual is the vector norm of
    N_xy - cos(omega) N per node, h_harm the scalar <N_xy, N> that should
    equal cos(omega). Both are NaN on the boundary ring.
    """
    hx, hy = _spacing(S)
    N = S.N
    Nxy = np.full_like(N, np.nan)
    Nxy[1:-1, 1:-1] = (N[2:, 2:] - N[2:, :-2] - N[:-2, 2:] + N[:-2, :-2]) \
        / (4.0 * hx * hy)
    residual = np.linalg.norm(Nxy - np.cos(omega)[..., None] * N, axis=-1)
    h_harm = _dot(Nxy, N)
    return residual, h_harm


def asymptotic_torsion(S, direction="x", skip_threshold=1e-3):
    """Torsion of the parameter curves, order-4 stencils, margin of 3 nodes.

    Nodes whose curvature vector norm ||c' x c''|| falls at or below
    skip_threshold are NaN (torsion is undefined on straight segments).
    Returns the torsion field, NaN at margins and skipped nodes.
    """
    f = S.f if direction == "x" else np.swapaxes(S.f, 0, 1)
    h = _spacing(S)[0 if direction == "x" else 1]
    c = 3

    def sh(F, k):
        end = F.shape[0] - c + k
        return F[c + k: end if end != 0 else None]

    d1 = (-sh(f, 2) + 8 * sh(f, 1) - 8 * sh(f, -1) + sh(f, -2)) / (12 * h)
    d2 = (-sh(f, 2) + 16 * sh(f, 1) - 30 * sh(f, 0) + 16 * sh(f, -1)
          - sh(f, -2)) / (12 * h * h)
    d3 = (sh(f, -3) - 8 * sh(f, -2) + 13 * sh(f, -1) - 13 * sh(f, 1)
          + 8 * sh(f, 2) - sh(f, 3)) / (8 * h ** 3)
    cr = np.cross(d1, d2)
    cr2 = _dot(cr, cr)
    tau_core = np.full(cr2.shape, np.nan)
    ok = np.sqrt(cr2) > skip_threshold
    tau_core[ok] = _dot(cr, d3)[ok] / cr2[ok]
    tau = np.full(f.shape[:2], np.nan)
    tau[c:-c] = tau_core
    if direction != "x":
        tau = np.swapaxes(tau, 0, 1)
    return tau


def front_from_normal(N, hx, hy, Nx=None, Ny=None, origin=None, warn_tol=1e-4):
    """Reconstruct the front from its normal field by path integration.

    Tangents are N x N_x and -N x N_y (finite differences of N when the exact
    derivatives are not supplied). Integration runs along the x axis first and
    then up each column; the per-cell circulation of the tangent one-form is
    returned alongside, and a warning is issued when it exceeds warn_tol
    (a non-integrable normal field).

    origin is the (i, j) index pair the reconstruction is anchored at;
    defaults to the grid center.
    """
    if Nx is None:
        Nx = d_x(N, hx)
    if Ny is None:
        Ny = d_y(N, hy)
    fx = np.cross(N, Nx)
    fy = -np.cross(N, Ny)
    if origin is None:
        origin = (N.shape[0] // 2, N.shape[1] // 2)
    i0, j0 = origin
    Fx = np.zeros_like(fx)
    np.cumsum(0.5 * (fx[1:] + fx[:-1]) * hx, axis=0, out=Fx[1:])
    rowx = Fx[:, j0] - Fx[i0, j0]
    Fy = np.zeros_like(fy)
    np.cumsum(0.5 * (fy[:, 1:] + fy[:, :-1]) * hy, axis=1, out=Fy[:, 1:])
    f = rowx[:, None, :] + (Fy - Fy[:, j0:j0 + 1])
    ex = 0.5 * (fx[1:, :] + fx[:-1, :]) * hx
    ey = 0.5 * (fy[:, 1:] + fy[:, :-1]) * hy
    closure = np.linalg.norm(ex[:, :-1] + ey[1:, :] - ex[:, 1:] - ey[:-1, :],
                             axis=-1)
    if closure.max() > warn_tol:
        warnings.warn(f"normal field is not integrable: cell circulation "
                      f"{closure.max():.3e}", stacklevel=2)
    return f, closure


def normal_sign_comparison(S, omega, threshold=0.1):
    """Compare the cross-product normal against the stored one.

    Away from the cusp lines (|sin omega| > threshold) the normalized
    f_x x f_y must equal sign(sin omega) times the stored normal. Returns the
    per-node sign of their inner product, the comparison mask and the largest
    deviation on it.
    """
    fx, fy = _tangents(S)
    cr = np.cross(fx, fy)
    nrm = np.linalg.norm(cr, axis=-1, keepdims=True)
    mask = np.abs(np.sin(omega)) > threshold
    N_std = cr / np.maximum(nrm, 1e-30)
    sgn = np.sign(np.sin(omega))
    dev = np.linalg.norm(N_std - sgn[..., None] * S.N, axis=-1)
    max_dev = float(dev[mask].max()) if mask.any() else 0.0
    sign_field = np.sign(_dot(N_std, S.N))
    return {"max_deviation": max_dev, "sign": sign_field, "mask": mask,
            "agree": bool(max_dev < 1e-3)}


def recover_boundary_angles(omega, x, y):
    """Boundary data read back off the angle field.

    alpha_hat(x) = omega(x, 0) - omega(0, 0) and beta_hat(y) = omega(0, y);
    for a field built from potentials these reproduce the inputs.
    """
    i0x = int(np.argmin(np.abs(x)))
    i0y = int(np.argmin(np.abs(y)))
    alpha_hat = omega[:, i0y] - omega[i0x, i0y]
    beta_hat = omega[i0x, :]
    return alpha_hat, beta_hat


def procrustes_align(A, B):
    """Best proper rotation R and shift t with R A + t matching B.

    Reflections are excluded: the smallest singular direction is sign-flipped
    when the raw orthogonal factor has negative determinant. Returns
    (R, t, residual vectors).
    """
    A2 = np.asarray(A, float).reshape(-1, 3)
    B2 = np.asarray(B, float).reshape(-1, 3)
    ca, cb = A2.mean(axis=0), B2.mean(axis=0)
    H = (B2 - cb).T @ (A2 - ca)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(U @ Vt))
    R = U @ np.diag([1.0, 1.0, d]) @ Vt
    t = cb - R @ ca
    return R, t, A2 @ R.T + t - B2
