"""Immersion and normal fields from the frame via the lambda-derivative formula.

The moving frame lives in a loop of SU(2); differentiating in the loop
parameter at a fixed evaluation point lambda0 and conjugating produces the
surface immersion, while conjugating the diagonal Lie-algebra generator
produces its unit normal. Tangent vectors come from conjugating the connection
coefficients, which keeps the first fundamental form exact instead of
finite-difference accurate.

The su(2) to R^3 identification uses the orthonormal basis

    e1 = (1/2)[[0, i], [i, 0]]   e2 = (1/2)[[0, -1], [1, 0]]   e3 = (1/2)[[i, 0], [0, -i]]

under the inner product <A, B> = -2 tr(A B), so that [e1, e2] maps to the
cross product e1 x e2 = (0, 0, 1).
"""

import numpy as np

from .frames import truncation_tail
from .loops import eval_coeffs, mat_inv2, sup_abs

E1 = 0.5 * np.array([[0, 1j], [1j, 0]])
E2 = 0.5 * np.array([[0, -1], [1, 0]])
E3 = 0.5 * np.array([[1j, 0], [0, -1j]])


class StructureError(ValueError):
    """Matrix is not in su(2) to the requested tolerance."""


def su2_to_r3(X, tol=1e-8):
    """Coordinates of an su(2) matrix (batched) in the e1, e2, e3 basis."""
    X = np.asarray(X)
    defect = max(sup_abs(X + np.conj(np.swapaxes(X, -1, -2))),
                 sup_abs(X[..., 0, 0] + X[..., 1, 1]))
    if defect > tol:
        raise StructureError(f"not su(2): defect {defect:.3e} > {tol:g}")
    u1 = np.imag(X[..., 0, 1] + X[..., 1, 0])
    u2 = np.real(X[..., 1, 0] - X[..., 0, 1])
    u3 = np.imag(X[..., 0, 0] - X[..., 1, 1])
    return np.stack([u1, u2, u3], axis=-1)


def su2_inner(A, B):
    """Inner product <A, B> = -2 tr(A B) on su(2), batched."""
    return -2.0 * np.real(np.einsum("...ab,...ba->...", A, B))


class SurfaceGrid:
    """Immersion and unit normal sampled on the parameter grid.

    f and N have shape (nx, ny, 3). Analytic tangent and normal-derivative
    fields are attached when the connection is available; consumers fall back
    to finite differences when they are absent.
    """

    def __init__(self, x, y, lam0, f, N, fx=None, fy=None, Nx=None, Ny=None,
                 conn=None, normal_tol=1e-8):
        self.x = x
        self.y = y
        self.lam0 = float(lam0)
        self.f = f
        self.N = N
        self.fx = fx
        self.fy = fy
        self.Nx = Nx
        self.Ny = Ny
        self.conn = conn
        norm_defect = sup_abs(np.linalg.norm(N, axis=-1) - 1.0)
        if norm_defect > normal_tol:
            raise StructureError(
                f"normal field norm defect {norm_defect:.3e} > {normal_tol:g}")
        self.i0x = int(np.argmin(np.abs(x)))
        self.i0y = int(np.argmin(np.abs(y)))

    @property
    def shape(self):
        return self.f.shape[:2]

    def __repr__(self):
        return (f"SurfaceGrid({self.f.shape[0]}x{self.f.shape[1]}, "
                f"lam0={self.lam0:g})")


def _structure_tol(field, lam0):
    reach = max(np.abs(field.x).max(), np.abs(field.y).max())
    amp = max(lam0, 1.0 / lam0)
    return max(1e-8, 50.0 * truncation_tail(field.n_trunc, reach, amp))


def sym_immersion(field, lam0, conn=None, structure_tol=None):
    """Surface and unit normal at evaluation point lam0 > 0.

    The immersion is f = U_hat_t U_hat^{-1} with the t-derivative taken along
    lambda = e^t, i.e. degree k scaled by k lam0^k; the normal conjugates e3.
    With a connection given, exact tangent and normal-derivative fields are
    attached to the returned SurfaceGrid.
    """
    if not lam0 > 0:
        raise ValueError("evaluation point must be positive")
    if structure_tol is None:
        structure_tol = _structure_tol(field, lam0)
    N = field.n_trunc
    degs = np.arange(-N, N + 1)
    C = field.Uhat
    Ue = eval_coeffs(C, -N, lam0)
    Ut = np.einsum("xydab,d->xyab",
                   C, (degs * lam0 ** degs.astype(float)).astype(complex))
    Ui = mat_inv2(Ue)
    f = su2_to_r3(np.einsum("xyab,xybc->xyac", Ut, Ui), tol=structure_tol)
    Nrm = su2_to_r3(np.einsum("xyab,bc,xycd->xyad", Ue, E3, Ui),
                    tol=structure_tol)
    nrm = np.linalg.norm(Nrm, axis=-1, keepdims=True)
    if sup_abs(nrm - 1.0) > max(1e-8, structure_tol):
        raise StructureError(f"normal norm defect {sup_abs(nrm - 1.0):.3e}")
    S = SurfaceGrid(field.x, field.y, lam0, f, Nrm / nrm, conn=conn)
    if conn is not None:
        S.fx, S.fy = analytic_tangents(field, conn, lam0,
                                       structure_tol=structure_tol)
        S.Nx, S.Ny = analytic_normal_derivatives(field, conn, lam0,
                                                 structure_tol=structure_tol)
    return S


def _conjugate(field, lam0, W, structure_tol):
    N = field.n_trunc
    Ue = eval_coeffs(field.Uhat, -N, lam0)
    Ui = mat_inv2(Ue)
    return su2_to_r3(np.einsum("xyab,xybc,xycd->xyad", Ue, W, Ui),
                     tol=structure_tol)


def analytic_tangents(field, conn, lam0, structure_tol=None):
    """Exact tangent fields by conjugating the lambda-scaled connection.

    The t-derivative of the connection at lambda = e^t multiplies the degree
    +1 coefficient by lam0 and the degree -1 coefficient by -1/lam0; the x
    tangent keeps only the degree-1 part (the diagonal term has degree 0), the
    y tangent is the sign-flipped degree -1 part. Norms are exactly lam0 and
    1/lam0.
    """
    if structure_tol is None:
        structure_tol = _structure_tol(field, lam0)
    w1t = lam0 * conn.omega1_c1
    w2t = -conn.omega2_cm1 / lam0
    fx = _conjugate(field, lam0, w1t, structure_tol)
    fy = _conjugate(field, lam0, w2t, structure_tol)
    return fx, fy


def analytic_normal_derivatives(field, conn, lam0, structure_tol=None):
    """Exact normal derivatives by conjugating connection commutators with e3."""
    if structure_tol is None:
        structure_tol = _structure_tol(field, lam0)
    w1 = conn.omega1_c0 + lam0 * conn.omega1_c1
    w2 = conn.omega2_cm1 / lam0
    c1 = np.einsum("xyab,bc->xyac", w1, E3) - np.einsum("ab,xybc->xyac", E3, w1)
    c2 = np.einsum("xyab,bc->xyac", w2, E3) - np.einsum("ab,xybc->xyac", E3, w2)
    Nx = _conjugate(field, lam0, c1, structure_tol)
    Ny = _conjugate(field, lam0, c2, structure_tol)
    return Nx, Ny
