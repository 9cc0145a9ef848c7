"""Frame construction: characteristic integration, per-node splitting, connection.

The build runs in three stages. integrate_half_frame solves the loop ODE along
one axis by an iterated-integral ladder, giving a one-parameter family of
nonnegative (x axis) or nonpositive (y axis) loops normalized to the identity
at the origin. build_frame_field glues the two families: at every grid node it
factors G = U_minus^{-1} U_plus into a nonnegative times a normalized
nonpositive loop through a block-Toeplitz solve, and assembles the extended
frame U_hat = U_plus L_minus. extract_connection then reads the two angle
fields off the factors and cross-checks the result against finite differences
of U_hat itself.

The ladder truncated at degree k is the generating function of the implicit
trapezoid one-step scheme, which is exactly unitary for real lambda; unitarity
defects of the assembled frame are therefore pure truncation tails.
"""

import math

import numpy as np

from . import loops
from .loops import (DEFAULT_TRUNC, I2, TwistedLoop, eval_coeffs, inverse_coeffs,
                    mul_coeffs, parity_project, parity_violation, sup_abs)
from .potentials import eta_minus, eta_plus


class GridError(ValueError):
    """Display grid incompatible with the potential's sample lattice."""


class SplitError(RuntimeError):
    """Loop factorization failed or left a residual above tolerance."""


class ConnectionShapeError(RuntimeError):
    """Finite-difference frame derivatives do not match the expected pattern."""


# ---------------------------------------------------------------------------
# ladder integration

def cumtrapz_origin(F, h, i0):
    """Cumulative trapezoid along axis 0, zeroed at node i0."""
    out = np.zeros_like(F)
    np.cumsum(0.5 * (F[1:] + F[:-1]) * h, axis=0, out=out[1:])
    out -= out[i0:i0 + 1]
    return out


def ladder(A, h, i0, n_deg):
    """Iterated integrals U_0 = I, U_k = int_0 U_{k-1} A; shape (n, n_deg+1, 2, 2)."""
    n = A.shape[0]
    U = np.zeros((n, n_deg + 1, 2, 2), complex)
    U[:, 0] = I2
    for k in range(1, n_deg + 1):
        U[:, k] = cumtrapz_origin(np.einsum("nab,nbc->nac", U[:, k - 1], A), h, i0)
    return U


class HalfFrameFamily:
    """One-parameter family of half frames along a single axis.

    coeffs has shape (n_nodes, n_trunc+1, 2, 2) with ascending degrees:
    0..n_trunc for the x axis, -n_trunc..0 for the y axis. The loop at the
    origin is the identity.
    """

    def __init__(self, axis, nodes, coeffs, k_min, n_trunc, spec,
                 per_degree_sup=None):
        self.axis = axis
        self.nodes = nodes
        self.coeffs = coeffs
        self.k_min = k_min
        self.n_trunc = n_trunc
        self.spec = spec
        self.per_degree_sup = per_degree_sup

    def loop_at(self, i):
        return TwistedLoop(self.k_min, self.coeffs[i])

    def __repr__(self):
        return (f"HalfFrameFamily(axis={self.axis!r}, n={len(self.nodes)}, "
                f"trunc={self.n_trunc})")


def _lattice_for(spec, grid):
    """Sample-lattice section covering the display grid; grid nodes must sit on it."""
    grid = np.asarray(grid, float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise GridError("grid must be a strictly increasing 1-D array")
    step = spec.step
    xs = spec.xs
    if grid[0] < xs[0] - 1e-9 or grid[-1] > xs[-1] + 1e-9:
        raise GridError(f"grid range [{grid[0]}, {grid[-1]}] outside potential "
                        f"interval {spec.interval}")
    i_lo = int(round((grid[0] - xs[0]) / step))
    i_hi = int(round((grid[-1] - xs[0]) / step))
    if abs(xs[i_lo] - grid[0]) > 1e-9 or abs(xs[i_hi] - grid[-1]) > 1e-9:
        raise GridError("grid endpoints must lie on the sample lattice")
    lattice = xs[i_lo:i_hi + 1]
    sel = np.round((grid - lattice[0]) / step).astype(int)
    if sup_abs(lattice[sel] - grid) > 1e-9:
        raise GridError(f"grid nodes must be commensurate with the sample "
                        f"step {step:g}")
    i0 = int(np.argmin(np.abs(lattice)))
    if abs(lattice[i0]) > 1e-12 or np.abs(grid).min() > 1e-12:
        raise GridError("grid must contain the origin as a node")
    return lattice, sel, i0


def integrate_half_frame(spec, axis, grid, n_trunc=DEFAULT_TRUNC):
    """Integrate the loop ODE along one axis on the potential's sample lattice.

    The quadrature runs on the fine sample lattice; `grid` selects the display
    nodes, which must be lattice nodes (coarser display grids are a stride of
    the lattice). Returns a HalfFrameFamily.
    """
    if axis not in ("x", "y"):
        raise GridError(f"axis must be 'x' or 'y', got {axis!r}")
    lattice, sel, i0 = _lattice_for(spec, grid)
    h = spec.step
    if axis == "x":
        A = eta_plus(spec, lattice)
    else:
        A = eta_minus(spec, lattice)
    U = ladder(A, h, i0, n_trunc)
    per_degree = np.abs(U).reshape(U.shape[0], n_trunc + 1, 4).max(axis=(0, 2))
    Usel = U[sel]
    if axis == "x":
        coeffs, k_min = Usel, 0                   # U_k multiplies lambda^k
    else:
        coeffs, k_min = Usel[:, ::-1], -n_trunc   # U_k multiplies lambda^-k
    return HalfFrameFamily(axis, np.asarray(grid, float), np.ascontiguousarray(coeffs),
                           k_min, n_trunc, spec, per_degree)


# ---------------------------------------------------------------------------
# Birkhoff splitting

def _split_negative(G, N):
    """Normalized nonpositive factors for a batch of loops.

    G: (nodes, 2N+1, 2, 2) with degrees -N..N. Solves the block-Toeplitz system
    that kills the negative degrees of G L_minus; returns L_minus with degrees
    -N..0 (ascending) and unit degree-0 coefficient.
    """
    nodes = G.shape[0]
    X = np.empty((nodes, 2 * N, 2), complex)
    chunk = 8192                       # bounds the dense Toeplitz workspace
    for s in range(0, nodes, chunk):
        Gc = G[s:s + chunk]
        nc = Gc.shape[0]
        M = np.zeros((nc, 2 * N, 2 * N), complex)
        rhs = np.zeros((nc, 2 * N, 2), complex)
        for di in range(N):
            for ki in range(N):
                M[:, 2 * di:2 * di + 2, 2 * ki:2 * ki + 2] = Gc[:, N + ki - di]
            rhs[:, 2 * di:2 * di + 2] = -Gc[:, N - 1 - di]
        try:
            X[s:s + chunk] = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError as exc:
            raise SplitError(f"singular Toeplitz system in nodes "
                             f"[{s}, {s + nc}): {exc}") from None
    Lm = np.zeros((nodes, N + 1, 2, 2), complex)
    Lm[:, N] = I2
    for ki in range(N):
        Lm[:, N - 1 - ki] = X[:, 2 * ki:2 * ki + 2]
    return Lm


def birkhoff_split(G, n_trunc=None, residual_tol=1e-8):
    """Factor a twisted loop into (nonnegative) times (normalized nonpositive).

    A loop with no negative degrees splits trivially as (G, identity). The
    residual is the largest negative-degree coefficient left in G L_minus;
    above residual_tol the factorization is rejected.
    """
    if G.k_min >= 0:
        return G, loops.identity_loop()
    N = n_trunc if n_trunc is not None else max(-G.k_min, G.k_max, 1)
    if N < -G.k_min or N < G.k_max:
        raise ValueError(f"n_trunc {N} too small for window {G.window}")
    Gc = np.zeros((1, 2 * N + 1, 2, 2), complex)
    Gc[0, G.k_min + N:G.k_max + N + 1] = G.coeffs
    Lm = _split_negative(Gc, N)
    parity_project(Lm, -N)
    GL = mul_coeffs(Gc, Lm, -N, -N, -2 * N, 3 * N + 1)
    residual = sup_abs(GL[:, :2 * N])
    if residual > residual_tol:
        raise SplitError(f"split residual {residual:.3e} exceeds "
                         f"{residual_tol:g}")
    Lp = TwistedLoop(0, GL[0, 2 * N:])
    return Lp, TwistedLoop(-N, Lm[0])


# ---------------------------------------------------------------------------
# frame field

class FrameField:
    """Extended frames and their factors on the full grid.

    Arrays are indexed (ix, iy, degree, 2, 2) with ascending degrees;
    U_hat spans -n_trunc..n_trunc, L_plus 0..n_trunc, L_minus -n_trunc..0.
    split_residual and consistency are per-node sup norms.
    """

    def __init__(self, x, y, n_trunc, spec, Uhat, Lp, Lm, split_residual,
                 consistency, parity_defect, unitarity):
        self.x = x
        self.y = y
        self.n_trunc = n_trunc
        self.spec = spec
        self.Uhat = Uhat
        self.Lp = Lp
        self.Lm = Lm
        self.split_residual = split_residual
        self.consistency = consistency
        self.parity_defect = parity_defect
        self.unitarity = unitarity
        self.i0x = int(np.argmin(np.abs(x)))
        self.i0y = int(np.argmin(np.abs(y)))

    def uhat_loop(self, ix, iy):
        return TwistedLoop(-self.n_trunc, self.Uhat[ix, iy])

    def __repr__(self):
        return (f"FrameField({len(self.x)}x{len(self.y)}, trunc={self.n_trunc}, "
                f"split={self.split_residual.max():.2e})")


def truncation_tail(n_trunc, reach, lam_amp=1.0):
    """Upper bound on the dropped series tail of a ladder truncated at n_trunc.

    reach is the largest |coordinate| integrated over; the degree-k ladder
    level is bounded by (reach/2)^k / k!, and evaluating at lambda multiplies
    degree k by lam_amp^k.
    """
    m = 0.5 * reach * lam_amp
    return m ** (n_trunc + 1) / math.factorial(n_trunc + 1) * math.exp(m)


def build_frame_field(up, um, consistency_tol=None, unitarity_tol=None):
    """Glue two half-frame families into the frame field over the grid.

    The one-dimensional families are integrated once; the per-node work is the
    Toeplitz solve and a handful of window products, vectorized over the whole
    grid in degree-sized batches. Default tolerances follow the truncation
    tail of the ladder, which is what the consistency and unitarity defects
    consist of.
    """
    if up.axis != "x" or um.axis != "y":
        raise GridError("expected an x-axis family and a y-axis family")
    if up.n_trunc != um.n_trunc:
        raise GridError("half frames must share the truncation order")
    N = up.n_trunc
    reach = max(np.abs(up.nodes).max(), np.abs(um.nodes).max())
    if consistency_tol is None:
        consistency_tol = max(1e-12, 50.0 * truncation_tail(N, reach))
    if unitarity_tol is None:
        # unitarity is probed at lambda in {1/2, 1, 2}
        unitarity_tol = max(1e-9, 50.0 * truncation_tail(N, reach, lam_amp=2.0))
    nx, ny = len(up.nodes), len(um.nodes)
    Vinv = inverse_coeffs(um.coeffs, -N, -N, N + 1)     # (ny, N+1), degrees -N..0
    # G(x, y) = U_minus(y)^{-1} U_plus(x), degrees -N..N
    G = np.zeros((nx, ny, 2 * N + 1, 2, 2), complex)
    for d in range(-N, N + 1):
        for a in range(max(-N, d - N), min(0, d) + 1):
            G[:, :, d + N] += np.einsum("yab,xbc->xyac",
                                        Vinv[:, a + N], up.coeffs[:, d - a])
    G = G.reshape(nx * ny, 2 * N + 1, 2, 2)
    Lm = _split_negative(G, N)
    parity_defect = parity_violation(Lm, -N)
    parity_project(Lm, -N)
    GL = mul_coeffs(G, Lm, -N, -N, -2 * N, 3 * N + 1)
    del G
    Lp = np.ascontiguousarray(GL[:, 2 * N:])
    split_res = np.abs(GL[:, :2 * N]).reshape(nx * ny, -1).max(axis=1)
    del GL
    Up_b = np.broadcast_to(up.coeffs[:, None], (nx, ny, N + 1, 2, 2)) \
        .reshape(nx * ny, N + 1, 2, 2)
    Um_b = np.broadcast_to(um.coeffs[None, :], (nx, ny, N + 1, 2, 2)) \
        .reshape(nx * ny, N + 1, 2, 2)
    Uhat = mul_coeffs(Up_b, Lm, 0, -N, -N, 2 * N + 1)
    Uhat2 = mul_coeffs(Um_b, Lp, -N, 0, -N, 2 * N + 1)
    consistency = np.abs(Uhat - Uhat2).reshape(nx * ny, -1).max(axis=1)
    del Uhat2
    field = FrameField(
        up.nodes, um.nodes, N, up.spec,
        Uhat.reshape(nx, ny, 2 * N + 1, 2, 2),
        Lp.reshape(nx, ny, N + 1, 2, 2),
        Lm.reshape(nx, ny, N + 1, 2, 2),
        split_res.reshape(nx, ny),
        consistency.reshape(nx, ny),
        parity_defect,
        {lam: _unitarity_residual(Uhat, -N, lam) for lam in (0.5, 1.0, 2.0)})
    _validate_field(field, consistency_tol, unitarity_tol)
    return field


def _unitarity_residual(Uhat_flat, kmin, lam):
    Ue = eval_coeffs(Uhat_flat, kmin, lam)
    un = sup_abs(np.einsum("nab,ncb->nac", Ue, Ue.conj()) - I2)
    det = Ue[:, 0, 0] * Ue[:, 1, 1] - Ue[:, 0, 1] * Ue[:, 1, 0]
    return max(un, sup_abs(det - 1.0))


def _validate_field(field, consistency_tol, unitarity_tol):
    c = field.consistency.max()
    if c > consistency_tol:
        raise SplitError(f"factor consistency defect {c:.3e} exceeds "
                         f"{consistency_tol:g}")
    for lam, resid in field.unitarity.items():
        if resid > unitarity_tol:
            raise SplitError(f"unitarity residual {resid:.3e} at lambda={lam} "
                             f"exceeds {unitarity_tol:g}")
    origin = field.Uhat[field.i0x, field.i0y].copy()
    origin[field.n_trunc] -= I2
    if sup_abs(origin) > 1e-12:
        raise SplitError("frame at the origin is not the identity")


# ---------------------------------------------------------------------------
# connection extraction

class ConnectionField:
    """Angle and off-diagonal data of the frame's flat connection.

    phihat is the rotating angle field, r its negated x derivative as read off
    the factors, p = i e^{i phihat} and q = i e^{-i alpha} the off-diagonal
    scalars. omega1_* and omega2_* are the per-degree coefficient fields of the
    two connection matrices:

        omega1 = [[i r / 2, lambda q / 2], [-lambda conj(q) / 2, -i r / 2]]
        omega2 = -(1 / (2 lambda)) [[0, p], [-conj(p), 0]]
    """

    def __init__(self, x, y, alpha, beta, phihat, r, shape_report=None):
        self.x = x
        self.y = y
        self.alpha = alpha
        self.beta = beta
        self.phihat = phihat
        self.r = r
        self.p = 1j * np.exp(1j * phihat)
        self.q = 1j * np.exp(-1j * alpha)
        self.shape_report = shape_report
        nx, ny = phihat.shape
        w1_0 = np.zeros((nx, ny, 2, 2), complex)
        w1_0[..., 0, 0] = 0.5j * r
        w1_0[..., 1, 1] = -0.5j * r
        w1_1 = np.zeros((nx, ny, 2, 2), complex)
        w1_1[..., 0, 1] = 0.5 * self.q[:, None]
        w1_1[..., 1, 0] = -0.5 * np.conj(self.q)[:, None]
        w2_m1 = np.zeros((nx, ny, 2, 2), complex)
        w2_m1[..., 0, 1] = -0.5 * self.p
        w2_m1[..., 1, 0] = 0.5 * np.conj(self.p)
        self.omega1_c0 = w1_0
        self.omega1_c1 = w1_1
        self.omega2_cm1 = w2_m1


def _d_axis0(F, h):
    """Order-2 first derivative along axis 0, one-sided at the edges."""
    out = np.empty_like(F)
    out[1:-1] = (F[2:] - F[:-2]) / (2 * h)
    out[0] = (-3 * F[0] + 4 * F[1] - F[2]) / (2 * h)
    out[-1] = (3 * F[-1] - 4 * F[-2] + F[-3]) / (2 * h)
    return out


def _d_axis1(F, h):
    return np.swapaxes(_d_axis0(np.swapaxes(F, 0, 1), h), 0, 1)


def extract_connection(field, check_shape=True, shape_tol=None):
    """Read the connection off the factors; optionally cross-check by differences.

    The angle field comes from the degree-0 coefficient of L_plus anchored to
    beta on the y axis; r comes from the degree -1 coefficient of L_minus.
    With check_shape on, U_hat^{-1} U_hat_x and U_hat^{-1} U_hat_y are formed
    by finite differences and must reproduce the prescribed Laurent pattern
    (degrees {0, 1} and {-1}) with off-pattern coefficients and field
    disagreements below shape_tol. Raises ConnectionShapeError otherwise.
    """
    x, y = field.x, field.y
    alpha = np.asarray(field.spec.alpha(x), float)
    beta = np.asarray(field.spec.beta(y), float)
    Lp0 = field.Lp[:, :, 0]
    ratio = Lp0[..., 1, 1] / Lp0[..., 0, 0]
    dphi = np.unwrap(np.angle(ratio), axis=0)
    dphi -= dphi[field.i0x:field.i0x + 1, :]
    phihat = beta[None, :] + dphi
    ell_m1 = field.Lm[:, :, field.n_trunc - 1, 0, 1]
    r = -2.0 * np.real(np.exp(1j * alpha)[:, None] * ell_m1)
    report = None
    if check_shape:
        report = _shape_check(field, alpha, beta, phihat, r, shape_tol)
    return ConnectionField(x, y, alpha, beta, phihat, r, report)


def _shape_check(field, alpha, beta, phihat, r, tol):
    """Compare FD frame derivatives against the expected connection pattern."""
    hx = float(field.x[1] - field.x[0])
    hy = float(field.y[1] - field.y[0])
    if tol is None:
        h = max(hx, hy)
        # O(h) floor: for merely continuous potentials the frame's second
        # derivative jumps across the axes and centered differences degrade
        # there from O(h^2) to O(h)
        tol = max(0.5 * h, 8.0 * h * h)
    N = field.n_trunc
    U = field.Uhat
    Uinv = loops.adjugate_coeffs(U)          # det U_hat = 1 up to truncation tail
    Ux = _d_axis0(U, hx)
    Uy = _d_axis1(U, hy)

    def window_product(B, dlo, dhi):
        out = np.zeros(U.shape[:2] + (dhi - dlo + 1, 2, 2), complex)
        for d in range(dlo, dhi + 1):
            for a in range(max(-N, d - N), min(N, d + N) + 1):
                out[:, :, d - dlo] += np.einsum(
                    "xyab,xybc->xyac", Uinv[:, :, a + N], B[:, :, d - a + N])
        return out

    W1 = window_product(Ux, -3, 3)
    W2 = window_product(Uy, -3, 3)
    defects = {}
    # off-pattern degrees
    defects["w1 degrees outside {0,1}"] = max(
        sup_abs(W1[:, :, [0, 1, 2]]), sup_abs(W1[:, :, [5, 6]]))
    defects["w2 degrees outside {-1}"] = max(
        sup_abs(W2[:, :, [0, 1]]), sup_abs(W2[:, :, [4, 5, 6]]))
    # in-pattern structural zeros
    defects["w1 degree-0 off-diagonal"] = max(
        sup_abs(W1[:, :, 3, 0, 1]), sup_abs(W1[:, :, 3, 1, 0]))
    defects["w1 degree-1 diagonal"] = max(
        sup_abs(W1[:, :, 4, 0, 0]), sup_abs(W1[:, :, 4, 1, 1]))
    defects["w2 degree -1 diagonal"] = max(
        sup_abs(W2[:, :, 2, 0, 0]), sup_abs(W2[:, :, 2, 1, 1]))
    # field agreement
    r_fd = np.real(-2j * W1[:, :, 3, 0, 0])
    defects["r vs FD"] = sup_abs(r_fd - r)
    p_fd = -2.0 * W2[:, :, 2, 0, 1]          # = i e^{i phihat} + O(h^2)
    phi_fd = np.unwrap(np.angle(p_fd / 1j), axis=0)
    phi_fd -= phi_fd[field.i0x:field.i0x + 1, :] - beta[None, :]
    defects["phihat vs FD"] = sup_abs(phi_fd - phihat)
    defects["w2 off-diagonal modulus vs 1/2"] = sup_abs(
        np.abs(W2[:, :, 2, 0, 1]) - 0.5)
    defects["r vs -d phihat/dx"] = sup_abs(_d_axis0(phihat, hx) + r)
    worst = max(defects, key=defects.get)
    if defects[worst] > tol:
        raise ConnectionShapeError(
            f"connection shape defect '{worst}' = {defects[worst]:.3e} "
            f"exceeds {tol:.3e}")
    return defects


def zcc_residual(conn):
    """Per-node curvature residual of the extracted connection.

    Assembles d_y omega1 - d_x omega2 + [omega2, omega1] degree by degree with
    order-2 differences and returns the sup over degrees and matrix entries at
    each node. The lambda^{+1} block is the y derivative of a y-independent
    coefficient and is included for completeness.
    """
    hx = float(conn.x[1] - conn.x[0])
    hy = float(conn.y[1] - conn.y[0])
    w1_0, w1_1, w2_m1 = conn.omega1_c0, conn.omega1_c1, conn.omega2_cm1

    def comm(A, B):
        return (np.einsum("...ab,...bc->...ac", A, B)
                - np.einsum("...ab,...bc->...ac", B, A))

    res0 = _d_axis1(w1_0, hy) + comm(w2_m1, w1_1)
    resm1 = -_d_axis0(w2_m1, hx) + comm(w2_m1, w1_0)
    resp1 = _d_axis1(w1_1, hy)
    stack = np.stack([np.abs(res0), np.abs(resm1), np.abs(resp1)], axis=-1)
    return stack.reshape(stack.shape[:2] + (-1,)).max(axis=-1)
