"""Arithmetic for truncated matrix Laurent loops with the twist symmetry.

A loop here is a finite Laurent series sum_k C_k lambda^k with 2x2 complex
coefficients, stored as a contiguous block of coefficients plus the lowest
degree. The twist symmetry g(-lambda) = Ad(sigma3) g(lambda) forces even-degree
coefficients to be diagonal and odd-degree ones to be anti-diagonal; those
structural zeros are enforced at construction time.

All products and inverses are window-truncated. The low-level kernels operate
on plain ndarrays with arbitrary leading batch axes so that whole grids of
loops can be processed in one call; the TwistedLoop class wraps a single loop
for the public operations.
"""

import numpy as np

DEFAULT_TRUNC = 16
MAX_DEGREE = 64                     # hard cap for any requested window bound

I2 = np.eye(2, dtype=complex)


class TruncationOverflowError(ValueError):
    """Requested degree window exceeds the configured maximum."""


class SingularSeriesError(ValueError):
    """Scalar series has no invertible degree-zero coefficient."""


class ParityError(ValueError):
    """Coefficients violate the twist parity pattern."""


def sup_abs(arr):
    """Matrix/array norm used throughout: largest absolute entry."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0.0
    return float(np.abs(arr).max())


def _check_window(window):
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise ValueError(f"empty window {window}")
    if max(abs(lo), abs(hi)) > MAX_DEGREE:
        raise TruncationOverflowError(
            f"window {window} exceeds maximum degree {MAX_DEGREE}")
    return lo, hi


# ---------------------------------------------------------------------------
# batched coefficient kernels (leading axes free)

def scalar_conv(a, b, amin, bmin, outmin, outlen):
    """Laurent product of scalar coefficient blocks on a fixed output window."""
    na, nb = a.shape[-1], b.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (outlen,),
                   complex)
    for d in range(outlen):
        deg = outmin + d
        for i in range(na):
            j = deg - (amin + i) - bmin
            if 0 <= j < nb:
                out[..., d] += a[..., i] * b[..., j]
    return out


def mul_coeffs(A, B, amin, bmin, outmin, outlen):
    """Matrix loop product on a fixed output window. A, B: (..., D, 2, 2)."""
    out = np.zeros(np.broadcast_shapes(A.shape[:-3], B.shape[:-3])
                   + (outlen, 2, 2), complex)
    na, nb = A.shape[-3], B.shape[-3]
    for d in range(outlen):
        deg = outmin + d
        for i in range(na):
            j = deg - (amin + i) - bmin
            if 0 <= j < nb:
                out[..., d, :, :] += np.einsum("...ab,...bc->...ac",
                                               A[..., i, :, :], B[..., j, :, :])
    return out


def adjugate_coeffs(C):
    out = np.empty_like(C)
    out[..., 0, 0] = C[..., 1, 1]
    out[..., 1, 1] = C[..., 0, 0]
    out[..., 0, 1] = -C[..., 0, 1]
    out[..., 1, 0] = -C[..., 1, 0]
    return out


def det_coeffs(C, kmin):
    """Determinant series of a matrix loop; returns (coeffs, lowest degree)."""
    n = C.shape[-3]
    det = scalar_conv(C[..., 0, 0], C[..., 1, 1], kmin, kmin, 2 * kmin, 2 * n - 1)
    det -= scalar_conv(C[..., 0, 1], C[..., 1, 0], kmin, kmin, 2 * kmin, 2 * n - 1)
    return det, 2 * kmin


def recip_coeffs(d, dmin, outmin, outlen, pivot_tol=1e-12, max_terms=80):
    """Reciprocal of a scalar series via the Neumann sum around its degree-0 term.

    Writes d = d0 (1 - e) with e carrying no degree-0 part, then accumulates
    (1/d0) sum_j e^j on the requested window. Terms outside the window are
    dropped; the error this introduces is of the same order as the window
    truncation already accepted everywhere else.
    """
    i0 = -dmin
    if not 0 <= i0 < d.shape[-1]:
        raise SingularSeriesError("series has no degree-0 coefficient")
    d0 = d[..., i0].copy()
    if np.abs(d0).min() < pivot_tol:
        raise SingularSeriesError(
            f"degree-0 coefficient below {pivot_tol:g}, series not invertible")
    e = -d / d0[..., None]
    e[..., i0] += 1.0                           # e = 1 - d/d0
    r = np.zeros(d.shape[:-1] + (outlen,), complex)
    if not outmin <= 0 <= outmin + outlen - 1:
        raise ValueError("reciprocal window must contain degree 0")
    r[..., -outmin] = 1.0
    term = r.copy()
    for _ in range(max_terms):
        term = scalar_conv(term, e, outmin, dmin, outmin, outlen)
        if np.abs(term).max() < 1e-18:
            break
        r += term
    return r / d0[..., None]


def mat_scalar_conv(C, s, cmin, smin, outmin, outlen):
    """Matrix loop times scalar series on a fixed output window."""
    out = np.zeros(np.broadcast_shapes(C.shape[:-3], s.shape[:-1])
                   + (outlen, 2, 2), complex)
    nc, ns = C.shape[-3], s.shape[-1]
    for d in range(outlen):
        deg = outmin + d
        for i in range(nc):
            j = deg - (cmin + i) - smin
            if 0 <= j < ns:
                out[..., d, :, :] += C[..., i, :, :] * s[..., j][..., None, None]
    return out


def inverse_coeffs(C, kmin, outmin, outlen):
    """Loop inverse as adjugate times determinant reciprocal, window truncated."""
    det, dmin = det_coeffs(C, kmin)
    kmax = kmin + C.shape[-3] - 1
    # adj has degrees [kmin, kmax]; reciprocal needs [outmin - kmax, outmax - kmin],
    # widened to contain 0 so the Neumann pivot sits inside the window
    rmin = min(outmin - kmax, 0)
    rmax = max(outmin + outlen - 1 - kmin, 0)
    recip = recip_coeffs(det, dmin, rmin, rmax - rmin + 1)
    adj = adjugate_coeffs(C)
    return mat_scalar_conv(adj, recip, kmin, rmin, outmin, outlen)


def eval_coeffs(C, kmin, lam):
    """Evaluate the loop at a nonzero scalar lambda."""
    degs = kmin + np.arange(C.shape[-3])
    w = np.asarray(lam) ** degs.astype(float)
    return np.einsum("...dab,d->...ab", C, w.astype(complex))


def parity_violation(C, kmin):
    """Largest entry sitting on a structural zero of the twist pattern."""
    worst = 0.0
    for i in range(C.shape[-3]):
        deg = kmin + i
        if deg % 2 == 0:
            worst = max(worst, sup_abs(C[..., i, 0, 1]), sup_abs(C[..., i, 1, 0]))
        else:
            worst = max(worst, sup_abs(C[..., i, 0, 0]), sup_abs(C[..., i, 1, 1]))
    return worst


def parity_project(C, kmin):
    """Zero out the structural-zero entries in place; returns C."""
    for i in range(C.shape[-3]):
        deg = kmin + i
        if deg % 2 == 0:
            C[..., i, 0, 1] = 0.0
            C[..., i, 1, 0] = 0.0
        else:
            C[..., i, 0, 0] = 0.0
            C[..., i, 1, 1] = 0.0
    return C


def mat_inv2(M):
    """Pointwise inverse of 2x2 matrices, batched."""
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 1, 1] = M[..., 0, 0]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    return out / det[..., None, None]


# ---------------------------------------------------------------------------
# public wrappers

class ScalarLaurent:
    """Scalar Laurent polynomial: coefficient block plus lowest degree."""

    def __init__(self, k_min, coeffs):
        self.k_min = int(k_min)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.ndim != 1:
            raise ValueError("scalar coefficients must be one-dimensional")

    @property
    def k_max(self):
        return self.k_min + len(self.coeffs) - 1

    def coeff(self, deg):
        i = deg - self.k_min
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def __call__(self, lam):
        degs = self.k_min + np.arange(len(self.coeffs))
        return complex(np.sum(self.coeffs * np.asarray(lam) ** degs.astype(float)))

    def __repr__(self):
        return f"ScalarLaurent(k_min={self.k_min}, n={len(self.coeffs)})"


class TwistedLoop:
    """Single twisted loop: (D, 2, 2) coefficient block plus lowest degree.

    Construction verifies the parity pattern; entries below parity_tol on
    structural zeros are cleaned to exact zeros, larger ones raise.
    """

    def __init__(self, k_min, coeffs, parity_tol=1e-12):
        self.k_min = int(k_min)
        self.coeffs = np.array(coeffs, dtype=complex)
        if self.coeffs.ndim != 3 or self.coeffs.shape[-2:] != (2, 2):
            raise ValueError("coefficients must have shape (D, 2, 2)")
        if max(abs(self.k_min), abs(self.k_max)) > MAX_DEGREE:
            raise TruncationOverflowError(
                f"degrees [{self.k_min}, {self.k_max}] exceed {MAX_DEGREE}")
        viol = parity_violation(self.coeffs, self.k_min)
        if viol > parity_tol:
            raise ParityError(f"parity violation {viol:.3e} > {parity_tol:g}")
        parity_project(self.coeffs, self.k_min)

    @property
    def k_max(self):
        return self.k_min + self.coeffs.shape[0] - 1

    @property
    def window(self):
        return (self.k_min, self.k_max)

    def coeff(self, deg):
        i = deg - self.k_min
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i].copy()
        return np.zeros((2, 2), complex)

    def __repr__(self):
        return f"TwistedLoop(window=({self.k_min}, {self.k_max}))"


def identity_loop():
    return TwistedLoop(0, I2[None])


def from_coeff(deg, mat):
    """Loop with a single coefficient at the given degree."""
    return TwistedLoop(deg, np.asarray(mat, dtype=complex)[None])


def loop_mul(a, b, window=None):
    """Product of two twisted loops, truncated to the given degree window.

    Without a window the natural product window is used, clipped to the
    maximum degree. Twist parity is closed under products, so the result is
    constructed without re-validation noise (parity of the inputs is exact).
    """
    if window is None:
        lo = max(a.k_min + b.k_min, -MAX_DEGREE)
        hi = min(a.k_max + b.k_max, MAX_DEGREE)
    else:
        lo, hi = _check_window(window)
    out = mul_coeffs(a.coeffs, b.coeffs, a.k_min, b.k_min, lo, hi - lo + 1)
    return TwistedLoop(lo, out)


def loop_det(a):
    """Determinant of a twisted loop as a scalar Laurent polynomial."""
    det, dmin = det_coeffs(a.coeffs, a.k_min)
    return ScalarLaurent(dmin, det)


def scalar_reciprocal(d, window):
    """Reciprocal of a scalar Laurent polynomial on a degree window."""
    lo, hi = _check_window(window)
    if not lo <= 0 <= hi:
        raise ValueError("reciprocal window must contain degree 0")
    r = recip_coeffs(d.coeffs, d.k_min, lo, hi - lo + 1)
    return ScalarLaurent(lo, r)


def loop_inverse(a, window=None):
    """Inverse loop on a degree window (adjugate times det reciprocal)."""
    if window is None:
        lo, hi = -abs(a.k_min) - abs(a.k_max), abs(a.k_min) + abs(a.k_max)
        lo, hi = max(lo, -MAX_DEGREE), min(hi, MAX_DEGREE)
    else:
        lo, hi = _check_window(window)
    out = inverse_coeffs(a.coeffs, a.k_min, lo, hi - lo + 1)
    return TwistedLoop(lo, out)


def loop_eval(a, lam0):
    """Evaluate a loop at a nonzero scalar; returns a 2x2 matrix."""
    if lam0 == 0:
        raise ValueError("cannot evaluate at lambda = 0")
    return eval_coeffs(a.coeffs, a.k_min, lam0)


def unitarity_check(a, lam_samples):
    """Worst unitarity and determinant defect over the sample points.

    Returns max over lambda of max(||U U^H - I||, |det U - 1|), with U the
    loop evaluated at lambda.
    """
    worst = 0.0
    for lam in lam_samples:
        U = loop_eval(a, lam)
        worst = max(worst, sup_abs(U @ U.conj().T - I2))
        worst = max(worst, abs(np.linalg.det(U) - 1.0))
    return worst
