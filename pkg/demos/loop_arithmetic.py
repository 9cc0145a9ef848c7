"""The twisted-loop toolbox: products, inverses, evaluation, factorization.

Everything downstream rests on truncated Laurent arithmetic, so this script
pokes the primitives directly on small hand-made loops.
"""

import numpy as np

import psfront as pf

I = np.eye(2, dtype=complex)
Q = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

# a twisted loop: even degrees diagonal, odd degrees anti-diagonal
g = pf.TwistedLoop(-1, np.stack([0.3 * Q, I, 0.2 * Q]))
print("g =", g)

sq = pf.loop_mul(g, g, window=(-2, 2))
print("degree -2 of g^2:\n", np.round(sq.coeff(-2), 6))

ginv = pf.loop_inverse(g, window=(-8, 8))
rt = pf.loop_mul(g, ginv, window=(-4, 4))
err = max(np.abs(rt.coeff(k) - (I if k == 0 else 0)).max()
          for k in range(-4, 5))
print(f"round trip g g^-1 = 1 to {err:.2e}")

val = pf.loop_eval(g, 0.7)
print(f"g(0.7) =\n{np.round(val, 6)}")
d = pf.loop_det(g)
terms = " + ".join(f"({d.coeff(k):.2f}) l^{k}" for k in range(d.k_min, d.k_max + 1)
                   if d.coeff(k) != 0)
print(f"det g = {terms}")
print(f"  check at 0.7: series {d(0.7):.6f}, "
      f"direct {np.linalg.det(val):.6f}")

# Birkhoff: a loop with poles on both sides splits into one-sided factors.
# neg^-1 has an infinite tail decaying like 0.25^k, so the window must be
# wide enough for the cut-off tail to clear the residual gate.
neg = pf.TwistedLoop(-1, np.stack([0.25 * Q, I]))
pos = pf.TwistedLoop(0, np.stack([I + 0.1 * np.diag([1.0, -1.0]), 0.15 * Q]))
G = pf.loop_mul(pos, pf.loop_inverse(neg, window=(-32, 0)), window=(-16, 16))
Lp, Lm = pf.birkhoff_split(G, n_trunc=16)
rec_p = max(np.abs(Lp.coeff(k) - pos.coeff(k)).max() for k in range(0, 3))
rec_m = max(np.abs(Lm.coeff(k) - neg.coeff(k)).max() for k in range(-2, 1))
print(f"split recovers the constructed factors to "
      f"{max(rec_p, rec_m):.2e}")

u = pf.unitarity_check(g, (1.0,))
print(f"unitarity defect of g at lambda = 1: {u:.3f} (g is not unitary)")
