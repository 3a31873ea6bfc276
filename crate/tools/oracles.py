"""Independent reference values for the acceptance harness, computed with mpmath.

Writes crates/core/tests/fixtures/oracles.json. Rerun after regenerating the
witness fixture: python3 tools/oracles.py
"""
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "crates/core/tests/fixtures"
S = mp.sqrt(2) / 2


def bump(u):
    return mp.e ** (-1 / (1 - u * u)) if abs(u) < 1 else mp.mpf(0)


def bump_mass():
    return mp.quad(bump, [-1, 0, 1])


def unit_bump_transform(w):
    f = lambda u: bump(u) * mp.cos(w * u)
    pts = mp.linspace(-1, 1, max(8, int(abs(w)) + 8))
    return mp.quad(f, pts) / bump_mass()


def to_matrix(family, n, coeffs):
    if family == "spin_factor":
        x0, x1, x2, x3 = coeffs
        return mp.matrix([[x0 + x1, x2 - 1j * x3], [x2 + 1j * x3, x0 - x1]])
    m = mp.matrix(n, n)
    for k in range(n):
        m[k, k] = coeffs[k]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for idx, (i, j) in enumerate(pairs):
        if family == "sym_real":
            m[i, j] = m[j, i] = coeffs[n + idx] * S
        else:
            a, b = coeffs[n + 2 * idx] * S, coeffs[n + 2 * idx + 1] * S
            m[i, j] = a - 1j * b
            m[j, i] = a + 1j * b
    return m


def log_det_right_half(m):
    """Sum of principal logs of the eigenvalues; continuous on matrices P - iQ with P > 0."""
    ev = mp.eig(m, left=False, right=False)
    return mp.fsum(mp.log(v) for v in ev)


def scalar_kernel(family, n, z, w, s):
    zm, wm = to_matrix(family, n, z), to_matrix(family, n, w)
    # Coefficient conjugation is the adjoint in a Hermitian basis.
    wbar = wm.H
    arg = (zm - wbar) / (2j)
    return mp.e ** (-s * log_det_right_half(arg))


def witness_ratio(wit):
    fam, n, s = wit["algebra"]["family"], wit["algebra"]["n"], wit["s"]
    pts = [[mp.mpc(re, im) for re, im in p["coeffs"]] for p in wit["points"]]
    k = len(pts)
    g = mp.matrix(k, k)
    for i in range(k):
        for j in range(k):
            g[i, j] = scalar_kernel(fam, n, pts[i], pts[j], s)
    g = (g + g.H) / 2
    ev = mp.eighe(g, eigvals_only=True)
    ev = sorted(ev)
    return float(ev[0] / max(abs(v) for v in ev))


def cayley_ball(m):
    n = m.rows
    eye = mp.eye(n)
    return (m - 1j * eye) * mp.inverse(m + 1j * eye)


def main():
    out = {}
    out["bump_mass"] = float(bump_mass())
    out["unit_bump_transform"] = [[w, float(unit_bump_transform(w))] for w in [0.0, 0.5, 2.0, 7.5, 20.0, 45.0]]
    hp = []
    for s, z, w in [(1.5, 0.3 + 1.2j, -0.7 + 0.4j), (0.5, -1 + 0.2j, 2 + 3j), (2.7, 0.1j, 0.05 + 0.02j)]:
        v = ((mp.mpc(z) - mp.conj(mp.mpc(w))) / (2j)) ** (-s)
        hp.append([s, z.real, z.imag, w.real, w.imag, float(v.real), float(v.imag)])
    out["halfplane_kernel"] = hp
    gc = []
    for fam, n, r, d, big_n, s in [("sym_real", 3, 3, 1, 6, 2.2), ("herm_complex", 2, 2, 2, 4, 1.7), ("spin_factor", 4, 2, 2, 4, 3.1)]:
        v = (2 * mp.pi) ** (mp.mpf(big_n - r) / 2)
        for j in range(r):
            v *= mp.gamma(s - j * mp.mpf(d) / 2)
        gc.append([fam, n, s, float(v)])
    out["gamma_cone"] = gc
    z = [mp.mpc(0.3, 1.1), mp.mpc(-0.4, 0.9), mp.mpc(0.2, 0.1)]
    w = [mp.mpc(-0.5, 0.7), mp.mpc(0.6, 1.3), mp.mpc(-0.1, 0.2)]
    out["tube_scalar_kernel"] = []
    for s in [0.5, 1.3, 2.0]:
        v = scalar_kernel("sym_real", 2, z, w, s)
        out["tube_scalar_kernel"].append({
            "family": "sym_real", "n": 2, "s": s,
            "z": [[float(c.real), float(c.imag)] for c in z], "w": [[float(c.real), float(c.imag)] for c in w],
            "value": [float(v.real), float(v.imag)],
        })
    zm = to_matrix("sym_real", 2, z)
    pm = cayley_ball(zm)
    out["cayley_sym2"] = {
        "z": [[float(c.real), float(c.imag)] for c in z],
        "p_matrix": [[[float(pm[i, j].real), float(pm[i, j].imag)] for j in range(2)] for i in range(2)],
    }
    wits = json.loads((FIX / "wallach_witnesses.json").read_text())
    out["witness_ratios"] = [witness_ratio(wt) for wt in wits]
    out["cross_model_constant"] = [[s, float(mp.mpf(2) ** s / mp.gamma(s))] for s in [0.5, 1.0, 2.0]]
    (FIX / "oracles.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
