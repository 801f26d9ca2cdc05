"""Radial reference values for the Townes profile and the radial trap constants.

Uses scipy only, so it shares no code with the Rust solvers. Writes oracle.json
next to this file.
"""
import json
import os

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import k0, k1

RTOL, ATOL = 1e-13, 1e-15
R0 = 1e-4
R_MATCH = 10.0


def shoot(w0, r_end):
    def rhs(r, y):
        w, dw = y
        return [dw, -dw / r + w - w**3]

    def crossed(r, y):
        return y[0]

    def turned(r, y):
        return y[1]

    crossed.terminal = True
    turned.terminal = True
    # Series start: w = w0 + (w0 - w0^3) r^2 / 4.
    c = (w0 - w0**3) / 4
    sol = solve_ivp(rhs, (R0, r_end), [w0 + c * R0**2, 2 * c * R0], method="DOP853",
                    rtol=RTOL, atol=ATOL, events=(crossed, turned), dense_output=True,
                    max_step=0.02)
    if sol.t_events[0].size:
        return "low", sol
    if sol.t_events[1].size:
        return "high", sol
    return "ok", sol


def townes():
    lo, hi = 2.0, 2.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        kind, _ = shoot(mid, 20.0)
        # Too large w0 overshoots through zero; too small turns back up.
        if kind == "low":
            hi = mid
        else:
            lo = mid
    w0 = 0.5 * (lo + hi)
    _, sol = shoot(w0, R_MATCH)
    amp = sol.sol(R_MATCH)[0] / k0(R_MATCH)
    return w0, sol, amp


def profile(r, sol, amp):
    r = np.asarray(r, dtype=float)
    w = np.empty_like(r)
    dw = np.empty_like(r)
    inner = r <= R_MATCH
    rc = np.maximum(r[inner], R0)
    y = sol.sol(rc)
    w[inner], dw[inner] = y[0], y[1]
    w[~inner] = amp * k0(r[~inner])
    dw[~inner] = -amp * k1(r[~inner])
    return w, dw


def radial_psi1(r, w, k):
    """Radial solution of (-d2 - d/r + 1 - 3 w^2) psi = -k w^3 - r^2 w, decaying."""
    from scipy.interpolate import CubicSpline

    ws = CubicSpline(r, w)

    def system(t, y, forced):
        p, dp = y
        ww = ws(t)
        f = (-k * ww**3 - t * t * ww) if forced else 0.0
        return [dp, -dp / t + (1 - 3 * ww * ww) * p - f]

    t_end = r[-1]
    span = (r[0], t_end)
    hom = solve_ivp(system, span, [1.0, 0.0], args=(False,), method="DOP853", rtol=RTOL,
                    atol=ATOL, t_eval=r)
    par = solve_ivp(system, span, [0.0, 0.0], args=(True,), method="DOP853", rtol=RTOL,
                    atol=ATOL, t_eval=r)
    # The homogeneous regular solution grows like e^r; kill it at t_end.
    c = -par.y[0][-1] / hom.y[0][-1]
    return par.y[0] + c * hom.y[0], par.y[1] + c * hom.y[1]


def radial_integral(r, f):
    from scipy.integrate import simpson

    return 2 * np.pi * simpson(f * r, x=r)


def main():
    w0, sol, amp = townes()
    r = np.linspace(0.0, 30.0, 300001)
    w, dw = profile(r, sol, amp)
    a_star = radial_integral(r, w**2)
    m2 = 0.5 * radial_integral(r, r**2 * w**2)
    grad = radial_integral(r, dw**2)
    quartic = 0.5 * radial_integral(r, w**4)

    # Isotropic trap: lambda0^4 = int |x|^2 w^2.
    keep = r <= 18.0
    rr, wr = r[keep], w[keep]
    l04 = 2 * m2
    # The ODE starts one sample off the axis, where psi is flat to O(r^2).
    psi, dpsi = radial_psi1(rr[1:], wr[1:], l04 / a_star)
    psi = np.concatenate(([psi[0]], psi))
    dpsi = np.concatenate(([0.0], dpsi))
    v = rr**2
    stated = radial_integral(rr, (3 * wr**2 - 1) * psi**2) - 4 * radial_integral(rr, v * wr * psi)
    grad_psi = radial_integral(rr, dpsi**2)
    out = {
        "w0": w0,
        "a_star": a_star,
        "grad_sq": grad,
        "half_quartic": quartic,
        "second_moment_x1": m2,
        "tail_amplitude": amp,
        "isotropic": {
            "lambda0_4": l04,
            "c_star": stated / (2 * l04),
            "c_star_mass_consistent": (stated - grad_psi) / (2 * l04),
            "int_psi1_sq": radial_integral(rr, psi**2),
        },
    }
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "oracle.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
