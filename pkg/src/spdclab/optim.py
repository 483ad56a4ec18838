"""Derivative-free maximizers for the likelihood search.

Two strategies are provided: a downhill simplex (run on the negated
objective) with shrinking-scale restarts, and a Metropolis annealer with
geometric cooling followed by a simplex refinement.  Both are seeded and
deterministic.  A per-coordinate parabolic polish is available to push
the final point to a numerically stationary one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    evaluations: int
    iterations: int
    converged: bool
    restarts_used: int = 0


def _simplex_once(fn, x0, scale, rel_tol, max_iter):
    """One Nelder-Mead descent on -fn starting from x0. Returns
    (x_best, f_best, evals, iters, converged) with f_best = fn(x_best)."""
    n = x0.size
    # right-angled initial simplex, one vertex displaced per coordinate
    verts = np.tile(x0, (n + 1, 1))
    for i in range(n):
        verts[i + 1, i] += scale if x0[i] == 0.0 else scale * max(1.0, abs(x0[i]))
    vals = np.array([-fn(v) for v in verts])
    evals = n + 1
    iters = 0
    converged = False
    while iters < max_iter:
        order = np.argsort(vals)
        verts, vals = verts[order], vals[order]
        spread = vals[-1] - vals[0]
        if spread <= rel_tol * max(abs(vals[0]), 1e-30):
            converged = True
            break
        centroid = verts[:-1].mean(axis=0)
        worst = verts[-1]
        refl = centroid + (centroid - worst)
        f_refl = -fn(refl)
        evals += 1
        if f_refl < vals[0]:
            expd = centroid + 2.0 * (centroid - worst)
            f_expd = -fn(expd)
            evals += 1
            if f_expd < f_refl:
                verts[-1], vals[-1] = expd, f_expd
            else:
                verts[-1], vals[-1] = refl, f_refl
        elif f_refl < vals[-2]:
            verts[-1], vals[-1] = refl, f_refl
        else:
            contr = centroid + 0.5 * (worst - centroid)
            f_contr = -fn(contr)
            evals += 1
            if f_contr < vals[-1]:
                verts[-1], vals[-1] = contr, f_contr
            else:
                verts[1:] = verts[0] + 0.5 * (verts[1:] - verts[0])
                vals[1:] = [-fn(v) for v in verts[1:]]
                evals += n
        iters += 1
    best = int(np.argmin(vals))
    return verts[best].copy(), -vals[best], evals, iters, converged


def nelder_mead_maximize(
    fn,
    x0,
    scale: float = 0.05,
    rel_tol: float = 1e-9,
    max_iter: int = 20000,
    restarts: int = 5,
) -> SearchResult:
    """Simplex maximization with up to ``restarts`` shrinking restarts.

    Each restart reseeds the simplex at the incumbent with 0.5x the
    previous characteristic scale; the loop exits early once a converged
    run improves the value by less than rel_tol in relative terms.
    """
    if restarts < 1:
        raise InputDomainError("need at least one optimizer run")
    x = np.asarray(x0, dtype=float).copy()
    best_x, best_f = x, -np.inf
    evals = iters = 0
    converged = False
    used = 0
    for k in range(restarts):
        used = k + 1
        xk, fk, ek, ik, ck = _simplex_once(fn, best_x if k else x, scale * (0.5**k), rel_tol, max_iter)
        evals += ek
        iters += ik
        improved = fk - best_f
        if fk > best_f:
            best_x, best_f = xk, fk
        converged = converged or ck
        if ck and improved <= rel_tol * max(abs(best_f), 1e-30):
            break
    return SearchResult(best_x, best_f, evals, iters, converged, used)


def annealed_maximize(
    fn,
    x0,
    scale: float = 0.05,
    rng: np.random.Generator | None = None,
    steps_per_temp: int = 200,
    cooling: float = 0.85,
    temp_floor_ratio: float = 1e-6,
    probes: int = 50,
    rel_tol: float = 1e-9,
    max_iter: int = 20000,
) -> SearchResult:
    """Metropolis annealing with geometric cooling, then simplex refine.

    The starting temperature is the standard deviation of the objective
    over ``probes`` random perturbations of x0, so acceptance starts
    near 50% regardless of the likelihood's overall magnitude.
    """
    rng = np.random.default_rng(rng)
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    samples = []
    for _ in range(probes):
        v = fn(x + scale * rng.standard_normal(n))
        if np.isfinite(v):
            samples.append(v)
    evals = probes
    t0 = float(np.std(samples)) if len(samples) > 1 else 1.0
    if t0 <= 0.0:
        t0 = 1.0
    f_cur = fn(x)
    evals += 1
    best_x, best_f = x.copy(), f_cur
    temp = t0
    while temp > temp_floor_ratio * t0:
        for _ in range(steps_per_temp):
            prop = x + scale * (temp / t0) ** 0.5 * rng.standard_normal(n)
            f_prop = fn(prop)
            evals += 1
            delta = f_prop - f_cur
            if delta >= 0.0 or rng.random() < np.exp(delta / temp):
                x, f_cur = prop, f_prop
                if f_cur > best_f:
                    best_x, best_f = x.copy(), f_cur
        temp *= cooling
    refine = nelder_mead_maximize(fn, best_x, scale=0.01, rel_tol=rel_tol, max_iter=max_iter, restarts=2)
    evals += refine.evaluations
    if refine.value > best_f:
        best_x, best_f = refine.x, refine.value
    return SearchResult(best_x, best_f, evals, refine.iterations, refine.converged, 1)


def max_abs_gradient(fn, x, step: float = 1e-5) -> tuple[float, int]:
    """Largest central-difference derivative magnitude at x."""
    x = np.asarray(x, dtype=float)
    worst = 0.0
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        worst = max(worst, abs((fn(xp) - fn(xm)) / (2.0 * step)))
    return worst, 2 * x.size


def parabolic_polish(fn, x, value, step: float = 1e-5, gradient_tol: float = 0.0, max_sweeps: int = 12):
    """Per-coordinate Newton steps from central differences.

    Sweeps coordinates until the central-difference gradient magnitude
    drops below ``gradient_tol`` (or sweeps run out); only accepting
    moves that increase the objective keeps this strictly a refinement.
    Returns (x, value, evaluations, max_abs_gradient).
    """
    x = np.asarray(x, dtype=float).copy()
    evals = 0
    grad_max = np.inf
    for _ in range(max_sweeps):
        grad_max = 0.0
        for i in range(x.size):
            xp, xm = x.copy(), x.copy()
            xp[i] += step
            xm[i] -= step
            fp, fm = fn(xp), fn(xm)
            evals += 2
            grad = (fp - fm) / (2.0 * step)
            grad_max = max(grad_max, abs(grad))
            curv = fp + fm - 2.0 * value
            if curv < 0.0:
                delta = -grad * step * step / curv
                delta = float(np.clip(delta, -20.0 * step, 20.0 * step))
            else:
                # flat or convex slice; nudge along the gradient sign
                delta = step if grad > 0 else -step
            trial = x.copy()
            trial[i] += delta
            f_trial = fn(trial)
            evals += 1
            if f_trial > value:
                x, value = trial, f_trial
            elif fp > value:
                x, value = xp, fp
            elif fm > value:
                x, value = xm, fm
        if gradient_tol > 0.0 and grad_max <= gradient_tol:
            break
    return x, value, evals, grad_max
