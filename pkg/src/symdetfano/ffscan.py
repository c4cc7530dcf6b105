"""Sampling points over F_q and testing the Jacobian rank (quasismoothness).

Points on the affine cone are found by pinning all but a few coordinates to
random values and solving for the rest: one or two coordinates are swept
exhaustively over F_q and the last is solved from an equation of degree at
most two in it, using square-root and inverse tables.  Besides unrestricted
samples, strata where some odd-weight coordinates vanish are sampled on
purpose; singularities of double covers live there, and the fixed locus of
the weight-parity involution (all odd-weight coordinates zero) is exactly
where the half-points sit.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from gmpy2 import is_prime, mpq

from .errors import BadPrimeError
from .poly import Poly, Ring


def mod_q(c, q: int) -> int:
    c = mpq(c)
    den = int(c.denominator)
    if den % q == 0:
        raise BadPrimeError(f"{q} divides a coefficient denominator")
    return int(c.numerator) * pow(den, -1, q) % q


class ModPoly:
    """A polynomial reduced mod q, evaluated on batches of points with numpy."""

    __slots__ = ("q", "nvars", "exps", "coeffs")

    def __init__(self, p: Poly, q: int):
        self.q = q
        self.nvars = p.ring.ngens
        items = [(e, mod_q(c, q)) for e, c in p.terms.items()]
        items = [(e, c) for e, c in items if c]
        self.exps = [e for e, _ in items]
        self.coeffs = [c for _, c in items]

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def evaluate(self, points: np.ndarray, powers: list[list[np.ndarray]] | None = None) -> np.ndarray:
        """Values at each row of ``points`` (shape (n, nvars)), as int64 mod q."""
        q = self.q
        n = points.shape[0]
        if powers is None:
            powers = power_table(points, q, max_exponents([self]))
        out = np.zeros(n, dtype=np.int64)
        for e, c in zip(self.exps, self.coeffs):
            term = np.full(n, c, dtype=np.int64)
            for j, k in enumerate(e):
                if k:
                    term = term * powers[j][k] % q
            out = (out + term) % q
        return out

    def evaluate_int(self, point: Sequence[int]) -> int:
        q = self.q
        total = 0
        for e, c in zip(self.exps, self.coeffs):
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * pow(int(x), k, q) % q
            total = (total + term) % q
        return total


def max_exponents(polys: Sequence[ModPoly]) -> list[int]:
    nv = polys[0].nvars
    top = [0] * nv
    for p in polys:
        for e in p.exps:
            for j, k in enumerate(e):
                if k > top[j]:
                    top[j] = k
    return top


def power_table(points: np.ndarray, q: int, top: Sequence[int]) -> list[list[np.ndarray]]:
    table = []
    for j, t in enumerate(top):
        col = points[:, j] % q
        pw = [np.ones_like(col), col]
        for _ in range(2, t + 1):
            pw.append(pw[-1] * col % q)
        table.append(pw)
    return table


@dataclass
class Drop:
    point: list[int]
    rank: int
    stratum: list[str]
    verified: bool


@dataclass
class ScanReport:
    q: int
    seed: int
    ring: list[str]
    n_equations: int
    samples_requested: int
    attempts: int = 0
    points_tested: int = 0
    points_on_variety: int = 0
    drops: list[Drop] = field(default_factory=list)
    fixed_locus_drops: list[Drop] = field(default_factory=list)
    half_points: list[list[int]] = field(default_factory=list)
    strata_points: dict[str, int] = field(default_factory=dict)
    skipped_strata: list[str] = field(default_factory=list)

    weights: list[int] = field(default_factory=list)

    @property
    def quasismooth_evidence(self) -> bool:
        return not self.drops

    def drop_supports(self) -> dict[str, int]:
        """Count drops by the set of weights carried by their nonzero coordinates."""
        out: dict[str, int] = {}
        for d in self.drops:
            ws = sorted({self.weights[i] for i, x in enumerate(d.point) if x})
            key = "weights " + ",".join(map(str, ws))
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def drops_outside(self, zero_names: Sequence[str]) -> list[Drop]:
        """Drops not lying on the locus where all of ``zero_names`` vanish."""
        idx = [self.ring.index(n) for n in zero_names]
        return [d for d in self.drops if any(d.point[i] for i in idx)]

    def to_json(self) -> dict:
        d = asdict(self)
        d["quasismooth_evidence"] = self.quasismooth_evidence
        d["drop_supports"] = self.drop_supports()
        return d


class _Tables:
    def __init__(self, q: int):
        self.q = q
        xs = np.arange(q, dtype=np.int64)
        sq = xs * xs % q
        root = np.full(q, -1, dtype=np.int64)
        root[sq[::-1]] = xs[::-1]
        self.sqrt = root
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = [pow(int(x), -1, q) for x in range(1, q)]
        self.inv = inv


def _batched_rank(J: np.ndarray, q: int, inv: np.ndarray) -> np.ndarray:
    """Row-echelon rank mod q of each matrix in a stack of shape (n, m, k)."""
    J = J.copy() % q
    n, m, k = J.shape
    rank = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    for r in range(m):
        row = J[:, r, :]
        nz = row != 0
        has = nz.any(axis=1)
        piv = nz.argmax(axis=1)
        pv = row[idx, piv]
        scale = inv[pv]
        row = row * scale[:, None] % q
        row[~has] = 0
        J[:, r, :] = row
        rank += has
        for s in range(r + 1, m):
            f = J[idx, s, piv] * has
            J[:, s, :] = (J[:, s, :] - f[:, None] * row) % q
    return rank


def _rank_int(rows: list[list[int]], q: int) -> int:
    a = [r[:] for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] % q), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, q)
        a[rank] = [x * inv % q for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


@dataclass
class _Plan:
    """How to find points in one stratum: sweep ``sweep``, solve ``solve`` from ``eq``."""
    pinned: tuple[int, ...]
    sweep: tuple[int, ...]
    solve: int
    eq: int
    rest: tuple[int, ...]
    parts: list[dict[tuple[int, ...], ModPoly]]


def _split(p: Poly, free: Sequence[int], q: int) -> dict[tuple[int, ...], ModPoly]:
    ring = p.ring
    names = [ring.names[i] for i in free]
    out = {}
    for e, c in p.coefficients_in(names).items():
        mp = ModPoly(c, q)
        if mp:
            out[e] = mp
    return out


def _make_plan(eqs: list[Poly], ring: Ring, pinned: tuple[int, ...], q: int,
               rng: np.random.Generator, sweep_dims: int, cache: dict) -> _Plan | None:
    zero_sub = {ring.names[i]: 0 for i in pinned}
    reduced = cache.get(pinned)
    if reduced is None:
        reduced = cache[pinned] = [e.subs(zero_sub) if zero_sub else e for e in eqs]
    live = [i for i in range(ring.ngens) if i not in pinned]
    if not live:
        return None
    options = cache.get(("options", pinned))
    if options is None:
        options = []
        for k, e in enumerate(reduced):
            if not e:
                continue
            for i in live:
                d = e.degree_in(ring.names[i])
                if d in (1, 2):
                    lead = e.coefficients_in([ring.names[i]]).get((d,))
                    const = lead is not None and lead.is_constant()
                    options.append((0 if const else 1, k, i))
        cache[("options", pinned)] = options
    if not options:
        if any(reduced):
            return None
        # every equation vanishes on this stratum: all its points lie on the variety
        key = (pinned, "free")
        if key not in cache:
            cache[key] = _Plan(pinned, (), -1, -1, tuple(live), [])
        return cache[key]
    best = min(o[0] for o in options)
    cands = [o for o in options if o[0] == best]
    _, k, y = cands[int(rng.integers(len(cands)))]
    others = [i for i in live if i != y]
    nsweep = min(sweep_dims, len(others))
    sweep = tuple(sorted(rng.choice(others, size=nsweep, replace=False).tolist())) if nsweep else ()
    rest = tuple(i for i in others if i not in sweep)
    key = (pinned, sweep, y, k)
    plan = cache.get(key)
    if plan is None:
        free = list(sweep) + [y]
        parts = [_split(e, free, q) for e in reduced]
        plan = cache[key] = _Plan(pinned, sweep, y, k, rest, parts)
    return plan


def _eval_parts(parts: dict[tuple[int, ...], ModPoly], rest_pts: np.ndarray, q: int,
                powers) -> dict[tuple[int, ...], np.ndarray]:
    return {e: mp.evaluate(rest_pts, powers) for e, mp in parts.items()}


def _sample_batch(plan: _Plan, ring: Ring, q: int, batch: int, rng: np.random.Generator,
                  tables: _Tables) -> np.ndarray:
    """Points on the cone found in ``batch`` attempts of one plan; shape (n, nvars)."""
    nv = ring.ngens
    rest_pts = np.zeros((batch, nv), dtype=np.int64)
    for i in plan.rest:
        rest_pts[:, i] = rng.integers(0, q, size=batch)
    if plan.solve < 0:
        return rest_pts[rest_pts.any(axis=1)]
    allpolys = [mp for parts in plan.parts for mp in parts.values()]
    if not allpolys:
        return np.zeros((0, nv), dtype=np.int64)
    powers = power_table(rest_pts, q, max_exponents(allpolys))
    coeff_vals = [_eval_parts(parts, rest_pts, q, powers) for parts in plan.parts]

    # sweep grid: all tuples in F_q^len(sweep)
    g = len(plan.sweep)
    if g:
        grids = np.meshgrid(*([np.arange(q, dtype=np.int64)] * g), indexing="ij")
        sweep_vals = np.stack([x.ravel() for x in grids], axis=1)  # (G, g)
    else:
        sweep_vals = np.zeros((1, 0), dtype=np.int64)
    G = sweep_vals.shape[0]

    def grid_poly(vals: dict, ydeg: int) -> np.ndarray:
        """Sum of the parts with y-exponent ``ydeg`` on the (batch, G) grid."""
        out = np.zeros((batch, G), dtype=np.int64)
        for e, arr in vals.items():
            if e[-1] != ydeg:
                continue
            term = np.broadcast_to(arr[:, None], (batch, G)).copy()
            for t in range(g):
                if e[t]:
                    term = term * pow_vec(sweep_vals[:, t], e[t], q)[None, :] % q
            out = (out + term) % q
        return out

    cv = coeff_vals[plan.eq]
    A = grid_poly(cv, 2)
    B = grid_poly(cv, 1)
    C = grid_poly(cv, 0)
    inv = tables.inv
    roots = []
    quad = A != 0
    disc = (B * B - 4 * A * C) % q
    s = tables.sqrt[disc]
    ok = quad & (s >= 0)
    den = inv[(2 * A) % q]
    r1 = ((-B + s) % q) * den % q
    r2 = ((-B - s) % q) * den % q
    roots.append((ok, r1))
    roots.append((ok & (s != 0), r2))
    lin = (~quad) & (B != 0)
    roots.append((lin, (-C % q) * inv[B % q] % q))
    degenerate = (~quad) & (B == 0) & (C == 0)
    if degenerate.any():
        roots.append((degenerate, rng.integers(0, q, size=(batch, G))))

    found = []
    for mask, yv in roots:
        bi, gi = np.nonzero(mask)
        if bi.size == 0:
            continue
        yv = np.asarray(yv)[bi, gi] % q
        keep = np.ones(bi.size, dtype=bool)
        for k, cvals in enumerate(coeff_vals):
            if k == plan.eq:
                continue
            val = np.zeros(bi.size, dtype=np.int64)
            for e, arr in cvals.items():
                term = arr[bi]
                for t in range(g):
                    if e[t]:
                        term = term * pow_vec(sweep_vals[gi, t], e[t], q) % q
                if e[-1]:
                    term = term * pow_vec(yv, e[-1], q) % q
                val = (val + term) % q
            keep &= val == 0
        bi, gi, yv = bi[keep], gi[keep], yv[keep]
        if bi.size == 0:
            continue
        pts = rest_pts[bi].copy()
        for t, idx in enumerate(plan.sweep):
            pts[:, idx] = sweep_vals[gi, t]
        pts[:, plan.solve] = yv
        found.append(pts)
    if not found:
        return np.zeros((0, nv), dtype=np.int64)
    pts = np.concatenate(found)
    pts = pts[pts.any(axis=1)]
    return pts


def pow_vec(x: np.ndarray, k: int, q: int) -> np.ndarray:
    out = np.ones_like(x)
    for _ in range(k):
        out = out * x % q
    return out


def _on_variety(mod_eqs: list[ModPoly], pts: np.ndarray, q: int) -> np.ndarray:
    if pts.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    powers = power_table(pts, q, max_exponents(mod_eqs))
    mask = np.ones(pts.shape[0], dtype=bool)
    for e in mod_eqs:
        mask &= e.evaluate(pts, powers) == 0
    return mask


def normalize_projective(point: Sequence[int], weights: Sequence[int], q: int) -> tuple[int, ...]:
    """Divide by the first nonzero coordinate when all nonzero coordinates share one weight."""
    nz = [i for i, x in enumerate(point) if x]
    if not nz or len({weights[i] for i in nz}) != 1:
        return tuple(int(x) for x in point)
    inv = pow(int(point[nz[0]]), -1, q)
    return tuple(int(x) * inv % q for x in point)


def quasismooth_scan(equations: Sequence[Poly], ring: Ring, q: int, n_samples: int, seed: int = 0,
                     batch_attempts: int | None = None, sweep_dims: int | None = None,
                     max_attempts: int | None = None, points_per_batch: int | None = None) -> ScanReport:
    """Sample points of the affine cone over F_q and report Jacobian rank drops.

    A drop is a point (not the origin) where the Jacobian of the equations has
    rank below the number of equations.  Drops on the fixed locus of the
    weight-parity involution are reported separately, as are the fixed-locus
    points themselves (the half-points).  Every drop is re-checked by plain
    integer arithmetic before it is reported.
    """
    if not is_prime(q) or q <= 3:
        raise BadPrimeError(f"q = {q} must be a prime greater than 3")
    eqs = [e for e in equations if e]
    for e in eqs:
        if e.ring != ring:
            raise ValueError("equations must live in the given ring")
    mod_eqs = [ModPoly(e, q) for e in eqs]
    grads = [[ModPoly(e.diff(n), q) for n in ring.names] for e in eqs]
    m, nv = len(eqs), ring.ngens
    if sweep_dims is None:
        sweep_dims = 2 if q <= 1000 else 1
    if batch_attempts is None:
        batch_attempts = 64 if sweep_dims == 1 else 4
    tables = _Tables(q)
    odd = tuple(i for i, w in enumerate(ring.weights) if w % 2)
    strata = [()] + [c for r in range(1, len(odd) + 1) for c in itertools.combinations(odd, r)]
    # whole weight classes set to zero, e.g. all weight-2 coordinates at once
    classes = [tuple(i for i, w in enumerate(ring.weights) if w == wt) for wt in sorted(set(ring.weights))]
    for r in range(1, len(classes)):
        for combo in itertools.combinations(classes, r):
            pinned = tuple(sorted(i for c in combo for i in c))
            if pinned not in strata:
                strata.append(pinned)
    report = ScanReport(q, seed, list(ring.names), m, n_samples, weights=list(ring.weights))
    plans: dict = {}
    max_attempts = max_attempts or 200 * max(n_samples, 1)
    batch_index = 0
    seen_half: set[tuple[int, ...]] = set()
    all_grad = [g for row in grads for g in row]
    top = max_exponents(all_grad) if all_grad else [0] * nv

    special = strata[1:]
    min_batches = 2 * len(special)
    while ((report.points_on_variety < n_samples or batch_index < min_batches)
           and report.attempts < max_attempts):
        rng = np.random.default_rng([seed, batch_index])
        # even batches are unrestricted; odd batches cycle through the strata
        if batch_index % 2 == 0 or not special:
            stratum = ()
        else:
            stratum = special[(batch_index // 2) % len(special)]
        batch_index += 1
        plan = _make_plan(eqs, ring, stratum, q, rng, sweep_dims, plans)
        label = ",".join(ring.names[i] for i in stratum) or "generic"
        if plan is None:
            if label not in report.skipped_strata:
                report.skipped_strata.append(label)
            report.attempts += batch_attempts
            continue
        pts = _sample_batch(plan, ring, q, batch_attempts, rng, tables)
        report.attempts += batch_attempts
        report.points_tested += int(pts.shape[0])
        mask = _on_variety(mod_eqs, pts, q)
        pts = pts[mask]
        if pts.shape[0] == 0:
            continue
        if points_per_batch is not None and pts.shape[0] > points_per_batch:
            pts = pts[np.sort(rng.choice(pts.shape[0], size=points_per_batch, replace=False))]
        report.points_on_variety += int(pts.shape[0])
        report.strata_points[label] = report.strata_points.get(label, 0) + int(pts.shape[0])

        powers = power_table(pts, q, top)
        J = np.stack([np.stack([g.evaluate(pts, powers) for g in row], axis=1) for row in grads], axis=1)
        ranks = _batched_rank(J, q, tables.inv)
        fixed = ~pts[:, list(odd)].any(axis=1) if odd else np.zeros(pts.shape[0], dtype=bool)
        for p in pts[fixed]:
            hp = normalize_projective(p.tolist(), ring.weights, q)
            if hp not in seen_half:
                seen_half.add(hp)
                report.half_points.append(list(hp))
        for idx in np.nonzero(ranks < m)[0]:
            p = [int(x) for x in pts[idx]]
            verified = _verify_drop(mod_eqs, grads, p, q, m)
            d = Drop(p, int(ranks[idx]), [ring.names[i] for i in stratum], verified)
            if not verified:
                continue
            (report.fixed_locus_drops if fixed[idx] else report.drops).append(d)
    report.half_points.sort()
    return report


def _verify_drop(mod_eqs, grads, p: list[int], q: int, m: int) -> bool:
    if not any(p):
        return False
    if any(e.evaluate_int(p) for e in mod_eqs):
        return False
    rows = [[g.evaluate_int(p) for g in row] for row in grads]
    return _rank_int(rows, q) < m


def plane_points(F: Poly, G: Poly, q: int) -> list[tuple[int, int, int]]:
    """All points of P^2(F_q) where F and G vanish (exhaustive; for small q)."""
    fm, gm = ModPoly(F, q), ModPoly(G, q)
    out = []
    xs = np.arange(q, dtype=np.int64)
    a, b = np.meshgrid(xs, xs, indexing="ij")
    charts = [
        np.stack([a.ravel(), b.ravel(), np.ones(q * q, dtype=np.int64)], axis=1),
        np.stack([xs, np.ones(q, dtype=np.int64), np.zeros(q, dtype=np.int64)], axis=1),
        np.array([[1, 0, 0]], dtype=np.int64),
    ]
    for pts in charts:
        mask = (fm.evaluate(pts) == 0) & (gm.evaluate(pts) == 0)
        out.extend(tuple(int(x) for x in p) for p in pts[mask])
    return sorted(out)


def projective_points(polys: Sequence[Poly], q: int, chunk: int = 1 << 18) -> list[tuple[int, ...]]:
    """All points of P^(n-1)(F_q) where every form in ``polys`` vanishes.

    Exhaustive over the standard charts (first nonzero coordinate 1), so only
    sensible for small q and few variables.  The ring must have one weight.
    """
    if not polys:
        raise ValueError("need at least one form")
    ring = polys[0].ring
    if len(set(ring.weights)) != 1:
        raise ValueError("exhaustive point counts need a standard-graded ring")
    if not is_prime(q):
        raise BadPrimeError(f"q = {q} is not prime")
    mods = [m for m in (ModPoly(p, q) for p in polys) if m]
    n = ring.ngens
    top = max_exponents(mods) if mods else [0] * n
    out: list[tuple[int, ...]] = []
    for lead in range(n):
        free = n - lead - 1
        total = q ** free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
            pts = np.zeros((idx.size, n), dtype=np.int64)
            pts[:, lead] = 1
            for j in range(n - 1, lead, -1):
                pts[:, j] = idx % q
                idx = idx // q
            powers = power_table(pts, q, top)
            mask = np.ones(pts.shape[0], dtype=bool)
            for m in mods:
                mask &= m.evaluate(pts, powers) == 0
            out.extend(tuple(int(x) for x in p) for p in pts[mask])
    return sorted(out)
