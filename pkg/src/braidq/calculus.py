"""Braided derivatives, q^2-integrals and their realizations in commuting variables.

The algebraic part works on truncated normal-form series.  The numeric part
(global integrals, lattice-order integrals, probing) works on factored
products of one-variable functions, see `factored`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import mpmath

from .qalgebra import COVECTOR, VECTOR, CommutingSeries, NCSeries, lower_sum
from .scalars import QScalar, as_scalar, current_q, current_tol, q_number


class DivergenceError(ArithmeticError):
    """A lattice sum failed to converge; `witness` records where it grew."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


def _q(k):
    return QScalar.q_power(k)


# --------------------------------------------------------------------------
# derivatives and indefinite integrals


def partial_left(f: NCSeries, j: int) -> NCSeries:
    """d_j x^E = [e_j]_{q^2} q^{E_j} x^{E - delta_j}."""
    if f.kind != COVECTOR:
        raise ValueError("partial_left acts on covector series")
    if not 1 <= j <= f.n:
        raise ValueError(f"index {j} out of range")
    q2 = _q(2)
    terms = {}
    for E, c in f.terms.items():
        e = E[j - 1]
        if e == 0:
            continue
        F = list(E)
        F[j - 1] -= 1
        terms[tuple(F)] = c * q_number(e, q2) * _q(lower_sum(E, j))
    return f._like(terms)


def partial_right(g: NCSeries, i: int) -> NCSeries:
    """(dn^en ... d1^e1) <- D_i = [e_i]_{q^2} q^{E_i} (monomial with e_i lowered)."""
    if g.kind != VECTOR:
        raise ValueError("partial_right acts on vector series")
    if not 1 <= i <= g.n:
        raise ValueError(f"index {i} out of range")
    q2 = _q(2)
    terms = {}
    for E, c in g.terms.items():
        e = E[i - 1]
        if e == 0:
            continue
        F = list(E)
        F[i - 1] -= 1
        terms[tuple(F)] = c * q_number(e, q2) * _q(lower_sum(E, i))
    return g._like(terms)


def indefinite_integral(f: NCSeries, i: int, bound_scale=1) -> NCSeries:
    """Integral from 0 to a*x_i: x^E -> a^(e_i+1) q^(-E_i) x^(E+delta_i) / [e_i+1]_{q^2}.

    The degree grows by one; terms pushed past N are dropped and flagged.
    """
    if f.kind != COVECTOR:
        raise ValueError("indefinite_integral acts on covector series")
    a = as_scalar(bound_scale)
    if a.is_zero():
        raise ValueError("bound scale must be nonzero")
    q2 = _q(2)
    terms = {}
    lost = f.truncated
    for E, c in f.terms.items():
        e = E[i - 1]
        F = list(E)
        F[i - 1] += 1
        if sum(F) > f.N:
            lost = True
            continue
        terms[tuple(F)] = c * a ** (e + 1) * _q(-lower_sum(E, i)) / q_number(e + 1, q2)
    return NCSeries(f.kind, f.n, f.N, terms, lost)


# --------------------------------------------------------------------------
# realization in commuting variables


def realize(f: NCSeries, side: str = "left") -> CommutingSeries:
    """f |> 1 (left, covector) or 1 <| g (right, vector): relabel normal-form monomials."""
    want = COVECTOR if side == "left" else VECTOR
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    if f.kind != want:
        raise ValueError(f"{side} realization needs a {want} series")
    return CommutingSeries(f.n, f.N, dict(f.terms), f.truncated)


def act_left(f: NCSeries, F: CommutingSeries) -> CommutingSeries:
    """x^E |> z^H = q^(sum_i e_i H_i) z^(H+E)."""
    if f.kind != COVECTOR:
        raise ValueError("the left action uses covector series")
    N = min(f.N, F.N)
    out: dict = {}
    for E, a in f.terms.items():
        for H, b in F.terms.items():
            if sum(E) + sum(H) > N:
                continue
            w = sum(E[i] * lower_sum(H, i + 1) for i in range(f.n))
            K = tuple(x + y for x, y in zip(E, H))
            v = a * b * _q(w)
            out[K] = out[K] + v if K in out else v
    return CommutingSeries(f.n, N, {K: v for K, v in out.items() if not v.is_zero()})


def act_right(F: CommutingSeries, g: NCSeries) -> CommutingSeries:
    """z^K <| d^E = q^(sum_j K_j e_j) z^(K+E)."""
    if g.kind != VECTOR:
        raise ValueError("the right action uses vector series")
    N = min(g.N, F.N)
    out: dict = {}
    for K, a in F.terms.items():
        for E, b in g.terms.items():
            if sum(E) + sum(K) > N:
                continue
            w = sum(lower_sum(K, j + 1) * E[j] for j in range(g.n))
            M = tuple(x + y for x, y in zip(E, K))
            v = a * b * _q(w)
            out[M] = out[M] + v if M in out else v
    return CommutingSeries(g.n, N, {K: v for K, v in out.items() if not v.is_zero()})


@dataclass
class PointEvaluation:
    value: object
    converged: bool
    partial_sums: list = field(default_factory=list)

    def to_json(self):
        return {"value": str(self.value), "converged": self.converged,
                "partialSums": [mpmath.nstr(s, 12) for s in self.partial_sums]}


def eval_commuting(F: CommutingSeries, point, tol=None, window: int = 5) -> PointEvaluation:
    """Sum a truncated commuting series degree by degree at a numeric point.

    Converged means the last `window` partial sums agree to relative tol.
    """
    tol = current_tol() if tol is None else mpmath.mpf(tol)
    point = [mpmath.mpmathify(p) for p in point]
    by_degree: dict = {}
    for E, c in F.terms.items():
        t = c.evaluate()
        for z, e in zip(point, E):
            t *= z ** e
        by_degree[sum(E)] = by_degree.get(sum(E), 0) + t
    partial, s = [], mpmath.mpc(0)
    for d in range(F.N + 1):
        s += by_degree.get(d, 0)
        partial.append(s)
    tail = partial[-window:]
    scale = max(abs(tail[-1]), mpmath.mpf(10) ** -30)
    converged = len(partial) >= window and all(abs(x - tail[-1]) <= tol * scale for x in tail)
    return PointEvaluation(partial[-1] if partial else mpmath.mpc(0), converged, partial)


# --------------------------------------------------------------------------
# one-variable Jackson sums


@dataclass
class JacksonResult:
    value: object
    k_plus: int
    k_minus: int
    tail_ratios: list
    gamma: object

    def __complex__(self):
        return complex(self.value)


def _growth_witness(mags):
    """Five strictly growing terms whose growth ratios do not shrink."""
    if len(mags) < 6:
        return False
    w = mags[-6:]
    if not all(w[i + 1] > w[i] > 0 for i in range(5)):
        return False
    ratios = [w[i + 1] / w[i] for i in range(5)]
    return all(ratios[i + 1] >= ratios[i] * (1 - mpmath.mpf(10) ** -6) for i in range(4))


_JACKSON_CACHE: dict = {}


def _cached_jackson(phi, gamma, tol):
    """jackson_1d memoized on one-variable factors (transforms reuse the same moments)."""
    key = (phi.key(), gamma, tol, current_q(), mpmath.mp.prec)
    hit = _JACKSON_CACHE.get(key)
    if hit is None:
        if len(_JACKSON_CACHE) > 20000:
            _JACKSON_CACHE.clear()
        hit = _JACKSON_CACHE[key] = jackson_1d(phi, gamma, tol)
    return hit


def jackson_1d(h, gamma, tol=None, step=None, max_k: int = 3000) -> JacksonResult:
    """Bilateral sum (1-p) sum_k p^k gamma [h(p^k gamma) + h(-p^k gamma)], p = q^2 by default.

    Each direction stops after 5 consecutive terms below tol * (running max).
    Monotone growth with non-shrinking ratio after |k| > 8 raises DivergenceError.
    """
    gamma = mpmath.mpmathify(gamma.evaluate() if isinstance(gamma, QScalar) else gamma)
    if gamma == 0:
        raise ValueError("jackson_1d needs gamma != 0")
    tol = current_tol() if tol is None else mpmath.mpf(tol)
    p = current_q() ** 2 if step is None else mpmath.mpmathify(step)
    total = mpmath.mpf(0)
    runmax = mpmath.mpf(0)
    reach = {}
    ratios = []
    for direction in (1, -1):
        k = 0 if direction > 0 else -1
        quiet = 0
        seen = False
        mags = []
        while True:
            t = p ** k * gamma
            term = (1 - p) * t * (h(t) + h(-t))
            total += term
            mag = abs(term)
            runmax = max(runmax, mag)
            mags.append(mag)
            if abs(k) > 8 and _growth_witness(mags):
                raise DivergenceError(
                    f"Jackson sum grows in direction {'+' if direction > 0 else '-'}",
                    {"direction": direction, "k": k, "gamma": mpmath.nstr(gamma, 15),
                     "terms": [mpmath.nstr(m, 8) for m in mags[-6:]]})
            if mag:
                seen = True
            # big q-exponentials vanish on whole stretches of the lattice away
            # from 0, so toward 0 an exact zero only counts once values appeared
            if mag <= tol * runmax and (mag or direction < 0 or seen or k > 60):
                quiet += 1
            else:
                quiet = 0
            if quiet >= 5:
                break
            k += direction
            if abs(k) > max_k:
                raise DivergenceError("Jackson sum did not settle", {"direction": direction, "k": k})
        reach[direction] = k
        if len(mags) >= 2 and mags[-2] != 0:
            ratios.append(mags[-1] / mags[-2])
        else:
            ratios.append(mpmath.mpf(0))
    return JacksonResult(total, reach[1], reach[-1], ratios, gamma)


# --------------------------------------------------------------------------
# integrals of factored analytic series


@dataclass
class StageRecord:
    variable: int
    lattice_point: object
    value: object
    shifts: dict  # remaining variable -> argument scale applied after this stage


@dataclass
class OrderIntegralResult:
    value: object
    stages: list = field(default_factory=list)

    def __complex__(self):
        return complex(self.value)


def _as_analytic(f):
    from .factored import AnalyticSeries
    if isinstance(f, AnalyticSeries):
        return f
    if isinstance(f, NCSeries):
        return AnalyticSeries.from_ncseries(f)
    raise TypeError(f"cannot integrate a {type(f).__name__}")


def _stagewise(rt, order, bounds, even, scale_lower, log, stats=None, tol=None):
    from .factored import OneVar, _scaled_term

    if not order:
        return rt.coeff
    v = order[0]
    rest = order[1:]
    phi = rt.factors.get(v, OneVar.monomial(0))
    q = current_q()
    partners = rt.partners(v)
    base = {}
    if scale_lower:
        for u in rest:
            if u < v:
                base[u] = 1 / q
    for p in partners:
        base[p] = base.get(p, 1) / q
    if even or not partners:
        if phi.is_zero():
            return mpmath.mpf(0)
        res = _cached_jackson(phi, bounds[v], tol)
        if stats is not None:
            stats.append(res)
        J = res.value
        if log is not None:
            log.append(StageRecord(v, bounds[v], J, dict(base)))
        if J == 0:
            return mpmath.mpf(0)
        return J * _stagewise(_scaled_term(rt, v, base), rest, bounds, even, scale_lower, None, stats, tol)
    total = mpmath.mpf(0)
    for pars in _parity_choices(len(partners)):
        factors = dict(rt.factors)
        dead = False
        for p, par in zip(partners, pars):
            part = factors.get(p, OneVar.monomial(0)).parity_part(par)
            if part.is_zero():
                dead = True
                break
            factors[p] = part
        if dead:
            continue
        from .factored import RealizedTerm
        sub = RealizedTerm(rt.coeff, factors, rt.couplings)
        shift = sum(pars) % 2
        res = _cached_jackson(phi, bounds[v] * q ** shift, tol)
        if stats is not None:
            stats.append(res)
        J = res.value
        if J == 0:
            continue
        total += J * _stagewise(_scaled_term(sub, v, base), rest, bounds, even, scale_lower, None, stats, tol)
    return total


def _parity_choices(m):
    from itertools import product
    return list(product((0, 1), repeat=m))


def _integrate_terms(f, order, bounds, even, scale_lower, keep_log=False, stats=None):
    from .factored import RealizedTerm

    total = mpmath.mpf(0)
    log = [] if keep_log else None
    for rt in f.realize():
        if even:
            factors = {}
            dead = False
            for v, phi in rt.factors.items():
                part = phi.parity_part(0)
                if part.is_zero():
                    dead = True
                    break
                factors[v] = part
            if dead:
                continue
            rt = RealizedTerm(rt.coeff, factors, rt.couplings)
        total += _stagewise(rt, order, bounds, even, scale_lower,
                            log if log is not None and not log else None, stats)
    return OrderIntegralResult(total, log or [])


def _gamma_vector(gamma, n):
    g = [mpmath.mpmathify(x.evaluate() if isinstance(x, QScalar) else x) for x in gamma]
    if len(g) != n:
        raise ValueError(f"need {n} lattice points, got {len(g)}")
    if any(x == 0 for x in g):
        raise ValueError("lattice points must be nonzero")
    return g


def global_integral(f, gamma, variant: str = "I'", check: bool = True, bound_scales=None):
    """Realized global integral: iterated Jackson sums with bound q^(n-j) gamma_j on z_j.

    variant I integrates f itself, I' (also spelled Ip) its even part.  Coupled
    terms are summed stage by stage; with check=True the lattice is probed for
    absolute summability first and a growth witness raises DivergenceError.
    """
    f = _as_analytic(f)
    if f.kind != COVECTOR:
        raise ValueError("global_integral integrates covector series")
    return _global(f, gamma, variant, check, bound_scales)


def right_global_integral(g, gamma, variant: str = "J'", check: bool = True, bound_scales=None):
    """Mirror of global_integral for vector series, realized by 1 <| g."""
    g = _as_analytic(g)
    if g.kind != VECTOR:
        raise ValueError("right_global_integral integrates vector series")
    return _global(g, gamma, variant.replace("J", "I"), check, bound_scales)


def _global(f, gamma, variant, check, bound_scales):
    variant = variant.replace("p", "'")
    if variant not in ("I", "I'"):
        raise ValueError(f"unknown integral variant {variant!r}")
    n = f.n
    q = current_q()
    g = _gamma_vector(gamma, n)
    scales = [1] * n if bound_scales is None else [mpmath.mpmathify(
        a.evaluate() if isinstance(a, QScalar) else a) for a in bound_scales]
    bounds = {j: q ** (n - j) * g[j - 1] * scales[j - 1] for j in range(1, n + 1)}
    even = variant == "I'"
    target = f.even_part() if even else f
    if check and any(rt.is_coupled() for rt in target.realize()):
        witness = lattice_growth_witness(target, [bounds[j] for j in range(1, n + 1)])
        if witness:
            raise DivergenceError("realized series is not summable on this lattice", witness)
    return _integrate_terms(target, list(range(1, n + 1)), bounds, even, False).value


def lattice_order_integral(f, sigma, gamma, side: str = "left", keep_stages: bool = False):
    """I''_(sigma, gamma) f (left, covector) or J''_(sigma, gamma) g (right, vector).

    Variables are integrated in the order sigma(1), sigma(2), ...; before each
    one-variable Jackson sum the series is projected on its even part and the
    remaining lower-index variables are rescaled by q^-1.
    """
    f = _as_analytic(f)
    want = COVECTOR if side == "left" else VECTOR
    if f.kind != want:
        raise ValueError(f"{side} lattice-order integral needs a {want} series")
    sigma = _check_perm(sigma, f.n)
    g = _gamma_vector(gamma, f.n)
    bounds = {j: g[j - 1] for j in range(1, f.n + 1)}
    res = _integrate_terms(f, list(sigma), bounds, True, True, keep_log=keep_stages)
    return res if keep_stages else res.value


def commuting_order_integral(F, sigma, gamma):
    """Order integral of a commuting-variable function, integrating z_sigma(1) first.

    F is an AnalyticSeries (its realization is used), a list of realized terms,
    or a CommutingSeries (a polynomial: only the zero series is integrable).
    """
    from .factored import AnalyticSeries

    if isinstance(F, CommutingSeries):
        if not F.terms:
            return mpmath.mpf(0)
        raise DivergenceError("a nonzero polynomial is not Jackson integrable", {})
    n = F.n if isinstance(F, AnalyticSeries) else max(max(rt.factors) for rt in F)
    terms = F.realize() if isinstance(F, AnalyticSeries) else list(F)
    sigma = _check_perm(sigma, n)
    g = _gamma_vector(gamma, n)
    bounds = {j: g[j - 1] for j in range(1, n + 1)}
    total = mpmath.mpf(0)
    for rt in terms:
        total += _stagewise(rt, list(sigma), bounds, False, False, None)
    return total


def _check_perm(sigma, n):
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def permutation_length(sigma) -> int:
    return sum(1 for i in range(len(sigma)) for j in range(i + 1, len(sigma)) if sigma[i] > sigma[j])


def order_shift_gamma(sigma, gamma):
    """gamma~ with gamma~_sigma(l) = q^#{j<l : sigma(l) < sigma(j)} gamma_sigma(l)."""
    q = current_q()
    out = [mpmath.mpmathify(x) for x in gamma]
    for l, s in enumerate(sigma):
        c = sum(1 for j in range(l) if s < sigma[j])
        out[s - 1] = q ** c * out[s - 1]
    return out


# --------------------------------------------------------------------------
# integrability probing


def _ray_directions(n):
    from itertools import product
    return [d for d in product((-1, 0, 1), repeat=n) if any(d)]


def lattice_growth_witness(f, bounds, steps: int = 14):
    """Scan the Jackson-weighted realized terms along lattice rays.

    The point of step t on ray d with signs s is s_j q^(2 t d_j) b_j.  Returns a
    witness dict for the first ray whose terms grow monotonically past |k| = 8
    with non-shrinking ratio, else None.
    """
    from itertools import product

    from .factored import evaluate_realized_term

    n = f.n
    q = current_q()
    p = q * q
    tol = current_tol()
    terms = f.realize()
    for d in _ray_directions(n):
        for signs in product((1, -1), repeat=n):
            mags, pts = [], []
            runmax = mpmath.mpf(0)
            quiet = 0
            for t in range(steps + 1):
                z = [s * p ** (t * dj) * b for s, dj, b in zip(signs, d, bounds)]
                w = 1
                for zj in z:
                    w *= (1 - p) * abs(zj)
                try:
                    val = sum((evaluate_realized_term(rt, z) for rt in terms), mpmath.mpf(0))
                except DivergenceError:
                    break
                mag = abs(val) * w
                mags.append(mag)
                pts.append(z)
                runmax = max(runmax, mag)
                if t > 8 and _growth_witness(mags):
                    return {"direction": list(d), "signs": list(signs),
                            "points": [[mpmath.nstr(x, 12) for x in zz] for zz in pts],
                            "magnitudes": [mpmath.nstr(m, 10) for m in mags],
                            "ratios": [mpmath.nstr(mags[i + 1] / mags[i], 8) if mags[i] else "inf"
                                       for i in range(len(mags) - 1)]}
                quiet = quiet + 1 if mag <= tol * runmax else 0
                if quiet >= 5:
                    break
    return None


@dataclass
class IntegrabilityReport:
    verdict: str
    gamma: list
    sigma: object = None
    tail_ratios: list = field(default_factory=list)
    k_plus: int = 0
    k_minus: int = 0
    witness: dict = field(default_factory=dict)
    lattice_order: dict = field(default_factory=dict)
    value: object = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict,
               "lattice": {"gamma": [mpmath.nstr(g, 15) for g in self.gamma],
                           "sigma": None if self.sigma is None else list(self.sigma)},
               "tailRatios": [mpmath.nstr(r, 6) for r in self.tail_ratios],
               "truncation": {"kPlus": self.k_plus, "kMinus": self.k_minus}}
        if self.witness:
            out["witness"] = self.witness
        if self.lattice_order:
            out["latticeOrder"] = {",".join(map(str, s)): ok for s, ok in self.lattice_order.items()}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


INTEGRABLE = "integrable"
NOT_LATTICE_INTEGRABLE = "not lattice integrable"
LATTICE_ORDER_ONLY = "lattice-order integrable"
UNKNOWN = "unknown"


def integrability_probe(f, gamma, max_order_dim: int = 4) -> IntegrabilityReport:
    """Numerical test of absolute summability of the realized f on the lattice of gamma.

    The lattice uses the global-integral bounds q^(n-j) gamma_j.  When a growth
    witness is found the verdict is "not lattice integrable" and, for n <= 4,
    every integration order sigma is tried with the lattice-order integral
    (recorded in `lattice_order`; the sigma field names the first order that works).
    """
    from itertools import permutations

    f = _as_analytic(f)
    n = f.n
    q = current_q()
    g = _gamma_vector(gamma, n)
    bounds = [q ** (n - j) * g[j - 1] for j in range(1, n + 1)]
    witness = lattice_growth_witness(f, bounds)
    if witness is None:
        stats = []
        try:
            res = _integrate_terms(f, list(range(1, n + 1)), dict(enumerate(bounds, 1)),
                                   False, False, stats=stats)
        except DivergenceError as exc:
            return IntegrabilityReport(UNKNOWN, g, witness=dict(exc.witness))
        ratios = [r for s in stats for r in s.tail_ratios]
        return IntegrabilityReport(INTEGRABLE, g, None, ratios[:2 * n],
                                   max((s.k_plus for s in stats), default=0),
                                   min((s.k_minus for s in stats), default=0), value=res.value)
    report = IntegrabilityReport(NOT_LATTICE_INTEGRABLE, g, witness=witness)
    if f.kind == COVECTOR and n <= max_order_dim:
        for sigma in permutations(range(1, n + 1)):
            try:
                lattice_order_integral(f, sigma, g)
                report.lattice_order[sigma] = True
                if report.sigma is None:
                    report.sigma = sigma
            except DivergenceError:
                report.lattice_order[sigma] = False
    return report


class RealizedSeries:
    """A sum of separable realized terms, accepted by the global integral."""

    def __init__(self, kind, n, terms):
        self.kind = kind
        self.n = n
        self.terms = list(terms)

    def realize(self):
        return list(self.terms)

    def even_part(self):
        # per-factor parity projection in the integrator is exact for separable terms
        return self


def realized_partial(f, J) -> RealizedSeries:
    """Realization of d^J f = d_n^(j_n) ... d_1^(j_1) f for a covector series.

    On realized functions d_i acts as D_{q^2} in z_i followed by z_k -> q z_k
    for every k < i.  Only separable (uncoupled) terms without big-exponential
    factors are supported.
    """
    from .factored import OneVar, RealizedTerm

    if isinstance(f, RealizedSeries):
        terms, kind, n = f.terms, f.kind, f.n
    else:
        f = _as_analytic(f)
        terms, kind, n = f.realize(), f.kind, f.n
    if kind != COVECTOR:
        raise ValueError("realized_partial acts on covector series")
    if any(rt.is_coupled() for rt in terms):
        raise NotImplementedError("realized derivative of coupled terms")
    q = current_q()
    for i, times in enumerate(J, start=1):
        for _ in range(times):
            out = []
            for rt in terms:
                factors = {}
                for v in range(1, n + 1):
                    phi = rt.factors.get(v, OneVar.monomial(0))
                    if v == i:
                        phi = phi.derivative()
                    elif v < i:
                        phi = phi.scaled(q)
                    factors[v] = phi
                if all(not phi.is_zero() for phi in factors.values()):
                    out.append(RealizedTerm(rt.coeff, factors, frozenset()))
            terms = out
    return RealizedSeries(kind, n, terms)


def derivative_integral(f, J, gamma, variant: str = "I'"):
    """Global integral of d^J f, computed on the realized derivative."""
    return _global(realized_partial(f, J), gamma, variant, False, None)


def suitable_lattice(f, sigma, gamma=None):
    """First lattice q^p * gamma, p in {0,1}^n, on which the lattice-order integral converges.

    Big-exponential factors are only summable on lattices that hit their zeros;
    after the stagewise rescaling by q^-1 that depends on sigma.  Returns
    (lattice, value) or raises DivergenceError when no such lattice exists.
    """
    from itertools import product

    f = _as_analytic(f)
    n = f.n
    q = current_q()
    base = [1] * n if gamma is None else _gamma_vector(gamma, n)
    last = None
    for p in product((0, 1), repeat=n):
        lat = [q ** e * b for e, b in zip(p, base)]
        try:
            return lat, lattice_order_integral(f, sigma, lat)
        except DivergenceError as exc:
            last = exc
    raise DivergenceError("no lattice q^p gamma with p in {0,1}^n works for this order",
                          getattr(last, "witness", {}))
