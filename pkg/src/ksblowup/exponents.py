"""Model parameters, exponent algebra and the admissibility conditions.

The two conditions on ``(p, q)`` are called C1 and C2 here:

    C1:  p > max{ n/2 (m2 - m1),  n (m2 - m1 - 1),  n }
    C2:  p > max{ q (2 m2 - m1 - 3) / (q eta - q - 1),  -2 m2 + m1 + 3,
                  2 q / (q eta - q + 1),  eta (m1 - 1) / ((eta - 1)(eta - 2)) }

together with ``q > 1 / (eta - 1)``.  Both are strict inequalities and are
evaluated with exact floating comparison, so boundary values fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateExponentError,
    GNInapplicableError,
    HolderInapplicableError,
    InvalidDimensionError,
    KSError,
    QTooSmallError,
    SingularExponentError,
)

DEFAULT_ETA_LOW_DIM = 1.5


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (n * omega_n)."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True)
class DomainSpec:
    """Geometry of the spatial domain.

    ``interval`` is ``[0, length]`` (n = 1), ``ball`` is the radially symmetric
    ball of the given radius in R^dim.  ``abstract`` carries only a measure and
    a convexity flag; it can feed the bound pipeline but cannot be simulated.
    """

    geometry: str
    length: float | None = None
    radius: float | None = None
    dim: int = 1
    abstract_measure: float | None = None
    abstract_convex: bool = True

    def __post_init__(self):
        if self.geometry == "interval":
            if self.length is None or not self.length > 0:
                raise KSError("interval length must be > 0")
            if self.dim != 1:
                raise InvalidDimensionError("interval domains are one-dimensional")
        elif self.geometry == "ball":
            if self.radius is None or not self.radius > 0:
                raise KSError("ball radius must be > 0")
            if self.dim < 1:
                raise InvalidDimensionError(f"ball dimension must be >= 1, got {self.dim}")
        elif self.geometry == "abstract":
            if self.abstract_measure is None or not self.abstract_measure > 0:
                raise KSError("abstract domain measure must be > 0")
        else:
            raise KSError(f"unknown geometry {self.geometry!r}")

    @classmethod
    def interval(cls, length: float = 1.0) -> "DomainSpec":
        return cls("interval", length=float(length), dim=1)

    @classmethod
    def ball(cls, radius: float, dim: int) -> "DomainSpec":
        return cls("ball", radius=float(radius), dim=int(dim))

    @classmethod
    def ball_with_measure(cls, measure: float, dim: int) -> "DomainSpec":
        radius = (measure / unit_ball_volume(dim)) ** (1.0 / dim)
        return cls("ball", radius=radius, dim=int(dim))

    @classmethod
    def abstract(cls, measure: float, dim: int, convex: bool) -> "DomainSpec":
        return cls("abstract", dim=int(dim), abstract_measure=float(measure),
                   abstract_convex=bool(convex))

    @property
    def convex(self) -> bool:
        if self.geometry == "abstract":
            return self.abstract_convex
        return True

    @property
    def measure(self) -> float:
        if self.geometry == "interval":
            return self.length
        if self.geometry == "ball":
            return unit_ball_volume(self.dim) * self.radius ** self.dim
        return self.abstract_measure


@dataclass(frozen=True)
class ModelParams:
    n: int
    m1: float
    m2: float
    chi: float
    alpha: float
    domain: DomainSpec = field(default_factory=DomainSpec.interval)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidDimensionError(f"n must be a positive integer, got {self.n!r}")
        # chi = 0 is the purely dissipative limit used by audits and manufactured tests
        if not self.chi >= 0:
            raise KSError(f"chi must be >= 0, got {self.chi}")
        if not self.alpha > 0:
            raise KSError(f"alpha must be > 0, got {self.alpha}")
        if self.domain.dim != self.n:
            raise InvalidDimensionError(
                f"domain dimension {self.domain.dim} does not match n = {self.n}")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a strict ``p > max{...}`` condition."""

    passed: bool
    margin: float
    binding: str
    terms: dict[str, float]

    @property
    def threshold(self) -> float:
        return max(self.terms.values())


def eta_default(n: int) -> float | None:
    """``n/(n-1)`` for n >= 3; ``None`` when the caller must pick eta in (1, 2)."""
    if n <= 0:
        raise InvalidDimensionError(f"dimension must be positive, got {n}")
    if n >= 3:
        return n / (n - 1)
    return None


def resolve_eta(n: int, eta: float | None = None) -> float:
    fixed = eta_default(n)
    if fixed is not None:
        if eta is not None and eta != fixed:
            raise KSError(f"for n = {n} eta is fixed to n/(n-1) = {fixed}, got {eta}")
        return fixed
    if eta is None:
        return DEFAULT_ETA_LOW_DIM
    if not 1.0 < eta < 2.0:
        raise KSError(f"eta must lie in (1, 2), got {eta}")
    return float(eta)


def exponent_r(p: float, m1: float) -> float:
    denom = p + m1 - 1.0
    if denom == 0:
        raise DegenerateExponentError(f"p + m1 - 1 = 0 (p={p}, m1={m1})")
    return p / denom


def exponent_f(eta: float, s: float, n: int) -> float:
    """f(eta, s) = 1 + (eta - 1) / (n (1/n - eta/2 + 1/(2s))).

    A negative denominator yields f < 1; the value is returned and it is up to
    the caller (via C2) to reject it.
    """
    if not s > 0:
        raise SingularExponentError(f"s must be > 0, got {s}")
    # n (1/n - eta/2 + 1/(2s)) scaled by 2s; fewer roundings than the direct form
    denom = 2.0 * s - n * eta * s + n
    # cancellation residue counts as zero
    if abs(denom) <= 1e-14 * (2.0 * s + n * eta * s + n):
        raise SingularExponentError(f"zero denominator in f(eta={eta}, s={s}, n={n})")
    return 1.0 + 2.0 * s * (eta - 1.0) / denom


def gn_exponent_a(r: float, eta: float, n: int) -> float:
    if not r > 0:
        raise GNInapplicableError(f"r must be > 0, got {r}")
    # (1/(2r) - 1/(2r eta)) / (1/(2r) + 1/n - 1/2), numerator and denominator
    # multiplied through by 2 r n eta
    denom = n + 2.0 * r - n * r
    if not denom > 0:
        raise GNInapplicableError(f"nonpositive interpolation denominator {denom}")
    return n * (eta - 1.0) / (eta * denom)


def beta_exponents(p: float, q: float, eta: float, m1: float, m2: float) -> tuple[float, float]:
    k = p + 2.0 * m2 - m1 - 3.0
    if not k > 0:
        raise HolderInapplicableError(f"p + 2 m2 - m1 - 3 = {k} must be > 0")
    if not q * eta - 1.0 > 0 or not q * eta - q + 1.0 > 0:
        raise HolderInapplicableError(f"q eta - 1 and q eta - q + 1 must be > 0 (q={q}, eta={eta})")
    beta1 = p / k * (q * eta - 1.0) / q
    beta2 = p / 2.0 * (q * eta - q + 1.0) / q
    return beta1, beta2


def _verdict(p: float, terms: dict[str, float]) -> Verdict:
    binding = max(terms, key=terms.__getitem__)
    threshold = terms[binding]
    return Verdict(passed=bool(p > threshold), margin=p - threshold, binding=binding,
                   terms=terms)


def check_c1(p: float, n: int, m1: float, m2: float) -> Verdict:
    terms = {
        "n/2*(m2-m1)": n / 2.0 * (m2 - m1),
        "n*(m2-m1-1)": n * (m2 - m1 - 1.0),
        "n": float(n),
    }
    return _verdict(p, terms)


def check_c2(p: float, q: float, n: int, m1: float, m2: float, eta: float) -> Verdict:
    if not q > 1.0 / (eta - 1.0):
        raise QTooSmallError(f"q = {q} must exceed 1/(eta-1) = {1.0 / (eta - 1.0)}")
    terms = {
        "q(2m2-m1-3)/(q*eta-q-1)": q * (2.0 * m2 - m1 - 3.0) / (q * eta - q - 1.0),
        "-2m2+m1+3": -2.0 * m2 + m1 + 3.0,
        "2q/(q*eta-q+1)": 2.0 * q / (q * eta - q + 1.0),
        "eta(m1-1)/((eta-1)(eta-2))": eta * (m1 - 1.0) / ((eta - 1.0) * (eta - 2.0)),
    }
    return _verdict(p, terms)


@dataclass(frozen=True)
class ExponentConfig:
    p: float
    q: float
    eta: float
    r: float
    f_r: float
    f_1: float
    a: float | None
    beta1: float | None
    beta2: float | None
    n: int = 3
    c1: Verdict | None = None
    c2: Verdict | None = None
    q_ok: bool = True

    @property
    def are(self) -> float:
        """The product a * r * eta that governs the Young splitting."""
        return self.a * self.r * self.eta

    @property
    def admissible(self) -> bool:
        return bool(
            self.q_ok and self.c1 is not None and self.c1.passed
            and self.c2 is not None and self.c2.passed
            and self.a is not None and self.are < 1.0
            and self.beta1 is not None and self.beta1 > 1.0 and self.beta2 > 1.0
            and self.f_r > 1.0 and self.f_1 > 1.0
        )

    def reasons(self) -> list[str]:
        """Human-readable reasons for inadmissibility (empty when admissible)."""
        out = []
        if not self.q_ok:
            out.append(f"q = {self.q} <= 1/(eta-1) = {1.0 / (self.eta - 1.0)}")
        if self.c1 is not None and not self.c1.passed:
            out.append(f"C1 fails (binding: {self.c1.binding}, margin {self.c1.margin:.6g})")
        if self.c2 is not None and not self.c2.passed:
            out.append(f"C2 fails (binding: {self.c2.binding}, margin {self.c2.margin:.6g})")
        if self.a is None:
            out.append("Gagliardo-Nirenberg exponent a undefined")
        elif not self.are < 1.0:
            out.append(f"a*r*eta = {self.are} >= 1")
        if self.beta1 is None:
            out.append("Hoelder exponents beta1/beta2 undefined")
        elif not (self.beta1 > 1.0 and self.beta2 > 1.0):
            out.append(f"beta1 = {self.beta1}, beta2 = {self.beta2} not both > 1")
        if not (self.f_r > 1.0 and self.f_1 > 1.0):
            out.append(f"f(eta,r) = {self.f_r}, f(eta,1) = {self.f_1} not both > 1")
        return out

    def as_dict(self) -> dict[str, float | None]:
        return {
            "p": self.p, "q": self.q, "eta": self.eta, "r": self.r,
            "f_r": self.f_r, "f_1": self.f_1, "a": self.a,
            "a*r*eta": None if self.a is None else self.are,
            "beta1": self.beta1, "beta2": self.beta2,
        }


def derive_exponents(p: float, q: float, n: int, m1: float, m2: float,
                     eta: float | None = None) -> ExponentConfig:
    """Compute every derived exponent for ``(p, q)`` plus the condition verdicts.

    Failing conditions do not raise; they are recorded so the caller can report
    them.  Only genuinely undefined quantities (``p + m1 - 1 = 0``) raise.
    """
    eta = resolve_eta(n, eta)
    r = exponent_r(p, m1)
    f_r = exponent_f(eta, r, n)
    f_1 = exponent_f(eta, 1.0, n)
    try:
        a = gn_exponent_a(r, eta, n)
    except GNInapplicableError:
        a = None
    try:
        beta1, beta2 = beta_exponents(p, q, eta, m1, m2)
    except HolderInapplicableError:
        beta1 = beta2 = None
    q_ok = q > 1.0 / (eta - 1.0)
    c1 = check_c1(p, n, m1, m2)
    c2 = check_c2(p, q, n, m1, m2, eta) if q_ok else None
    return ExponentConfig(p=p, q=q, eta=eta, r=r, f_r=f_r, f_1=f_1, a=a, beta1=beta1,
                          beta2=beta2, n=n, c1=c1, c2=c2, q_ok=q_ok)


def exponents_for(params: ModelParams, p: float, q: float,
                  eta: float | None = None) -> ExponentConfig:
    return derive_exponents(p, q, params.n, params.m1, params.m2, eta)


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if not step > 0:
        raise KSError(f"grid step must be > 0, got {step}")
    if hi < lo:
        raise KSError(f"empty range [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def search_admissible(params: ModelParams, p_range: tuple[float, float],
                      q_range: tuple[float, float], step: float,
                      eta: float | None = None) -> list[ExponentConfig]:
    """Uniform grid scan for admissible ``(p, q)``, sorted by f(eta, r) ascending."""
    found = []
    for p in _grid(*p_range, step):
        if p + params.m1 - 1.0 == 0:
            continue
        for q in _grid(*q_range, step):
            cfg = exponents_for(params, p, q, eta)
            if cfg.admissible:
                found.append(cfg)
    found.sort(key=lambda c: (c.f_r, c.p, c.q))
    return found


def f_along_m1(p: float, n: int, m1_values: Iterable[float], eta: float | None = None) -> list[float]:
    """f(eta, r(m1)) for each m1 with p held fixed."""
    eta = resolve_eta(n, eta)
    return [exponent_f(eta, exponent_r(p, m1), n) for m1 in m1_values]
