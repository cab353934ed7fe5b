"""Assembly of the coefficients A, B, C, D of the growth law dPhi/dt <= G(Phi).

The chain is: Gagliardo-Nirenberg constants (c1, c2) -> C1..C6, Hoelder/Young
weights -> E1, E2, then delta and epsilon selection, then A, B, C, D.

Two ambiguities in the source derivation are carried explicitly:

* C2 appears with prefactor 2^(2 r eta) and with 2^(2 r eta - 1).  The larger
  one is used; the smaller is kept in the audit as ``c2_alt``.
* The second epsilon cap is taken as ``E2 C4 eps <= 2(q-1)/q^2 - delta``, the
  form that actually closes the gradient-of-v dissipation.  The literal variant
  ``E2 C2 eps <= 2(p-1)/q^2 - delta`` is reported as ``cap2_literal``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field

from .errors import InadmissibleConfigError, InfeasibleEpsilonError, InvalidQError, KSError
from .exponents import ExponentConfig, ModelParams

PROVENANCE = ("user-supplied", "empirically-estimated")
_LOG_TINY = math.log(sys.float_info.min)


@dataclass(frozen=True)
class GnConstants:
    c1: float
    c2: float
    provenance: str = "user-supplied"

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise KSError(f"Gagliardo-Nirenberg constants must be > 0, got c1={self.c1}, c2={self.c2}")
        if self.provenance not in PROVENANCE:
            raise KSError(f"unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class CFactors:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c2_alt: float

    def as_dict(self) -> dict[str, float]:
        return {"C1": self.c1, "C2": self.c2, "C3": self.c3, "C4": self.c4,
                "C5": self.c5, "C6": self.c6, "C2_alt(2^(2r*eta-1))": self.c2_alt}


@dataclass(frozen=True)
class EpsilonChoice:
    epsilon: float
    binding: str
    caps: dict[str, float]
    cap2_literal: float | None


@dataclass(frozen=True)
class BoundConstants:
    A: float
    B: float
    C: float
    D: float
    delta: float | None = None
    d_delta: float = 0.0
    epsilon: float | None = None
    cfactors: CFactors | None = None
    e1: float | None = None
    e2: float | None = None
    epsilon_caps: dict[str, float] = field(default_factory=dict)
    epsilon_binding: str | None = None
    cap2_literal: float | None = None
    conditional_on: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BoundConstants":
        data = dict(data)
        if data.get("cfactors") is not None:
            data["cfactors"] = CFactors(**data["cfactors"])
        data["conditional_on"] = tuple(data.get("conditional_on", ()))
        return cls(**data)


def _require_admissible(cfg: ExponentConfig) -> None:
    if cfg.a is None or not cfg.are < 1.0:
        raise InadmissibleConfigError(f"a*r*eta must be < 1 (config {cfg.as_dict()})")


def assemble_c_factors(cfg: ExponentConfig, gn: GnConstants) -> CFactors:
    _require_admissible(cfg)
    r, eta, are = cfg.r, cfg.eta, cfg.are
    g1 = gn.c1 ** (2.0 * r * eta)
    g2 = gn.c2 ** (2.0 * eta)
    return CFactors(
        c1=2.0 ** (2.0 * r * eta - 1.0) * are * g1,
        c2=2.0 ** (2.0 * r * eta) * (1.0 - are) * g1,
        c3=2.0 ** (2.0 * r * eta - 1.0) * g1,
        c4=2.0 ** (2.0 * eta - 1.0) * (eta / 2.0) * g2,
        c5=2.0 ** (2.0 * eta - 1.0) * ((2.0 - eta) / 2.0) * g2,
        c6=2.0 ** (2.0 * eta - 1.0) * g2,
        c2_alt=2.0 ** (2.0 * r * eta - 1.0) * (1.0 - are) * g1,
    )


def _conj(x: float) -> float:
    """Hoelder conjugate x' = x / (x - 1)."""
    return x / (x - 1.0)


def assemble_e_factors(cfg: ExponentConfig, params: ModelParams) -> tuple[float, float]:
    if cfg.beta1 is None or not (cfg.beta1 > 1.0 and cfg.beta2 > 1.0):
        raise InadmissibleConfigError("beta1 and beta2 must both exceed 1")
    p, q, eta, n = cfg.p, cfg.q, cfg.eta, params.n
    measure = params.domain.measure
    u_weight = params.chi ** 2 * (p - 1.0) / 2.0
    v_weight = (4.0 * (q - 1.0) + n) / 2.0
    q_eta = q * eta
    qc_eta = _conj(q) * eta
    e1 = (u_weight / _conj(q_eta) * measure ** (1.0 / _conj(cfg.beta1))
          + v_weight / _conj(qc_eta) * measure ** (1.0 / _conj(cfg.beta2)))
    e2 = u_weight / q_eta + v_weight / qc_eta
    return e1, e2


def choose_delta(q: float) -> float:
    """Midpoint of the admissible interval (0, 2(q-1)/q^2)."""
    if not q > 1.0:
        raise InvalidQError(f"q must be > 1, got {q}")
    return (q - 1.0) / q ** 2


def choose_epsilon(cfg: ExponentConfig, params: ModelParams, cfactors: CFactors,
                   e_factors: tuple[float, float], delta: float) -> EpsilonChoice:
    """Largest epsilon satisfying the three smallness requirements.

    cap1 keeps the u-dissipation nonnegative, cap2 the gradient-of-v
    dissipation, and cap3 forces the quantity R >= 1 so that R^(1/beta) <= R.
    """
    p, q, m1 = cfg.p, cfg.q, params.m1
    e1, e2 = e_factors
    are = cfg.are
    caps = {
        "cap1": ((p - 1.0) / 2.0 * (2.0 / (p + m1 - 1.0)) ** 2) / (e1 * cfactors.c1),
        "cap2": (2.0 * (q - 1.0) / q ** 2 - delta) / (e2 * cfactors.c4),
    }
    log_cap3 = (are / (1.0 - are)) * (
        math.log(cfactors.c2)
        + cfg.f_r * (p * math.log(params.alpha) + math.log(params.domain.measure)))
    if log_cap3 < _LOG_TINY:
        raise InfeasibleEpsilonError(f"cap3 = exp({log_cap3:.6g}) underflows double precision")
    caps["cap3"] = math.exp(log_cap3)
    for name, value in caps.items():
        if not value > 0:
            raise InfeasibleEpsilonError(f"{name} = {value} is not positive")
    binding = min(caps, key=caps.__getitem__)
    literal = (2.0 * (p - 1.0) / q ** 2 - delta) / (e2 * cfactors.c2)
    return EpsilonChoice(epsilon=caps[binding], binding=binding, caps=caps,
                         cap2_literal=literal)


def assemble_abcd(cfg: ExponentConfig, cfactors: CFactors, e_factors: tuple[float, float],
                  epsilon: float, delta: float, d_delta: float) -> BoundConstants:
    p, q, eta, are = cfg.p, cfg.q, cfg.eta, cfg.are
    e1, e2 = e_factors
    try:
        a_coef = p ** cfg.f_r * e1 * cfactors.c2 * epsilon ** (-(1.0 - are) / are)
        b_coef = q ** cfg.f_1 * e2 * cfactors.c5 * epsilon ** (-eta / (2.0 - eta))
    except OverflowError:
        raise InfeasibleEpsilonError(
            f"epsilon = {epsilon:.6g} makes A or B overflow double precision") from None
    c_coef = p ** eta * e1 * cfactors.c3 + q ** eta * e2 * cfactors.c6
    return BoundConstants(A=a_coef, B=b_coef, C=c_coef, D=d_delta, delta=delta,
                          d_delta=d_delta, epsilon=epsilon, cfactors=cfactors,
                          e1=e1, e2=e2)


def assemble_bound_constants(cfg: ExponentConfig, params: ModelParams, gn: GnConstants,
                             d_delta: float | None = None, delta: float | None = None,
                             epsilon: float | None = None) -> BoundConstants:
    """Run the full constants pipeline for an admissible exponent configuration.

    ``d_delta`` is required for non-convex domains and forced to 0 on convex
    ones.  ``epsilon`` overrides the automatic choice (it must not exceed the
    smallest cap).
    """
    if not cfg.admissible:
        raise InadmissibleConfigError("; ".join(cfg.reasons()) or "inadmissible exponents")
    if params.domain.convex:
        d_delta = 0.0
    elif d_delta is None:
        raise KSError("D_delta is required for non-convex domains")
    elif d_delta < 0:
        raise KSError(f"D_delta must be >= 0, got {d_delta}")
    if delta is None:
        delta = choose_delta(cfg.q)
    elif not 0.0 < delta < 2.0 * (cfg.q - 1.0) / cfg.q ** 2:
        raise KSError(f"delta = {delta} outside (0, 2(q-1)/q^2)")
    cf = assemble_c_factors(cfg, gn)
    ef = assemble_e_factors(cfg, params)
    choice = choose_epsilon(cfg, params, cf, ef, delta)
    eps = choice.epsilon
    binding = choice.binding
    if epsilon is not None:
        if not 0.0 < epsilon <= choice.epsilon:
            raise InfeasibleEpsilonError(
                f"epsilon = {epsilon} outside (0, {choice.epsilon}] allowed by {choice.binding}")
        eps, binding = float(epsilon), "user"
    bc = assemble_abcd(cfg, cf, ef, eps, delta, float(d_delta))
    # Neither supplied nor estimated GN constants are certified sharp.
    conditional = [f"c1:{gn.provenance}", f"c2:{gn.provenance}"]
    if not params.domain.convex:
        conditional.append("D_delta:user-supplied")
    return BoundConstants(**{**bc.__dict__, "epsilon_caps": dict(choice.caps),
                             "epsilon_binding": binding,
                             "cap2_literal": choice.cap2_literal,
                             "conditional_on": tuple(conditional)})
