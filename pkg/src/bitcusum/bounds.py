"""False-alarm guarantees for the pooled-bit detector statistic.

Everything here is a closed-form function of the bit-zero probability
q = F(tau - theta). Write eps1 = (1-q)/2 and eps2 = q/2. The centered
bit variable X = q - 1{bit=0} has moment generating function

    phi_X(c) = q * exp(c (q - 1)) + (1 - q) * exp(c q),

and the two large-deviation rates that control how fast the pooled bit
fraction concentrates are the Legendre values

    upsilon1 = sup_c {eps2 * c - ln phi_X(c)}
             = (1 - q/2) ln((2 - q)/(1 - q)) - ln 2,
    upsilon2 = sup_c {eps1 * c - ln phi_X(-c)}
             = (1/2)(1 + q) ln((1 + q)/q) - ln 2,

with upsilon_star their minimum and eps_star = min{q, 1-q}/2.

Two consequences are packaged as a certificate:

  * the stopping time of the pooled detector exceeds
    -h / (N ln eps_star) - M with probability at least
    1 - 2 exp(-upsilon_star * M * N), which requires
    M * N > ln 2 / upsilon_star to say anything at all;
  * a mean time between false alarms of at least kappa is guaranteed by
    any threshold h >= N (kappa / (1 - 2 exp(-upsilon_star M N)) + M)
    * ln(1 / eps_star).

Exponentials are taken through math.exp on the log scale; at the M*N
values of interest the exponent is far below the underflow point and the
term is exactly zero in double precision, which only tightens h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleMN

LN2 = math.log(2.0)

MODE_BENCHMARK = "benchmark"
MODE_DEPLOYMENT = "deployment"


def _check_q(q: float) -> float:
    if not 0.0 < q < 1.0:
        raise DomainError(f"bit-zero probability must lie in (0, 1), got {q}")
    return float(q)


def bit_mgf(q: float, c: float) -> float:
    """MGF of the centered bit-zero indicator, phi_X(c)."""
    _check_q(q)
    return q * math.exp(c * (q - 1.0)) + (1.0 - q) * math.exp(c * q)


def epsilons(q: float) -> tuple[float, float, float]:
    """(eps1, eps2, eps_star) = ((1-q)/2, q/2, min{q, 1-q}/2)."""
    _check_q(q)
    return (1.0 - q) / 2.0, q / 2.0, 0.5 * min(q, 1.0 - q)


def rate_functions(q: float) -> tuple[float, float]:
    """Closed-form (upsilon1, upsilon2); both positive on (0, 1)."""
    _check_q(q)
    u1 = (1.0 - q / 2.0) * math.log((2.0 - q) / (1.0 - q)) - LN2
    u2 = 0.5 * (1.0 + q) * math.log((1.0 + q) / q) - LN2
    return u1, u2


def theorem1_probability_floor(m: int, n: int, q: float) -> float:
    """max{0, 1 - 2 exp(-upsilon_star * M * N)}.

    Lower-bounds the probability that the clean-data stopping time is at
    least -h / (N ln eps_star) - M.
    """
    u1, u2 = rate_functions(q)
    exponent = -min(u1, u2) * m * n
    return max(0.0, 1.0 - 2.0 * math.exp(exponent))


def threshold_for_kappa(kappa: float, m: int, n: int, q: float) -> tuple[float, bool]:
    """Smallest certified threshold for a target false-alarm period kappa.

    Returns (h_min, feasible). Feasibility needs M*N > ln2/upsilon_star,
    otherwise the probability floor is vacuous and no h is certified.
    """
    if not kappa > 0.0:
        raise DomainError("kappa must be positive")
    if m < 1 or n < 1:
        raise DomainError("M and N must be positive integers")
    u1, u2 = rate_functions(q)
    u_star = min(u1, u2)
    if m * n <= LN2 / u_star:
        raise InfeasibleMN(
            f"M*N = {m * n} does not exceed ln2/upsilon_star = {LN2 / u_star:.6g}; "
            "the false-alarm floor is vacuous"
        )
    floor = theorem1_probability_floor(m, n, q)
    _, _, eps_star = epsilons(q)
    h_min = n * (kappa / floor + m) * math.log(1.0 / eps_star)
    return h_min, True


@dataclass(frozen=True)
class FalseAlarmCertificate:
    """All false-alarm constants for one (q, kappa, M, N) instance.

    mode records where q came from: "benchmark" means the true q(theta),
    "deployment" means a plug-in estimate from secure-phase bits. The
    guarantees are proved for the true q, so deployment certificates are
    heuristic and say so when formatted.
    """

    q: float
    mode: str
    eps1: float
    eps2: float
    eps_star: float
    upsilon1: float
    upsilon2: float
    upsilon_star: float
    mn_min: float
    kappa: float
    m: int
    n: int
    probability_floor: float
    h_min: float


def build_certificate(
    q: float,
    kappa: float,
    m: int,
    n: int,
    mode: str = MODE_BENCHMARK,
) -> FalseAlarmCertificate:
    if mode not in (MODE_BENCHMARK, MODE_DEPLOYMENT):
        raise DomainError(f"unknown certificate mode {mode!r}")
    eps1, eps2, eps_star = epsilons(q)
    u1, u2 = rate_functions(q)
    u_star = min(u1, u2)
    h_min, _ = threshold_for_kappa(kappa, m, n, q)
    return FalseAlarmCertificate(
        q=q,
        mode=mode,
        eps1=eps1,
        eps2=eps2,
        eps_star=eps_star,
        upsilon1=u1,
        upsilon2=u2,
        upsilon_star=u_star,
        mn_min=LN2 / u_star,
        kappa=kappa,
        m=m,
        n=n,
        probability_floor=theorem1_probability_floor(m, n, q),
        h_min=h_min,
    )


def plugin_q(secure_bit_sum: int, m: int, n: int) -> float:
    """Plug-in bit-zero probability from secure-phase bit counts."""
    if not 0 <= secure_bit_sum <= m * n:
        raise DomainError("secure bit sum outside [0, M*N]")
    q = 1.0 - secure_bit_sum / (m * n)
    return _check_q(q)


def format_certificate(cert: FalseAlarmCertificate) -> str:
    rows = [
        ("mode", cert.mode),
        ("q (bit-zero prob)", f"{cert.q:.10g}"),
        ("eps1", f"{cert.eps1:.10g}"),
        ("eps2", f"{cert.eps2:.10g}"),
        ("eps_star", f"{cert.eps_star:.10g}"),
        ("upsilon1", f"{cert.upsilon1:.10g}"),
        ("upsilon2", f"{cert.upsilon2:.10g}"),
        ("upsilon_star", f"{cert.upsilon_star:.10g}"),
        ("min M*N required", f"{cert.mn_min:.10g}"),
        ("M", str(cert.m)),
        ("N", str(cert.n)),
        ("M*N", str(cert.m * cert.n)),
        ("probability floor", f"{cert.probability_floor:.10g}"),
        ("target kappa", f"{cert.kappa:.10g}"),
        ("h_min", f"{cert.h_min:.10g}"),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
    if cert.mode == MODE_DEPLOYMENT:
        lines.append("note: plug-in q; guarantee is heuristic, proved only for the true q")
    return "\n".join(lines)
