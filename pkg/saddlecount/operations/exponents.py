"""
Closed-form exponent bookkeeping: decay rates from the spectral gap, the
radius schedule e^{t_n} = n^(sigma/lambda), smoothing and cutoff parameters
along it, and the sigma that balances the error terms.

sigma is 5.5 (1 + lambda) = 5.5 / eta (sector) and 8.5 (1 + lambda) (uniform).
"""
import math

from saddlecount.errors import InvalidParameter, ScheduleViolation
from saddlecount.operations.models import ExponentLedger, LedgerRow

SECTOR_SIGMA_FACTOR = 5.5
UNIFORM_SIGMA_FACTOR = 8.5
UNIFORM_SCALE_POWER = 7


def _check_gap(lam: float) -> None:
    if not 0 < lam <= 1:
        raise InvalidParameter(f"lambda must lie in (0, 1], got {lam}")


def _check_ledger(eta_value: float, eta1: float, alpha1: float, beta: float) -> None:
    if not 0 < eta1 < 2 * eta_value:
        raise InvalidParameter(f"eta1 must satisfy 0 < eta1 < 2*eta, got eta1={eta1}, eta={eta_value}")
    if beta <= 0 or alpha1 <= 0:
        raise InvalidParameter(f"alpha1 and beta must be positive, got alpha1={alpha1}, beta={beta}")


# ---
# 1. DECAY OF MATRIX COEFFICIENTS
# ---

def eta(lam: float) -> float:
    if lam < 0:
        raise InvalidParameter(f"lambda must be non-negative, got {lam}")
    return 1.0 / (1.0 + lam)


def lambda_prime(t: float, interval_length: float, lam: float) -> float:
    """Exponent balancing |I| e^{2t(l'-1)} against |I|^2 e^{-2 lambda l' t}."""
    if not 0 < interval_length < 1:
        raise ScheduleViolation(f"interval length must lie in (0, 1), got {interval_length}")
    if not t > 0.5 * math.log(1.0 / interval_length):
        raise ScheduleViolation(f"t={t} must exceed log(1/|I|)/2 = {0.5 * math.log(1.0 / interval_length)}")
    return eta(lam) * (math.log(interval_length) / (2.0 * t) + 1.0)


def lambda_prime_balance(t: float, interval_length: float, lam: float) -> tuple[float, float]:
    """Both sides of the defining balance at the optimal exponent."""
    value = lambda_prime(t, interval_length, lam)
    left = interval_length * math.exp(2.0 * t * (value - 1.0))
    right = interval_length ** 2 * math.exp(-2.0 * lam * value * t)
    return left, right


def l2_bound(t: float, interval_length: float, lam: float, sobolev_norm: float, C: float = 1.0) -> float:
    if not 0 < interval_length <= 1:
        raise InvalidParameter(f"interval length must lie in (0, 1], got {interval_length}")
    if not t > 0.5 * math.log(1.0 / interval_length):
        raise InvalidParameter(f"t={t} must exceed log(1/|I|)/2")
    rate = lam * eta(lam)
    return C * math.exp(-2.0 * rate * t) * sobolev_norm ** 2 * interval_length ** (2.0 - rate)


# ---
# 2. SCHEDULE
# ---

def schedule_tn(n: float, sigma: float, lam: float) -> float:
    if n < 1:
        raise InvalidParameter(f"schedule index must be at least 1, got {n}")
    return (sigma / lam) * math.log(n)


def schedule_index(T: float, sigma: float, lam: float) -> int:
    """Smallest integer n with n^(sigma/lambda) >= T."""
    if T <= 0:
        raise InvalidParameter(f"radius must be positive, got {T}")
    power = sigma / lam
    n = max(1, math.ceil(T ** (1.0 / power)))
    while float(n) ** power < T:
        n += 1
    while n > 1 and float(n - 1) ** power >= T:
        n -= 1
    return n


def interpolation_ratio(n: int, sigma: float, lam: float) -> float:
    """T_{n+1}^2 / T_n^2, which tends to 1 along the schedule."""
    if n < 1:
        raise InvalidParameter(f"schedule index must be at least 1, got {n}")
    return (1.0 + 1.0 / n) ** (2.0 * sigma / lam)


def delta_rate(lam: float, eta_value: float, eta1: float, alpha1: float, beta: float) -> float:
    return (eta_value - eta1 / 2.0) * lam / (1.5 + alpha1 / beta)


def delta_n(t_n: float, lam: float, eta_value: float, eta1: float, alpha1: float, beta: float) -> float:
    """
    Smoothing width along the schedule. Requires e^{-2t} = o(delta^{1/2}): the
    decay rate of delta^{1/2} must stay below 2 and the ordering must hold at t_n.
    """
    _check_ledger(eta_value, eta1, alpha1, beta)
    rate = delta_rate(lam, eta_value, eta1, alpha1, beta)
    delta = math.exp(-rate * t_n)
    if rate / 2.0 >= 2.0:
        raise ScheduleViolation(f"delta^(1/2) decays at rate {rate / 2.0}, not slower than e^(-2t)")
    if math.exp(-2.0 * t_n) > math.sqrt(delta):
        raise ScheduleViolation(f"e^(-2t) exceeds delta^(1/2) at t={t_n}")
    return delta


def epsilon_n(delta: float, beta: float) -> float:
    """Cutoff paired with the smoothing width."""
    if not 0 < delta <= 1 or beta <= 0:
        raise InvalidParameter(f"need 0 < delta <= 1 and beta > 0, got delta={delta}, beta={beta}")
    return delta ** (1.0 / beta)


def three_term_balance(t: float, lam: float, eta_value: float, eta1: float, alpha1: float,
                       beta: float) -> tuple[float, float, float]:
    """smoothing, cusp and spectral error terms at (delta_n, epsilon_n); all three agree."""
    delta = delta_n(t, lam, eta_value, eta1, alpha1, beta)
    eps = epsilon_n(delta, beta)
    smoothing = math.sqrt(delta)
    cusp = eps ** beta / math.sqrt(delta)
    spectral = math.exp(-(eta_value - eta1 / 2.0) * lam * t) * eps ** (-alpha1) / delta
    return smoothing, cusp, spectral


def kappa_step3(lam: float, eta_value: float, eta1: float, alpha1: float, beta: float) -> float:
    # eta1 = 2 eta is the degenerate endpoint where kappa vanishes
    if not 0 < eta1 <= 2 * eta_value or beta <= 0 or alpha1 <= 0:
        raise InvalidParameter("kappa needs 0 < eta1 <= 2*eta and positive alpha1, beta")
    return lam * (eta_value - eta1 / 2.0) / (6.0 + 4.0 * alpha1 / beta)


# ---
# 3. SIGMA
# ---

def kappa_of_sigma(sigma: float, lam: float, uniform: bool = False) -> float:
    """Limit of kappa_step3 as alpha1, beta -> 1 with eta1 = alpha1/sigma (7 alpha1/sigma uniform)."""
    numerator = UNIFORM_SCALE_POWER if uniform else 1
    return (lam / 10.0) * (eta(lam) - numerator / (2.0 * sigma))


def solve_sigma(lam: float) -> float:
    """Root of kappa(sigma) = lambda / (2 sigma)."""
    _check_gap(lam)
    return SECTOR_SIGMA_FACTOR * (1.0 + lam)


def solve_sigma_uniform(lam: float) -> float:
    _check_gap(lam)
    return UNIFORM_SIGMA_FACTOR * (1.0 + lam)


def kappa_final(lam: float) -> float:
    return lam / solve_sigma(lam)


def kappa_uniform(lam: float) -> float:
    sigma = solve_sigma_uniform(lam)
    return min(kappa_of_sigma(sigma, lam, uniform=True), lam / (2.0 * sigma))


def scale_mn(n: int) -> int:
    """floor(n^(1/7)) in integer arithmetic."""
    if n < 1:
        raise InvalidParameter(f"scale index must be at least 1, got {n}")
    m = max(1, int(round(n ** (1.0 / UNIFORM_SCALE_POWER))))
    while m ** UNIFORM_SCALE_POWER > n:
        m -= 1
    while (m + 1) ** UNIFORM_SCALE_POWER <= n:
        m += 1
    return m


def eta1_sector(alpha1: float, sigma: float) -> float:
    return alpha1 / sigma


def eta1_uniform(alpha1: float, sigma: float) -> float:
    return UNIFORM_SCALE_POWER * alpha1 / sigma


def is_summable_sector(alpha1: float, sigma: float) -> bool:
    """sum over n of n^(-sigma eta1) converges; sigma eta1 = alpha1."""
    if sigma <= 0:
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    return alpha1 > 1


def is_summable_uniform(alpha1: float, sigma: float) -> bool:
    """sum over m of m^(6 - sigma eta1) converges; the scale m has about m^6 indices n."""
    if sigma <= 0:
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    return UNIFORM_SCALE_POWER * alpha1 - (UNIFORM_SCALE_POWER - 1) > 1


# ---
# 4. LEDGER
# ---

def build_ledger(lam: float, alpha1: float, alpha2: float, uniform: bool = False) -> ExponentLedger:
    _check_gap(lam)
    if not 1 < alpha1 < alpha2 < 2:
        raise InvalidParameter(f"need 1 < alpha1 < alpha2 < 2, got alpha1={alpha1}, alpha2={alpha2}")
    eta_value = eta(lam)
    beta = alpha2 - alpha1
    if uniform:
        sigma = solve_sigma_uniform(lam)
        eta1 = eta1_uniform(alpha1, sigma)
        final = kappa_uniform(lam)
    else:
        sigma = solve_sigma(lam)
        eta1 = eta1_sector(alpha1, sigma)
        final = kappa_final(lam)
    kappa = kappa_step3(lam, eta_value, eta1, alpha1, beta)
    return ExponentLedger(lam=lam, alpha1=alpha1, alpha2=alpha2, beta=beta, eta=eta_value, eta1=eta1,
                          sigma=sigma, kappa=kappa, kappa_final=final, uniform=uniform)


def ledger_rows(ledger: ExponentLedger) -> list[LedgerRow]:
    variant = "uniform" if ledger.uniform else "sector"
    names = ("lam", "alpha1", "alpha2", "beta", "eta", "eta1", "sigma", "kappa", "kappa_final")
    return [LedgerRow(variant=variant, name="lambda" if name == "lam" else name, value=getattr(ledger, name))
            for name in names]
