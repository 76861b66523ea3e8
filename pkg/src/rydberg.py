# src/rydberg.py

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import gammaln, logsumexp, roots_laguerre, roots_legendre, xlogy

from src.errors import DomainError, UndersampledError, ValidationError
from src.physical_constants import PhysicalConstants, constants

logger = logging.getLogger(__name__)

# 対数領域の求積で扱う主量子数の上限
MAX_QUADRATURE_N = 200


@dataclass(frozen=True)
class CircularState:
    """
    円軌道（ストレッチ）状態 |n, l=n-1, m=n-1⟩。
    コンストラクタは l = m = n-1 を強制します。電子スピンは無視します。
    """
    n: int
    l: int
    m_quantum: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"主量子数 n は1以上の整数でなければなりません (n={self.n})。")
        if self.l != self.n - 1 or self.m_quantum != self.l:
            raise ValidationError(
                f"円軌道状態では l = m = n-1 でなければなりません (n={self.n}, l={self.l}, m={self.m_quantum})。"
            )


def circular_state(n: int) -> CircularState:
    """主量子数 n の円軌道状態を作ります。"""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"主量子数 n は1以上の整数でなければなりません (n={n})。")
    n = int(n)
    return CircularState(n=n, l=n - 1, m_quantum=n - 1)


class MomentMode(Enum):
    """⟨x²+y²⟩ の評価方法。EXACT は閉形式、PAPER_APPROX は大きな n での a_n² 近似。"""
    EXACT = "exact"
    PAPER_APPROX = "paper-approx"


# --- 幾何学的なモーメント ---

def orbit_radius(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """リング半径 a_n = n² a₀ (m)。"""
    c = c or constants()
    return state.n ** 2 * c.bohr_radius


def _log_angular_integral(p: float) -> float:
    """log ∫₀^π sin^p θ dθ （ウォリス積分をガンマ関数で表したもの）。"""
    return 0.5 * math.log(math.pi) + gammaln((p + 1.0) / 2.0) - gammaln(p / 2.0 + 1.0)


def _log_radial_integral(k: int, decay: float) -> float:
    """log ∫₀^∞ r^k e^{-decay·r} dr = log(k!) - (k+1) log(decay)"""
    return gammaln(k + 1.0) - (k + 1.0) * math.log(decay)


def _radial_decay(state: CircularState, c: PhysicalConstants) -> float:
    # |Ψ|² の指数部 exp(-2r/(n a₀))
    return 2.0 / (state.n * c.bohr_radius)


def transverse_moment(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """
    ⟨Ψ|x²+y²|Ψ⟩ を閉形式で返します (m²)。

    動径部分はガンマ関数、角度部分はウォリス積分の比になり、
    ⟨x²+y²⟩ = n³(n+1) a₀² に一致します。オーバーフローを避けるため対数領域で計算します。
    """
    c = c or constants()
    n = state.n
    decay = _radial_decay(state, c)
    log_moment = (
        _log_radial_integral(2 * n + 2, decay) - _log_radial_integral(2 * n, decay)
        + _log_angular_integral(2 * n + 1) - _log_angular_integral(2 * n - 1)
    )
    return math.exp(log_moment)


def effective_transverse_moment(state: CircularState, mode: MomentMode = MomentMode.EXACT,
                                c: PhysicalConstants | None = None) -> float:
    """モードに応じて厳密な ⟨x²+y²⟩ か近似値 a_n² を返します。"""
    if mode is MomentMode.PAPER_APPROX:
        return orbit_radius(state, c) ** 2
    return transverse_moment(state, c)


def rms_transverse_size(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """横方向の二乗平均平方根サイズ √⟨x²+y²⟩ (m)。"""
    return math.sqrt(transverse_moment(state, c))


def mean_square_radius(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """⟨r²⟩ = n²(n+1)(2n+1) a₀²/2 (m²)。"""
    c = c or constants()
    decay = _radial_decay(state, c)
    return math.exp(_log_radial_integral(2 * state.n + 2, decay) - _log_radial_integral(2 * state.n, decay))


def log_normalization_constant(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """規格化定数 N_{n,n-1,n-1} の自然対数。"""
    c = c or constants()
    n = state.n
    log_norm_integral = (
        math.log(2.0 * math.pi)
        + _log_angular_integral(2 * n - 1)
        + _log_radial_integral(2 * n, _radial_decay(state, c))
    )
    return -0.5 * log_norm_integral


def ring_density(state: CircularState, r, theta, c: PhysicalConstants | None = None) -> np.ndarray:
    """
    確率密度 |Ψ(r, θ, φ)|² (m⁻³) を返します。φ には依存しません。

    Args:
        state (CircularState): 円軌道状態。
        r (array_like): 動径座標 (m)。
        theta (array_like): 極角 (rad)。
    """
    c = c or constants()
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    power = 2.0 * (state.n - 1)
    log_density = (
        2.0 * log_normalization_constant(state, c)
        + xlogy(power, r) + xlogy(power, np.abs(np.sin(theta)))
        - _radial_decay(state, c) * r
    )
    return np.exp(log_density)


# --- 求積（数値オラクル） ---

def _log_radial_quadrature(state: CircularState, extra_power: int, c: PhysicalConstants) -> float:
    """
    log ∫₀^∞ r^{2n+extra} e^{-decay·r} dr をガウス・ラゲール求積で評価します。
    u = decay·r と変数変換し、重みと被積分関数を対数のまま足し合わせます。
    """
    decay = _radial_decay(state, c)
    k = 2 * state.n + extra_power
    nodes, weights = roots_laguerre(k // 2 + 8)
    with np.errstate(divide='ignore'):
        log_terms = np.log(weights) + k * np.log(nodes)
    return float(logsumexp(log_terms)) - (k + 1) * math.log(decay)


def _log_angular_quadrature(state: CircularState, extra_power: int) -> float:
    """log ∫₋₁¹ (1-x²)^{n-1+extra} dx をガウス・ルジャンドル求積で評価します (x = cos θ)。"""
    p = state.n - 1 + extra_power
    nodes, weights = roots_legendre(p + 4)
    log_terms = np.log(weights) + p * np.log1p(-nodes ** 2)
    return float(logsumexp(log_terms))


def _check_quadrature_range(state: CircularState):
    if state.n > MAX_QUADRATURE_N:
        raise DomainError(f"求積は n ≤ {MAX_QUADRATURE_N} の範囲のみ対応しています (n={state.n})。")


def transverse_moment_quadrature(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """
    ⟨x²+y²⟩ を2次元求積（動径: ラゲール、角度: ルジャンドル）で評価します。
    閉形式 transverse_moment の検証用オラクルです。
    """
    c = c or constants()
    _check_quadrature_range(state)
    log_moment = (
        _log_radial_quadrature(state, 2, c) - _log_radial_quadrature(state, 0, c)
        + _log_angular_quadrature(state, 1) - _log_angular_quadrature(state, 0)
    )
    return math.exp(log_moment)


def normalization_check(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """
    |∫|Ψ|² dV - 1| を返します。規格化定数は閉形式、積分は求積で評価します。

    Returns:
        float: 規格化からの相対誤差。
    """
    c = c or constants()
    _check_quadrature_range(state)
    log_total = (
        2.0 * log_normalization_constant(state, c)
        + math.log(2.0 * math.pi)
        + _log_radial_quadrature(state, 0, c)
        + _log_angular_quadrature(state, 0)
    )
    return abs(math.expm1(log_total))


# --- 量子化された磁気モーメントと磁束 ---

def _require_integer(value, minimum: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise DomainError(f"{name} は{minimum}以上の整数でなければなりません ({name}={value})。")
    return int(value)


def magnetic_moment(n: int, c: PhysicalConstants | None = None) -> float:
    """μ_n = n μ_B (J/T)。"""
    c = c or constants()
    return _require_integer(n, 1, "n") * c.bohr_magneton


def trapped_flux(n: int, c: PhysicalConstants | None = None) -> float:
    """超伝導リングに捕捉される磁束 Φ_n = n h/2e (Wb)。"""
    c = c or constants()
    return _require_integer(n, 0, "n") * c.flux_quantum


def angular_momentum(state: CircularState, c: PhysicalConstants | None = None) -> float:
    """角運動量の z 成分 m ħ = (n-1) ħ (J·s)。"""
    c = c or constants()
    return state.m_quantum * c.reduced_planck


# --- 位相の巻き数 ---

@dataclass(frozen=True)
class PhaseLoop:
    """
    リングを一周する位相のサンプル列 [(角度 φ, 波動関数の位相)]。
    8点以上、角度は [0, 2π) で狭義単調増加でなければなりません。
    """
    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        samples = tuple((float(a), float(p)) for a, p in self.samples)
        object.__setattr__(self, 'samples', samples)
        if len(samples) < 8:
            raise ValidationError(f"位相ループには8点以上のサンプルが必要です ({len(samples)}点)。")
        angles = np.array([a for a, _ in samples])
        if angles[0] < 0.0 or angles[-1] >= 2.0 * math.pi:
            raise ValidationError("サンプル角度は [0, 2π) の範囲でなければなりません。")
        if np.any(np.diff(angles) <= 0.0):
            raise ValidationError("サンプル角度は狭義単調増加でなければなりません。")

    @classmethod
    def from_function(cls, phase: Callable[[np.ndarray], np.ndarray], count: int) -> "PhaseLoop":
        """位相関数を一周 count 点で等間隔サンプリングしてループを作ります。"""
        angles = np.arange(count) * (2.0 * math.pi / count)
        return cls(tuple(zip(angles, np.asarray(phase(angles), dtype=float))))

    @property
    def phases(self) -> np.ndarray:
        return np.array([p for _, p in self.samples])


def winding_number(loop: PhaseLoop) -> int:
    """
    一周あたりの位相の増加 Δφ = 2πm から整数 m を返します。

    隣接サンプル間の位相差を (-π, π] に折り返して足し合わせ、最後のサンプルから
    最初のサンプルへ戻る区間も含めます。

    Raises:
        UndersampledError: 折り返し後の位相差が π 以上になる区間がある場合。
    """
    phases = loop.phases
    closed = np.append(phases, phases[0])
    jumps = np.angle(np.exp(1j * np.diff(closed)))
    if np.any(np.abs(jumps) >= math.pi * (1.0 - 1e-12)):
        raise UndersampledError("隣接サンプル間の位相差が π 以上です。サンプル数を増やしてください。")
    total = float(np.sum(jumps))
    return int(round(total / (2.0 * math.pi)))


# --- 遷移周波数と断熱性 ---

def transition_frequency(n_upper: int, n_lower: int, c: PhysicalConstants | None = None) -> float:
    """リュードベリの式による遷移周波数 R∞c (1/n_lower² - 1/n_upper²) (Hz)。"""
    c = c or constants()
    n_lower = _require_integer(n_lower, 1, "n_lower")
    n_upper = _require_integer(n_upper, 1, "n_upper")
    if n_upper <= n_lower:
        raise DomainError(f"n_upper > n_lower でなければなりません ({n_upper} → {n_lower})。")
    return c.rydberg_frequency * (1.0 / n_lower ** 2 - 1.0 / n_upper ** 2)


def gap_frequency(n: int, c: PhysicalConstants | None = None) -> float:
    """許容遷移 n → n-1 のギャップ周波数 (Hz)。"""
    n = _require_integer(n, 2, "n")
    return transition_frequency(n, n - 1, c)


class SystemKind(Enum):
    RYDBERG_ATOM = "rydberg-atom"
    SUPERCONDUCTING_RING = "superconducting-ring"


@dataclass(frozen=True)
class QuantumSystemKind:
    """
    量子系の種類と、隣接状態間の遷移が許容されるかどうか。
    超伝導リングでは巨視的な数のクーパー対が同時に遷移する必要があるため、常に禁制です。
    """
    kind: SystemKind
    allowed_adjacent_transitions: bool

    def __post_init__(self):
        if self.kind is SystemKind.SUPERCONDUCTING_RING and self.allowed_adjacent_transitions:
            raise ValidationError("超伝導リングでは隣接状態間の遷移は許容されません。")

    @classmethod
    def rydberg_atom(cls) -> "QuantumSystemKind":
        return cls(SystemKind.RYDBERG_ATOM, True)

    @classmethod
    def superconducting_ring(cls) -> "QuantumSystemKind":
        return cls(SystemKind.SUPERCONDUCTING_RING, False)


def adiabaticity_check(system: QuantumSystemKind, gap_frequency: float,
                       perturbation_frequency: float, margin: float) -> bool:
    """
    摂動が十分ゆっくりで、状態が量子跳躍なしに保たれるかを判定します。

    Args:
        system (QuantumSystemKind): 対象の量子系。
        gap_frequency (float): 最小の許容遷移のギャップ周波数 (Hz)。
        perturbation_frequency (float): 摂動の特性周波数 (Hz)。
        margin (float): 要求する余裕倍率 (>1)。

    Returns:
        bool: 原子では perturbation_frequency·margin < gap_frequency のとき True。
              超伝導リングは準安定なので常に True。
    """
    if gap_frequency < 0 or perturbation_frequency < 0:
        raise DomainError("周波数は0以上でなければなりません。")
    if not margin > 1:
        raise DomainError(f"margin は1より大きくなければなりません (margin={margin})。")
    if not system.allowed_adjacent_transitions:
        return True
    return perturbation_frequency * margin < gap_frequency
