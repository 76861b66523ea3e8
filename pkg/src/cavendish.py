# src/cavendish.py

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.electrostatics_circuit import equilibrium_solve
from src.errors import (DomainError, InsufficientDataError, SingularityError, SmallAngleViolationError,
                        ValidationError)
from src.physical_constants import PhysicalConstants, constants
from src.scenario_config import ScenarioConfig

logger = logging.getLogger(__name__)

# pendulum_deflection が受け付ける |a|/g の上限
MAX_FIELD_RATIO = 1e-2
# PendulumResponse の振れ角の上限 (rad)
MAX_DEFLECTION_RAD = 1e-3
# 同期検波に必要な最小の周期数
MIN_DETECTION_PERIODS = 10
# 同期検波で同時に当てはめる回転周波数の高調波の最大次数
FIT_HARMONICS = 8


@dataclass(frozen=True)
class SourceAssembly:
    """
    回転台に載せた鉛ブロックの山。各山は重心に置いた点質量として扱い、
    pile_count 個の山を円周上に等間隔（2個なら正反対）に並べます。
    """
    pile_mass: float = 500.0
    orbit_radius: float = 0.5
    rotation_frequency: float = 0.01
    pile_count: int = 2

    def __post_init__(self):
        if not (self.pile_mass > 0 and self.orbit_radius > 0 and self.rotation_frequency > 0):
            raise ValidationError("山の質量、軌道半径、回転周波数は正でなければなりません。")
        if isinstance(self.pile_count, bool) or not isinstance(self.pile_count, int) or self.pile_count < 1:
            raise ValidationError(f"山の数は1以上の整数でなければなりません (pile_count={self.pile_count!r})。")

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "SourceAssembly":
        cav = config.cavendish
        return cls(cav.brick_mass_kg, cav.orbit_radius_m, cav.rotation_hz, cav.pile_count)

    def pile_positions(self, phase_angle: float) -> np.ndarray:
        """回転角 phase_angle における各山の位置 (pile_count, 3)。"""
        angles = phase_angle + 2.0 * np.pi * np.arange(self.pile_count) / self.pile_count
        return np.column_stack((self.orbit_radius * np.cos(angles),
                                self.orbit_radius * np.sin(angles),
                                np.zeros(self.pile_count)))


def _as_point(eval_point) -> np.ndarray:
    point = np.zeros(3)
    raw = np.asarray(eval_point, dtype=float).ravel()
    if raw.size not in (1, 2, 3):
        raise ValidationError(f"評価点は1〜3成分で指定してください (値: {eval_point!r})。")
    point[:raw.size] = raw
    return point


def source_field(assembly: SourceAssembly, phase_angle: float, eval_point,
                 c: PhysicalConstants | None = None) -> np.ndarray:
    """
    回転中心からの変位 eval_point における、鉛ブロックの山によるニュートン重力加速度 (m/s²)。

    Args:
        assembly (SourceAssembly): 重力源。
        phase_angle (float): 回転台の回転角 (rad)。
        eval_point: 評価点 (m)。1〜3成分。
        c (PhysicalConstants): 物理定数。

    Returns:
        np.ndarray: 加速度ベクトル。
    """
    c = c or constants()
    point = _as_point(eval_point)
    if np.linalg.norm(point) > assembly.orbit_radius:
        raise DomainError(f"評価点は軌道半径 {assembly.orbit_radius} m の内側でなければなりません。")

    field = np.zeros(3)
    for pile in assembly.pile_positions(phase_angle):
        separation = pile - point
        distance = np.linalg.norm(separation)
        if distance == 0.0:
            raise SingularityError(f"評価点が重力源の位置と一致しています: {pile}")
        field += c.gravitational_constant * assembly.pile_mass * separation / distance ** 3
    return field


def pendulum_deflection(field_horizontal: float, c: PhysicalConstants | None = None) -> float:
    """静的な下げ振りの振れ角 a_h/g (rad)。"""
    c = c or constants()
    if abs(field_horizontal) >= MAX_FIELD_RATIO * c.surface_gravity:
        raise SmallAngleViolationError(
            f"水平加速度 {field_horizontal:.3e} m/s² は小角近似の範囲 (< {MAX_FIELD_RATIO} g) を超えています。"
        )
    return field_horizontal / c.surface_gravity


@dataclass(frozen=True)
class PendulumResponse:
    """振り子の振れ角の時系列と静的ゲイン 1/g (rad per m/s²)。"""
    deflection: np.ndarray
    static_gain: float

    def __post_init__(self):
        if np.any(np.abs(self.deflection) >= MAX_DEFLECTION_RAD):
            raise SmallAngleViolationError(f"振れ角が {MAX_DEFLECTION_RAD} rad を超えています。")


def pendulum_response(field_horizontal: np.ndarray, c: PhysicalConstants | None = None) -> PendulumResponse:
    c = c or constants()
    deflection = np.array([pendulum_deflection(a, c) for a in np.atleast_1d(field_horizontal)])
    return PendulumResponse(deflection, 1.0 / c.surface_gravity)


def differential_acceleration(assembly: SourceAssembly, phase_angle: float, span: float,
                              c: PhysicalConstants | None = None) -> np.ndarray:
    """2つのキューブの中心 (±span, 0, 0) における重力源の加速度の差 a(+span) - a(-span) (m/s²)。"""
    right = source_field(assembly, phase_angle, (span, 0.0, 0.0), c)
    left = source_field(assembly, phase_angle, (-span, 0.0, 0.0), c)
    return right - left


def convergent_acceleration(assembly: SourceAssembly, phase_angle: float, span: float,
                            c: PhysicalConstants | None = None) -> float:
    """
    キューブを中心に向けて押し合う向きを正とした水平加速度 -(a_x(+span) - a_x(-span))/2。
    地球の潮汐場では g·span/R_E に相当します。
    """
    return -0.5 * float(differential_acceleration(assembly, phase_angle, span, c)[0])


def predicted_charge_signal(assembly: SourceAssembly | None, config: ScenarioConfig, t,
                            c: PhysicalConstants | None = None) -> np.ndarray:
    """
    誘起電荷の時系列 (C)。

    地球だけのつり合い電荷 Q₀ を基準に、重力源による水平加速度の変化 δg' に対する
    1次の応答 Q₀·δg'/(2g'_E) を加えます (Q ∝ √F)。assembly が None なら Q₀ の定数列です。
    """
    c = c or constants()
    times = np.atleast_1d(np.asarray(t, dtype=float))
    circuit = config.circuit
    base = equilibrium_solve(circuit.rho_kg_m3, circuit.L_m, circuit.alpha, circuit.beta, c).Q
    if assembly is None:
        return np.full(times.shape, base)

    earth_convergent = c.surface_gravity * circuit.L_m / c.earth_radius
    phases = 2.0 * np.pi * assembly.rotation_frequency * times
    modulation = np.array([convergent_acceleration(assembly, phase, circuit.L_m, c) for phase in phases])
    return base * (1.0 + modulation / (2.0 * earth_convergent))


@dataclass(frozen=True)
class DetectionResult:
    """同期検波の結果。phase は A·cos(ωt + φ) の φ です。"""
    harmonic: int
    amplitude: float
    phase: float
    noise_floor: float

    def to_record(self, seed: int) -> dict:
        return {
            'harmonic': self.harmonic,
            'amplitude': self.amplitude,
            'phase_rad': self.phase,
            'noise_floor': self.noise_floor,
            'seed': seed,
        }


def synchronous_detect(times, values, rotation_frequency: float, harmonic: int,
                       integration_time: float) -> DetectionResult:
    """
    回転周波数の harmonic 倍の成分を、直流・同相・直交の3成分の最小二乗当てはめで取り出します。
    積分窓は integration_time 以内に収まる整数個の周期に切り詰めます。1周期が整数サンプルでなくても
    直流成分は当てはめで除かれます。

    Args:
        times: 等間隔の時刻列 (s)。
        values: 信号の時系列。
        rotation_frequency (float): 回転周波数 (Hz)。
        harmonic (int): 検出する高調波の次数 (≥ 1)。
        integration_time (float): 積分時間 (s)。

    Returns:
        DetectionResult: 振幅、位相、雑音レベルの推定値。

    Raises:
        InsufficientDataError: 記録や積分時間が目標の高調波の10周期に満たない場合。
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if isinstance(harmonic, bool) or not isinstance(harmonic, int) or harmonic < 1:
        raise ValidationError(f"高調波の次数は1以上の整数です (harmonic={harmonic!r})。")
    if rotation_frequency <= 0:
        raise DomainError(f"回転周波数は正でなければなりません (f={rotation_frequency})。")
    if times.shape != values.shape or times.ndim != 1:
        raise ValidationError("時刻列と信号列は同じ長さの1次元配列でなければなりません。")
    if len(times) < 2:
        raise InsufficientDataError("同期検波には2サンプル以上が必要です。")

    intervals = np.diff(times)
    sample_interval = intervals[0]
    if sample_interval <= 0 or not np.allclose(intervals, sample_interval, rtol=1e-9, atol=0.0):
        raise ValidationError("信号は等間隔にサンプリングされていなければなりません。")

    frequency = harmonic * rotation_frequency
    period = 1.0 / frequency
    record_duration = len(times) * sample_interval
    if integration_time < MIN_DETECTION_PERIODS * period:
        raise InsufficientDataError(
            f"積分時間 {integration_time} s は {MIN_DETECTION_PERIODS} 周期 ({MIN_DETECTION_PERIODS * period} s) に足りません。"
        )
    if record_duration < integration_time * (1.0 - 1e-12):
        raise InsufficientDataError(f"記録長 {record_duration} s が積分時間 {integration_time} s より短いです。")

    whole_periods = math.floor(integration_time / period + 1e-9)
    count = min(len(times), int(round(whole_periods * period / sample_interval)))
    window_t = times[:count]
    window = values[:count]

    # 直流成分と、ナイキスト周波数未満の回転高調波を同時に最小二乗で当てはめる
    nyquist = 0.5 / sample_interval
    orders = [k for k in range(1, max(harmonic, FIT_HARMONICS) + 1)
              if k == harmonic or k * rotation_frequency < nyquist]
    columns = [np.ones(count)]
    for k in orders:
        omega_t = 2.0 * np.pi * k * rotation_frequency * window_t
        columns.extend((np.cos(omega_t), np.sin(omega_t)))
    design = np.column_stack(columns)
    scale = float(np.max(np.abs(window))) or 1.0
    coefficients, _, _, _ = np.linalg.lstsq(design, window / scale, rcond=None)
    target = 1 + 2 * orders.index(harmonic)
    in_phase, quadrature = coefficients[target:target + 2] * scale
    amplitude = float(np.hypot(in_phase, quadrature))
    phase = float(np.arctan2(-quadrature, in_phase))

    residual = window - design @ (coefficients * scale)
    dof = max(count - design.shape[1], 1)
    noise_floor = float(np.sqrt(np.sum(residual ** 2) / dof) * np.sqrt(2.0 / count))
    return DetectionResult(harmonic, amplitude, phase, noise_floor)


@dataclass(frozen=True)
class SignalRecord:
    """合成した測定記録。CSVの列 t, charge_C, deflection_rad に対応します。"""
    t: np.ndarray
    charge_C: np.ndarray
    deflection_rad: np.ndarray

    def as_rows(self) -> list[tuple]:
        return list(zip(self.t, self.charge_C, self.deflection_rad))


def synthesize_record(config: ScenarioConfig, seed: int = 0, c: PhysicalConstants | None = None,
                      sample_hz: float | None = None) -> SignalRecord:
    """
    重力源を回転させたときの誘起電荷と振り子の振れ角の記録を合成します。
    電荷には平均0、標準偏差 noise_rms のガウス雑音を加えます。振り子はキューブ中心 (+L, 0, 0) に吊るします。
    """
    c = c or constants()
    cav = config.cavendish
    assembly = SourceAssembly.from_config(config)
    rate = sample_hz if sample_hz is not None else cav.sample_hz
    count = int(math.floor(cav.record_s * rate + 1e-9))
    if count < 2:
        raise InsufficientDataError(f"記録が短すぎます (record_s={cav.record_s}, sample_hz={rate})。")
    times = np.arange(count) / rate

    rng = np.random.default_rng(seed)
    charge = predicted_charge_signal(assembly, config, times, c) + rng.normal(0.0, cav.noise_rms, count)

    phases = 2.0 * np.pi * assembly.rotation_frequency * times
    horizontal = np.array([source_field(assembly, phase, (config.circuit.L_m, 0.0, 0.0), c)[0] for phase in phases])
    deflection = pendulum_response(horizontal, c).deflection
    logger.debug("信号を %d サンプル合成しました (seed=%d)。", count, seed)
    return SignalRecord(times, charge, deflection)


class Outcome(Enum):
    """電荷分離と振り子の振れの有無による4つの結果。"""
    I = (True, False)
    II = (False, True)
    III = (True, True)
    IV = (False, False)

    def __init__(self, charge_detected: bool, deflection_detected: bool):
        self.charge_detected = charge_detected
        self.deflection_detected = deflection_detected


@dataclass(frozen=True)
class OutcomeRecord:
    charge_separation_detected: bool
    deflection_detected: bool
    classification: Outcome


def classify_outcome(charge_detected: bool, deflection_detected: bool) -> OutcomeRecord:
    """(電荷分離, 振れ) の組を結果 I〜IV に分類します。"""
    outcome = Outcome((bool(charge_detected), bool(deflection_detected)))
    return OutcomeRecord(bool(charge_detected), bool(deflection_detected), outcome)


class Hypothesis(Enum):
    """落下する超伝導回路について考えられる仮説と、それぞれが予想する結果。"""
    # クーパー対がイオン格子を引きずり、不確定性原理が勝つ
    UNCERTAINTY_PRINCIPLE_WINS = Outcome.I
    # クーパー対もイオンと一緒に自由落下し、等価原理が勝つ
    EQUIVALENCE_PRINCIPLE_WINS = Outcome.II
    # 電荷分離は起きるが、イオン格子がクーパー対を引きずる
    LATTICE_DRAGS_PAIRS = Outcome.III
    # ニュートン重力が振り子を振らせない
    NEWTONIAN_GRAVITY_FAILS = Outcome.IV


def expected_outcome(hypothesis: Hypothesis) -> OutcomeRecord:
    """仮説が予想する結果を返します。"""
    outcome = hypothesis.value
    return OutcomeRecord(outcome.charge_detected, outcome.deflection_detected, outcome)
