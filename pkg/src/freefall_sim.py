# src/freefall_sim.py

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from src.errors import DomainError, TruncatedTrajectoryError, ValidationError
from src.physical_constants import PhysicalConstants, constants

logger = logging.getLogger(__name__)

# 小角近似を有効とみなす L/R_E の上限
SMALL_ANGLE_LIMIT = 1e-2
# horizontal_accel が受け付ける |offset|/R_E の上限
MAX_HORIZONTAL_OFFSET_RATIO = 1e-2


class FallMode(Enum):
    """2点の落下モード。"""
    # 互いに独立な点状物体（デコヒーレンスした2つのキューブ）
    INDEPENDENT_POINTS = "independent-points"
    # 水平間隔が L に拘束された広がった物体（量子的に非圧縮な物体）
    RIGID_EXTENDED = "rigid-extended"


@dataclass(frozen=True)
class FallScenario:
    """
    2点自由落下のシナリオ。地球中心を原点とし、2点は (∓L/2, 0, R_E + h) から静止状態で落下を始めます。
    """
    separation: float = 1.0
    drop_height: float = 10.0
    duration: float = 1.0
    step: float = 1.0e-3
    mode: FallMode = FallMode.INDEPENDENT_POINTS

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError(f"時間刻みは正でなければなりません (step={self.step})。")
        if self.duration < self.step:
            raise ValidationError(f"落下時間は時間刻み以上でなければなりません (duration={self.duration}, step={self.step})。")
        if self.separation < 0:
            raise ValidationError(f"間隔 L は0以上でなければなりません (L={self.separation})。")
        if self.drop_height < 0:
            raise ValidationError(f"落下開始高度は0以上でなければなりません (h={self.drop_height})。")
        if not isinstance(self.mode, FallMode):
            raise ValidationError(f"未知の落下モードです: {self.mode!r}")

    @property
    def step_count(self) -> int:
        return int(np.floor(self.duration / self.step + 1e-9))

    def with_step(self, step: float) -> "FallScenario":
        return FallScenario(self.separation, self.drop_height, self.duration, step, self.mode)


@dataclass
class TrajectoryPair:
    """
    2点の軌道の時系列。位置と速度は (サンプル数, 3) の配列です。
    constraint_accel は剛体モードで水平間隔を保つために必要な単位質量あたりの力 (m/s²) で、
    独立モードでは全て0です。
    """
    t: np.ndarray
    pos1: np.ndarray
    pos2: np.ndarray
    vel1: np.ndarray
    vel2: np.ndarray
    mode: FallMode
    constraint_accel: np.ndarray = field(default=None)

    def __post_init__(self):
        if len(self.t) == 0:
            raise ValidationError("軌道の時系列が空です。")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValidationError("時刻は狭義単調増加でなければなりません。")
        if self.constraint_accel is None:
            self.constraint_accel = np.zeros(len(self.t))

    def __len__(self):
        return len(self.t)

    @property
    def separation(self) -> np.ndarray:
        """各時刻における2点間の距離 (m)。"""
        return np.linalg.norm(self.pos2 - self.pos1, axis=1)

    @property
    def convergence_angle_observed(self) -> float:
        """2本の軌道の傾きの和。軌道が互いに作る角度 (rad) です。"""
        return observed_inclination(self, 1) + observed_inclination(self, 2)

    def as_rows(self) -> list[tuple]:
        """CSV出力用の行 (t, x1, z1, x2, z2, separation)。"""
        separation = self.separation
        return [
            (self.t[i], self.pos1[i, 0], self.pos1[i, 2], self.pos2[i, 0], self.pos2[i, 2], separation[i])
            for i in range(len(self.t))
        ]


@dataclass(frozen=True)
class ConvergenceAngle:
    """収束角 θ ≈ L/R_E と、小角近似が成り立つかどうかのフラグ。"""
    angle_rad: float
    small_angle_valid: bool


def convergence_angle(L: float, c: PhysicalConstants | None = None) -> ConvergenceAngle:
    """
    間隔 L の2点が作る軌道の収束角 θ ≈ L/R_E を返します。

    Args:
        L (float): 2点の水平間隔 (m)。
        c (PhysicalConstants): 物理定数。

    Returns:
        ConvergenceAngle: L/R_E が 1e-2 を超えると small_angle_valid が False になります。
    """
    c = c or constants()
    if L < 0:
        raise DomainError(f"間隔 L は0以上でなければなりません (L={L})。")
    angle = L / c.earth_radius
    valid = angle <= SMALL_ANGLE_LIMIT
    if not valid:
        logger.warning("L/R_E = %.3e は小角近似の範囲外です。", angle)
    return ConvergenceAngle(angle, valid)


def horizontal_accel(offset: float, c: PhysicalConstants | None = None) -> float:
    """
    鉛直軸から offset だけ離れた点の水平加速度 g' = g·offset/R_E (m/s²)。
    正の値は中点を通る鉛直線へ向かう向きを表します。
    """
    c = c or constants()
    if abs(offset) > MAX_HORIZONTAL_OFFSET_RATIO * c.earth_radius:
        raise DomainError(f"水平変位が大きすぎます (|offset| ≤ {MAX_HORIZONTAL_OFFSET_RATIO * c.earth_radius:.3e} m)。")
    return c.surface_gravity * offset / c.earth_radius


def rk4_step(state: np.ndarray, derivative: Callable[[np.ndarray], np.ndarray], step: float) -> np.ndarray:
    """古典的4次ルンゲ・クッタ法で状態を1ステップ進めます。"""
    k1 = derivative(state)
    k2 = derivative(state + 0.5 * step * k1)
    k3 = derivative(state + 0.5 * step * k2)
    k4 = derivative(state + step * k3)
    return state + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def central_acceleration(position: np.ndarray, gm: float) -> np.ndarray:
    """点質量の地球による加速度 -GM·r̂/r² (m/s²)。"""
    r = np.linalg.norm(position)
    return -gm * position / r ** 3


def _independent_derivative(gm: float):
    # 状態: [p1(3), p2(3), v1(3), v2(3)]
    def derivative(state: np.ndarray) -> np.ndarray:
        p1, p2, v1, v2 = state[0:3], state[3:6], state[6:9], state[9:12]
        return np.concatenate((v1, v2, central_acceleration(p1, gm), central_acceleration(p2, gm)))
    return derivative


def _rigid_derivative(gm: float, half_separation: float):
    # 状態: [z, vz]。両端は x = ∓L/2 に固定
    def derivative(state: np.ndarray) -> np.ndarray:
        z, vz = state
        rho = np.hypot(half_separation, z)
        return np.array([vz, -gm * z / rho ** 3])
    return derivative


def _rigid_constraint(gm: float, half_separation: float, z: float) -> float:
    # 水平方向の重力成分を打ち消す単位質量あたりの力
    rho = np.hypot(half_separation, z)
    return gm * half_separation / rho ** 3


def simulate_pair(scenario: FallScenario, c: PhysicalConstants | None = None) -> TrajectoryPair:
    """
    中心力場 -GM_E·r̂/r² 中の2点の落下を固定刻みのRK4で積分します。

    Args:
        scenario (FallScenario): 落下シナリオ。
        c (PhysicalConstants): 物理定数。

    Returns:
        TrajectoryPair: t = 0 から duration までの時系列。

    Raises:
        TruncatedTrajectoryError: 積分中にどちらかの点が地表に達した場合。partial に途中までの軌道を持ちます。
    """
    c = c or constants()
    gm = c.earth_gm
    half = 0.5 * scenario.separation
    z0 = c.earth_radius + scenario.drop_height
    steps = scenario.step_count
    times = np.arange(steps + 1) * scenario.step

    pos1 = np.zeros((steps + 1, 3))
    pos2 = np.zeros((steps + 1, 3))
    vel1 = np.zeros((steps + 1, 3))
    vel2 = np.zeros((steps + 1, 3))
    constraint = np.zeros(steps + 1)

    if scenario.mode is FallMode.INDEPENDENT_POINTS:
        derivative = _independent_derivative(gm)
        state = np.array([-half, 0.0, z0, half, 0.0, z0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    else:
        derivative = _rigid_derivative(gm, half)
        state = np.array([z0, 0.0])

    def store(index: int, current: np.ndarray):
        if scenario.mode is FallMode.INDEPENDENT_POINTS:
            pos1[index], pos2[index] = current[0:3], current[3:6]
            vel1[index], vel2[index] = current[6:9], current[9:12]
        else:
            z, vz = current
            pos1[index] = (-half, 0.0, z)
            pos2[index] = (half, 0.0, z)
            vel1[index] = vel2[index] = (0.0, 0.0, vz)
            constraint[index] = _rigid_constraint(gm, half, z)

    store(0, state)
    for index in range(1, steps + 1):
        state = rk4_step(state, derivative, scenario.step)
        store(index, state)
        if min(np.linalg.norm(pos1[index]), np.linalg.norm(pos2[index])) < c.earth_radius:
            partial = TrajectoryPair(times[:index], pos1[:index], pos2[:index], vel1[:index], vel2[:index],
                                     scenario.mode, constraint[:index])
            raise TruncatedTrajectoryError(
                f"t = {times[index]:.6g} s で地表に到達しました。途中までの軌道を返します。", partial
            )

    logger.debug("%s モードで %d ステップを積分しました。", scenario.mode.value, steps)
    return TrajectoryPair(times, pos1, pos2, vel1, vel2, scenario.mode, constraint)


def specific_energy(pair: TrajectoryPair, point: int, c: PhysicalConstants | None = None) -> np.ndarray:
    """指定した点 (1 または 2) の単位質量あたりの力学的エネルギー v²/2 - GM/r (J/kg)。"""
    c = c or constants()
    position, velocity = _select(pair, point)
    return 0.5 * np.sum(velocity ** 2, axis=1) - c.earth_gm / np.linalg.norm(position, axis=1)


def observed_inclination(pair: TrajectoryPair, point: int) -> float:
    """
    始点から終点までの変位が鉛直となす角 (rad)。
    小角近似では各点とも L/(2R_E) になります。
    """
    if len(pair) < 2:
        raise ValidationError("傾きの計算には2サンプル以上が必要です。")
    position, _ = _select(pair, point)
    displacement = position[-1] - position[0]
    return float(np.arctan2(np.hypot(displacement[0], displacement[1]), abs(displacement[2])))


def _select(pair: TrajectoryPair, point: int) -> tuple[np.ndarray, np.ndarray]:
    if point == 1:
        return pair.pos1, pair.vel1
    if point == 2:
        return pair.pos2, pair.vel2
    raise ValueError(f"point は 1 または 2 です (point={point})。")


@dataclass(frozen=True)
class StepConvergence:
    """刻み幅を半分にしたときの最終位置の差 (m)。"""
    horizontal: float
    vertical: float


def step_halving_difference(scenario: FallScenario, c: PhysicalConstants | None = None) -> StepConvergence:
    """scenario と、その刻み幅を半分にしたシナリオの最終位置の最大差を返します。"""
    coarse = simulate_pair(scenario, c)
    fine = simulate_pair(scenario.with_step(0.5 * scenario.step), c)
    delta = np.vstack((coarse.pos1[-1] - fine.pos1[-1], coarse.pos2[-1] - fine.pos2[-1]))
    return StepConvergence(
        horizontal=float(np.max(np.abs(delta[:, 0:2]))),
        vertical=float(np.max(np.abs(delta[:, 2]))),
    )
