# src/engines/tidal_perturbation.py

from dataclasses import dataclass
from typing import Callable

import numpy as np

from src.engines.base_perturbation import BasePerturbation, PerturbationResult
from src.errors import DomainError, ValidationError
from src.physical_constants import PhysicalConstants, constants
from src.rydberg import CircularState, MomentMode, effective_transverse_moment

# 水平方向の変位として許容する地球半径に対する比率
MAX_OFFSET_RATIO = 1e-3


@dataclass(frozen=True)
class TidalFieldModel:
    """
    地球の潮汐重力場のモデル。g·R_E² と G·M_E は 0.5% 以内で一致しなければなりません。
    """
    surface_gravity: float
    earth_radius: float
    earth_gm: float

    def __post_init__(self):
        if self.earth_radius <= 0 or self.earth_gm <= 0:
            raise ValidationError("地球半径と G·M_E は正でなければなりません。")
        mismatch = abs(self.surface_gravity * self.earth_radius ** 2 - self.earth_gm) / self.earth_gm
        if mismatch > 5e-3:
            raise ValidationError(f"g·R_E² と G·M_E が一致しません (相対差 {mismatch:.3e})。")

    @classmethod
    def from_constants(cls, c: PhysicalConstants | None = None) -> "TidalFieldModel":
        c = c or constants()
        return cls(c.surface_gravity, c.earth_radius, c.earth_gm)

    def gravity_at(self, r: float) -> float:
        """動径座標 r での重力加速度 G·M_E/r² (m/s²)。"""
        return self.earth_gm / r ** 2


def tidal_field(x: float, y: float, t: float, model: TidalFieldModel | None = None) -> np.ndarray:
    """
    DeWitt の重力ベクトルポテンシャル h(x, y, t) = (g t/R_E)(x, y, 0) (m/s)。
    自由落下する点状粒子が時刻 t に持つ水平速度に等しくなります。
    """
    model = model or TidalFieldModel.from_constants()
    if t < 0:
        raise DomainError(f"時刻 t は0以上でなければなりません (t={t})。")
    limit = MAX_OFFSET_RATIO * model.earth_radius
    if abs(x) > limit or abs(y) > limit:
        raise DomainError(f"水平変位が大きすぎます (|x|,|y| ≤ {limit:.3e} m)。")
    rate = model.surface_gravity * t / model.earth_radius
    return np.array([rate * x, rate * y, 0.0])


def gravitational_shift(state: CircularState, t: float, model: TidalFieldModel | None = None,
                        mode: MomentMode = MomentMode.EXACT, c: PhysicalConstants | None = None) -> float:
    """
    h·h 項によるエネルギーシフト ΔE_h·h = (m/2)⟨x²+y²⟩(g t/R_E)² (J)。
    t は自由落下を開始してからの時間です。断熱性の判定は呼び出し側で行います。
    """
    c = c or constants()
    model = model or TidalFieldModel.from_constants(c)
    if t < 0:
        raise DomainError(f"時刻 t は0以上でなければなりません (t={t})。")
    rate = model.surface_gravity * t / model.earth_radius
    return 0.5 * c.electron_mass * effective_transverse_moment(state, mode, c) * rate ** 2


def energy_shift_at_altitude(state: CircularState, t: float, r: float, model: TidalFieldModel | None = None,
                             mode: MomentMode = MomentMode.EXACT, c: PhysicalConstants | None = None) -> float:
    """
    高さ方向に一般化したシフト (m/2)⟨x²+y²⟩ t² g(r)²/r² = (m/2)⟨x²+y²⟩ t² (GM)²/r⁶ (J)。
    g と R_E をともに場の点の動径座標 r の関数として扱います。
    """
    c = c or constants()
    model = model or TidalFieldModel.from_constants(c)
    if r <= 0:
        raise DomainError(f"動径座標 r は正でなければなりません (r={r})。")
    rate = model.gravity_at(r) * t / r
    return 0.5 * c.electron_mass * effective_transverse_moment(state, mode, c) * rate ** 2


def gravitational_force(state: CircularState, t: float, r: float, model: TidalFieldModel | None = None,
                        mode: MomentMode = MomentMode.EXACT, c: PhysicalConstants | None = None) -> np.ndarray:
    """
    潮汐場による力 F = -∇ΔE_h·h (N)。z 成分が鉛直上向きです。

    -∂/∂r [(m/2)⟨x²+y²⟩t²(GM)²/r⁶] = +3 m⟨x²+y²⟩ t² (GM)²/r⁷ となり、
    原子は点状の粒子よりわずかにゆっくり落下します。
    """
    c = c or constants()
    model = model or TidalFieldModel.from_constants(c)
    if r < model.earth_radius:
        raise DomainError(f"r は地球半径以上でなければなりません (r={r}, R_E={model.earth_radius})。")
    if t < 0:
        raise DomainError(f"時刻 t は0以上でなければなりません (t={t})。")
    moment = effective_transverse_moment(state, mode, c)
    magnitude = 3.0 * c.electron_mass * moment * t ** 2 * model.earth_gm ** 2 / r ** 7
    return np.array([0.0, 0.0, magnitude])


def richardson_derivative(func: Callable[[float], float], x: float, step: float) -> float:
    """
    中心差分をリチャードソン外挿した微分 (誤差 O(h⁴))。

    Args:
        func: 微分する1変数関数。
        x (float): 評価点。
        step (float): 差分の刻み h。
    """
    d_h = (func(x + step) - func(x - step)) / (2.0 * step)
    d_2h = (func(x + 2.0 * step) - func(x - 2.0 * step)) / (4.0 * step)
    return (4.0 * d_h - d_2h) / 3.0


def numerical_force(state: CircularState, t: float, r: float, model: TidalFieldModel | None = None,
                    mode: MomentMode = MomentMode.EXACT, c: PhysicalConstants | None = None,
                    relative_step: float = 1e-3) -> float:
    """高さ一般化シフトの数値微分から求めた鉛直方向の力 -dE/dr (N)。"""
    c = c or constants()
    model = model or TidalFieldModel.from_constants(c)
    shift = lambda radius: energy_shift_at_altitude(state, t, radius, model, mode, c)
    return -richardson_derivative(shift, r, relative_step * r)


def equivalent_magnetic_field(t: float, model: TidalFieldModel | None = None,
                              c: PhysicalConstants | None = None) -> float:
    """
    e·A ↔ m·h の置き換えで、時刻 t の潮汐シフトと同じシフトを与える磁場 B = 2m g t/(e R_E) (T)。
    """
    c = c or constants()
    model = model or TidalFieldModel.from_constants(c)
    return 2.0 * c.electron_mass * model.surface_gravity * t / (c.electron_charge * model.earth_radius)


class TidalPerturbation(BasePerturbation):
    """h ≠ 0, A = 0 の場合（地球の潮汐場中の自由落下）の摂動エンジン。駆動パラメータは落下時間 t (s)。"""
    name = "tidal"

    def __init__(self, c: PhysicalConstants | None = None, mode: MomentMode = MomentMode.EXACT,
                 model: TidalFieldModel | None = None):
        super().__init__(c, mode)
        self.model = model or TidalFieldModel.from_constants(self.constants)

    def landau_frequency(self, drive: float) -> float:
        # g t/R_E
        return self.model.surface_gravity * drive / self.model.earth_radius

    def field(self, x: float, y: float, t: float) -> np.ndarray:
        return tidal_field(x, y, t, self.model)

    def energy_shift(self, state: CircularState, drive: float) -> float:
        return gravitational_shift(state, drive, self.model, self.mode, self.constants)

    def force(self, state: CircularState, t: float, r: float | None = None) -> np.ndarray:
        radius = self.model.earth_radius if r is None else r
        return gravitational_force(state, t, radius, self.model, self.mode, self.constants)

    def evaluate(self, state: CircularState, t: float, r: float | None = None) -> PerturbationResult:
        return PerturbationResult(
            energy_shift=self.energy_shift(state, t),
            force=self.force(state, t, r),
            time_evaluated=t,
        )

    def gradient_mismatch(self, state: CircularState, t: float, r: float) -> float:
        """解析的な力と数値微分の力の相対差を返します。"""
        analytic = self.force(state, t, r)[2]
        numeric = numerical_force(state, t, r, self.model, self.mode, self.constants)
        if analytic == 0.0:
            return abs(numeric)
        return abs(analytic - numeric) / abs(analytic)

    def describe(self) -> dict:
        return {
            'drive': 't', 'drive_unit': 's',
            'shift_source': 'Delta E_h.h = m <x^2+y^2> g^2 t^2 / 2R_E^2',
            'force_source': 'F_h.h = -grad(Delta E_h.h), g and R_E taken at the field point',
        }
