# src/physical_constants.py

import logging
import math
from dataclasses import dataclass

from scipy import constants as sp

from src.errors import ValidationError
from src import quantity as q

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysicalConstants:
    """
    計算全体で共有する物理定数（SI単位）。
    SIの定義値（e, h）は scipy.constants から、測定値は CODATA-2018 の値で固定しています。
    換算プランク定数は h/2π として計算し、a₀ や μ_B との整合性を桁落ちなく保ちます。
    """
    # 電気素量 (C)、定義値
    electron_charge: float = sp.e
    # 電子質量 (kg)
    electron_mass: float = 9.1093837015e-31
    # プランク定数 (J·s)、定義値
    planck: float = sp.h
    # 換算プランク定数 (J·s)
    reduced_planck: float = sp.h / (2.0 * math.pi)
    # 真空の誘電率 (F/m)
    vacuum_permittivity: float = 8.8541878128e-12
    # ボーア半径 (m)
    bohr_radius: float = 5.29177210903e-11
    # ボーア磁子 (J/T)
    bohr_magneton: float = 9.2740100783e-24
    # 磁束量子 h/2e (Wb)
    flux_quantum: float = sp.h / (2.0 * sp.e)
    # 万有引力定数 (m³·kg⁻¹·s⁻²)
    gravitational_constant: float = 6.67430e-11
    # 標準重力加速度 (m/s²)
    surface_gravity: float = 9.80665
    # 地球の平均半径 (m)
    earth_radius: float = 6.371e6
    # 地球の質量 (kg)
    earth_mass: float = 5.9722e24
    # リュードベリ周波数 R∞c (Hz)
    rydberg_frequency: float = 3.2898419602508e15

    @property
    def coulomb_constant(self) -> float:
        """1/(4πε₀) (N·m²/C²)"""
        return 1.0 / (4.0 * math.pi * self.vacuum_permittivity)

    @property
    def earth_gm(self) -> float:
        """地心重力定数 G·M_E (m³/s²)"""
        return self.gravitational_constant * self.earth_mass

    def quantity(self, name: str) -> q.Quantity:
        """
        指定された定数を次元付きの Quantity として返します。

        Args:
            name (str): フィールド名 (例: 'bohr_radius')。

        Returns:
            Quantity: 値と次元ベクトル。
        """
        if name not in CONSTANT_DIMENSIONS:
            raise KeyError(f"未知の定数名です: {name}")
        return q.Quantity(getattr(self, name), CONSTANT_DIMENSIONS[name])


CONSTANT_DIMENSIONS = {
    'electron_charge': q.CHARGE,
    'electron_mass': q.MASS,
    'planck': q.ACTION,
    'reduced_planck': q.ACTION,
    'vacuum_permittivity': q.PERMITTIVITY,
    'bohr_radius': q.LENGTH,
    'bohr_magneton': q.MAGNETIC_MOMENT,
    'flux_quantum': q.MAGNETIC_FLUX,
    'gravitational_constant': q.GRAVITATIONAL_CONSTANT,
    'surface_gravity': q.ACCELERATION,
    'earth_radius': q.LENGTH,
    'earth_mass': q.MASS,
    'rydberg_frequency': q.FREQUENCY,
}

# 定数の組はプロセス内で一つだけ
_PINNED = PhysicalConstants()


def constants() -> PhysicalConstants:
    """固定された定数の組を返します。何度呼び出しても同じオブジェクトです。"""
    return _PINNED


def dimension(name: str) -> q.Dimension:
    """定数名に対応する次元ベクトルを返します。"""
    return CONSTANT_DIMENSIONS[name]


def consistency_report(c: PhysicalConstants) -> dict[str, float]:
    """
    定数同士の整合関係について相対誤差を計算します。

    Returns:
        dict[str, float]: 関係名 → 相対誤差。
    """
    four_pi_eps0 = 4.0 * math.pi * c.vacuum_permittivity
    a0_derived = c.reduced_planck ** 2 * four_pi_eps0 / (c.electron_mass * c.electron_charge ** 2)
    mu_b_derived = c.electron_charge * c.reduced_planck / (2.0 * c.electron_mass)
    g_newton = c.earth_gm / c.earth_radius ** 2
    return {
        'bohr_radius': abs(a0_derived - c.bohr_radius) / c.bohr_radius,
        'bohr_magneton': abs(mu_b_derived - c.bohr_magneton) / c.bohr_magneton,
        'flux_quantum': abs(c.planck / (2.0 * c.electron_charge) - c.flux_quantum) / c.flux_quantum,
        'surface_gravity': abs(g_newton - c.surface_gravity) / c.surface_gravity,
    }


# 関係名ごとの許容相対誤差
CONSISTENCY_TOLERANCES = {
    'bohr_radius': 1e-9,
    'bohr_magneton': 1e-9,
    'flux_quantum': 0.0,
    'surface_gravity': 5e-3,
}


def verify_consistency(c: PhysicalConstants | None = None) -> None:
    """
    定数の自己整合性を検証します。起動時に呼び出されます。

    Raises:
        ValidationError: いずれかの関係が許容誤差を超えた場合。
    """
    c = c or constants()
    for relation, error in consistency_report(c).items():
        if error > CONSISTENCY_TOLERANCES[relation]:
            raise ValidationError(
                f"定数の整合性チェックに失敗しました: {relation} (相対誤差 {error:.3e})"
            )
    logger.debug("物理定数の整合性を確認しました。")