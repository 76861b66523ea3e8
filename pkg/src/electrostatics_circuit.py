# src/electrostatics_circuit.py

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from scipy.optimize import brentq

from src.errors import DomainError, SingularityError, ValidationError
from src.physical_constants import PhysicalConstants, constants

logger = logging.getLogger(__name__)

Position = tuple[Fraction, Fraction, Fraction]

# 文献値の β
PUBLISHED_BETA = Fraction(-2, 3)
DEFAULT_ALPHA = Fraction(11, 18)


def _as_position(raw) -> Position:
    if isinstance(raw, (int, Fraction)):
        return (Fraction(raw), Fraction(0), Fraction(0))
    if len(raw) != 3:
        raise ValidationError(f"位置は1次元の有理数か3成分の組で指定してください (値: {raw!r})。")
    return tuple(Fraction(component) for component in raw)


@dataclass(frozen=True)
class PointCharge:
    """
    点電荷。電荷は Q の有理数倍、位置は L の有理数倍で表します。
    1次元の位置を渡した場合はダンベルの軸 (x軸) 上に置かれます。
    """
    charge: Fraction
    position: Position

    def __post_init__(self):
        object.__setattr__(self, 'charge', Fraction(self.charge))
        object.__setattr__(self, 'position', _as_position(self.position))


def _validate_configuration(config: Sequence[PointCharge]):
    seen = set()
    for charge in config:
        if charge.position in seen:
            raise SingularityError(f"同じ位置に2つの電荷があります: {charge.position}")
        seen.add(charge.position)


def _exact_distance(delta: Position) -> Fraction:
    """有理数座標の差から厳密な距離を返します。平方根が有理数にならない場合は例外を送出します。"""
    nonzero = [component for component in delta if component != 0]
    if len(nonzero) == 1:
        return abs(nonzero[0])
    squared = sum(component * component for component in delta)
    num_root = math.isqrt(squared.numerator)
    den_root = math.isqrt(squared.denominator)
    if num_root * num_root != squared.numerator or den_root * den_root != squared.denominator:
        raise DomainError(f"距離の2乗 {squared} が有理数の平方ではないため、厳密に計算できません。")
    return Fraction(num_root, den_root)


def axial_force(config: Sequence[PointCharge], on_group: Iterable[int], axis: int = 0) -> Fraction:
    """
    on_group の電荷が残りの電荷から受ける力の axis 成分 (kQ²/L² 単位、符号付き)。

    Args:
        config: 電荷の配置。
        on_group: 力を求める電荷の添字。
        axis (int): 力の成分 (0=x, 1=y, 2=z)。

    Returns:
        Fraction: 正の値は座標軸の正の向きです。
    """
    config = list(config)
    group = _group_indices(config, on_group)
    _validate_configuration(config)

    total = Fraction(0)
    for i in group:
        for j, other in enumerate(config):
            if j in group:
                continue
            delta = tuple(a - b for a, b in zip(config[i].position, other.position))
            distance = _exact_distance(delta)
            total += config[i].charge * other.charge * delta[axis] / distance ** 3
    return total


def _group_indices(config: Sequence[PointCharge], on_group: Iterable[int]) -> frozenset[int]:
    group = frozenset(on_group)
    if not group:
        raise ValidationError("力を求める電荷のグループが空です。")
    invalid = [index for index in group if not 0 <= index < len(config)]
    if invalid:
        raise ValidationError(f"電荷の添字が範囲外です: {sorted(invalid)}")
    return group


def coulomb_force(config: Sequence[PointCharge], on_group: Iterable[int], axis: int = 0) -> Fraction:
    """
    グループに働く正味のクーロン力 (kQ²/L² 単位)。
    正の値は斥力、すなわち他方のグループから遠ざかる向きです。
    2つのグループの axis 方向の中心が一致すると向きが決まらないため、ValidationError を送出します。
    """
    config = list(config)
    group = _group_indices(config, on_group)
    raw = axial_force(config, group, axis)
    others = [charge for index, charge in enumerate(config) if index not in group]
    if not others:
        return raw

    own_center = sum(config[i].position[axis] for i in group) / len(group)
    other_center = sum(charge.position[axis] for charge in others) / len(others)
    if own_center == other_center:
        raise ValidationError(f"2つのグループの中心が一致しているため斥力の向きが定まりません (中心: {own_center})。")
    if own_center < other_center:
        return -raw
    return raw


@dataclass(frozen=True)
class DumbbellPair:
    """
    2つのダンベル。各ダンベルは (外側の球, 内側の球) の組で、外側から内側の順に並べます。
    標準配置: 左 (-Q at 0, +Q at L)、右 (+Q at 2L, -Q at 3L)。
    """
    left: tuple[PointCharge, PointCharge]
    right: tuple[PointCharge, PointCharge]

    def __post_init__(self):
        for name, dumbbell in (('左', self.left), ('右', self.right)):
            if sum(charge.charge for charge in dumbbell) != 0:
                raise ValidationError(f"{name}のダンベルの総電荷が0ではありません。")
        _validate_configuration(self.charges())

        center = sum(charge.position[0] for charge in self.charges()) / 4
        mirrored = {(charge.charge, 2 * center - charge.position[0]) for charge in self.charges()}
        actual = {(charge.charge, charge.position[0]) for charge in self.charges()}
        if mirrored != actual:
            raise ValidationError("ダンベルの配置が中点に関して鏡映対称ではありません。")

    @classmethod
    def canonical(cls) -> "DumbbellPair":
        return cls(
            left=(PointCharge(-1, 0), PointCharge(1, 1)),
            right=(PointCharge(1, 2), PointCharge(-1, 3)),
        )

    def charges(self) -> list[PointCharge]:
        """左外側, 左内側, 右内側, 右外側 の順の電荷の列。"""
        return [self.left[0], self.left[1], self.right[0], self.right[1]]

    @property
    def right_indices(self) -> tuple[int, int]:
        return (2, 3)


def alpha_constant() -> Fraction:
    """標準配置で右のダンベルに働く力 α (kQ²/L² 単位)。厳密に 11/18 になります。"""
    pair = DumbbellPair.canonical()
    return coulomb_force(pair.charges(), pair.right_indices)


class VoltageConvention(Enum):
    """ダンベル両端の電位差をとる規約。"""
    ALL_OTHER_CHARGES = ("all-other-charges", "各端の電位に、その端以外の3つの電荷すべてを含める")
    OTHER_DUMBBELL_ONLY = ("other-dumbbell-only", "もう一方のダンベルの2つの電荷だけを含める")
    PARTNER_ONLY = ("partner-only", "同じダンベルの相手の電荷だけを含める")
    MIDPOINT_NEAREST_CHARGE = ("midpoint-nearest-charge", "中点に最も近い、もう一方のダンベルの内側の電荷だけを含める")

    def __init__(self, label: str, description: str):
        self.label = label
        self.description = description

    @classmethod
    def from_label(cls, label: str) -> "VoltageConvention":
        for convention in cls:
            if convention.label == label:
                return convention
        raise ValidationError(f"未知の電圧規約です: '{label}'")


@dataclass(frozen=True)
class VoltageResult:
    """規約名付きの電位差 (kQ/L 単位)。"""
    value: Fraction
    convention: VoltageConvention


def _potential(point: Position, sources: Iterable[PointCharge]) -> Fraction:
    total = Fraction(0)
    for source in sources:
        delta = tuple(a - b for a, b in zip(point, source.position))
        distance = _exact_distance(delta)
        if distance == 0:
            raise SingularityError(f"電荷の位置で電位を評価しようとしました: {point}")
        total += source.charge / distance
    return total


def dumbbell_voltage(pair: DumbbellPair, convention: VoltageConvention) -> VoltageResult:
    """
    左のダンベルの両端の電位差 V(内側の端) - V(外側の端) を指定の規約で求めます。

    Args:
        pair (DumbbellPair): ダンベルの配置。
        convention (VoltageConvention): どの電荷を電位に含めるか。

    Returns:
        VoltageResult: kQ/L 単位の厳密な有理数と規約名。
    """
    outer, inner = pair.left
    if convention is VoltageConvention.ALL_OTHER_CHARGES:
        everything = pair.charges()
        outer_sources = [charge for charge in everything if charge is not outer]
        inner_sources = [charge for charge in everything if charge is not inner]
    elif convention is VoltageConvention.OTHER_DUMBBELL_ONLY:
        outer_sources = inner_sources = list(pair.right)
    elif convention is VoltageConvention.PARTNER_ONLY:
        outer_sources, inner_sources = [inner], [outer]
    else:
        outer_sources = inner_sources = [pair.right[0]]

    value = _potential(inner.position, inner_sources) - _potential(outer.position, outer_sources)
    return VoltageResult(value, convention)


@dataclass(frozen=True)
class BetaCandidates:
    """全ての規約による β の候補値と、文献値との食い違いの有無。"""
    values: dict
    published: Fraction
    discrepancy: bool


def beta_candidates(pair: DumbbellPair | None = None) -> BetaCandidates:
    """
    全ての電圧規約で電位差を計算します。文献値で置き換えることはしません。
    """
    pair = pair or DumbbellPair.canonical()
    values = {convention.label: dumbbell_voltage(pair, convention).value for convention in VoltageConvention}
    discrepancy = PUBLISHED_BETA not in values.values()
    if discrepancy:
        logger.info("どの電圧規約も β = %s を再現しません (候補: %s)。",
                    PUBLISHED_BETA, ", ".join(f"{k}={v}" for k, v in values.items()))
    return BetaCandidates(values, PUBLISHED_BETA, discrepancy)


@dataclass(frozen=True)
class DominanceReport:
    """右のダンベルに働く力の項別内訳 (kQ²/L² 単位)。"""
    innermost_term: Fraction
    other_terms_sum: Fraction
    other_terms_abs_sum: Fraction
    repulsive: bool


def innermost_dominance(pair: DumbbellPair | None = None) -> DominanceReport:
    """内側の +Q 同士の項が、残りの3項の和より大きいことを確かめるための内訳を返します。"""
    pair = pair or DumbbellPair.canonical()
    charges = pair.charges()
    terms = {}
    for i in (0, 1):
        for j in pair.right_indices:
            terms[(i, j)] = axial_force([charges[i], charges[j]], [1])
    innermost = terms.pop((1, 2))
    other_sum = sum(terms.values(), Fraction(0))
    other_abs = sum((abs(term) for term in terms.values()), Fraction(0))
    return DominanceReport(innermost, other_sum, other_abs, innermost + other_sum > 0)


def tidal_force_on_cube(rho: float, L: float, c: PhysicalConstants | None = None) -> float:
    """
    一辺 L のキューブに働く潮汐力 F = M·g' = ρL³·gL/R_E = ρgL⁴/R_E (N)。
    """
    c = c or constants()
    if rho < 0 or L < 0:
        raise DomainError(f"密度と辺の長さは0以上でなければなりません (rho={rho}, L={L})。")
    return rho * c.surface_gravity * L ** 4 / c.earth_radius


def freefall_voltage_scale(rho: float, L: float, c: PhysicalConstants | None = None) -> float:
    """自由落下の特性電圧 V_F-F = √(ρgL⁴/(4πε₀R_E)) (V)。"""
    c = c or constants()
    return math.sqrt(tidal_force_on_cube(rho, L, c) * c.coulomb_constant)


def capacitance_scale(L: float, c: PhysicalConstants | None = None) -> float:
    """大きさ L の導体の静電容量の目安 4πε₀L (F)。実際の形状は考慮しません。"""
    c = c or constants()
    if L <= 0:
        raise DomainError(f"L は正でなければなりません (L={L})。")
    return 4.0 * math.pi * c.vacuum_permittivity * L


@dataclass(frozen=True)
class EquilibriumResult:
    """
    クーロン力と潮汐力がつり合うときの電荷と電圧。
    V は大きさで、β の符号は beta_sign に別に持ちます。
    """
    Q: float
    V: float
    F_coulomb: float
    F_tidal: float
    residual: float
    alpha: Fraction
    beta: Fraction
    beta_sign: int

    def to_record(self) -> dict:
        """JSON出力用のレコード。"""
        return {
            'alpha': str(self.alpha),
            'Q_coulomb': self.Q,
            'V_volt': self.V,
            'F_tidal_newton': self.F_tidal,
            'residual': self.residual,
            'beta_convention': f"input beta={self.beta} (magnitude used, sign {'+' if self.beta_sign > 0 else '-'})",
        }


def equilibrium_solve(rho: float, L: float, alpha: Fraction = DEFAULT_ALPHA, beta: Fraction = PUBLISHED_BETA,
                      c: PhysicalConstants | None = None) -> EquilibriumResult:
    """
    αkQ²/L² = ρgL⁴/R_E を Q について解き、V = |β|kQ/L を求めます。
    閉じた式で解いた後、brentq による数値解と照合します。

    Args:
        rho (float): キューブの密度 (kg/m³)。
        L (float): キューブの辺の長さ (m)。
        alpha (Fraction): 力の係数 α (> 0)。
        beta (Fraction): 電圧の係数 β (≠ 0)。
        c (PhysicalConstants): 物理定数。

    Returns:
        EquilibriumResult: つり合いの解。
    """
    c = c or constants()
    alpha, beta = Fraction(alpha), Fraction(beta)
    if alpha <= 0:
        raise DomainError(f"α は正でなければなりません (alpha={alpha})。")
    if beta == 0:
        raise DomainError("β は0以外でなければなりません。")
    if rho <= 0 or L <= 0:
        raise DomainError(f"密度と辺の長さは正でなければなりません (rho={rho}, L={L})。")

    k = c.coulomb_constant
    f_tidal = tidal_force_on_cube(rho, L, c)
    stiffness = float(alpha) * k / L ** 2
    charge = math.sqrt(f_tidal / stiffness)

    if charge > 0:
        # Q を閉じた式の解で規格化して s = 1 を数値的に探す
        scaled_root = brentq(lambda s: stiffness * (s * charge) ** 2 / f_tidal - 1.0, 0.5, 2.0, xtol=1e-14)
        if abs(scaled_root - 1.0) > 1e-9:
            raise ValidationError(f"閉じた式と数値解が一致しません (相対差 {abs(scaled_root - 1.0):.3e})。")

    f_coulomb = stiffness * charge ** 2
    residual = abs(f_coulomb - f_tidal) / f_tidal if f_tidal > 0 else 0.0
    voltage = float(abs(beta)) * k * charge / L
    logger.debug("つり合い: Q=%.6e C, V=%.6e V, 残差=%.1e", charge, voltage, residual)
    return EquilibriumResult(
        Q=charge, V=voltage, F_coulomb=f_coulomb, F_tidal=f_tidal, residual=residual,
        alpha=alpha, beta=beta, beta_sign=1 if beta > 0 else -1,
    )
