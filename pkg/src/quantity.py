# src/quantity.py

from dataclasses import dataclass

from src.errors import DimensionError

# SI基本単位の並び順 (m, kg, s, A, K, mol, cd)
BASE_UNITS = ("m", "kg", "s", "A", "K", "mol", "cd")

Dimension = tuple[int, int, int, int, int, int, int]

DIMENSIONLESS: Dimension = (0, 0, 0, 0, 0, 0, 0)
LENGTH: Dimension = (1, 0, 0, 0, 0, 0, 0)
MASS: Dimension = (0, 1, 0, 0, 0, 0, 0)
TIME: Dimension = (0, 0, 1, 0, 0, 0, 0)
CURRENT: Dimension = (0, 0, 0, 1, 0, 0, 0)


def dim_mul(a: Dimension, b: Dimension) -> Dimension:
    """次元ベクトルの積（指数の和）。"""
    return tuple(x + y for x, y in zip(a, b))


def dim_pow(a: Dimension, power: int) -> Dimension:
    """次元ベクトルの整数乗。"""
    return tuple(x * power for x in a)


def dim_inv(a: Dimension) -> Dimension:
    return dim_pow(a, -1)


# よく使う組立単位
AREA = dim_pow(LENGTH, 2)
VELOCITY = dim_mul(LENGTH, dim_inv(TIME))
ACCELERATION = dim_mul(LENGTH, dim_pow(TIME, -2))
FORCE = dim_mul(MASS, ACCELERATION)
ENERGY = dim_mul(FORCE, LENGTH)
ACTION = dim_mul(ENERGY, TIME)
CHARGE = dim_mul(CURRENT, TIME)
VOLTAGE = dim_mul(ENERGY, dim_inv(CHARGE))
FREQUENCY = dim_inv(TIME)
MAGNETIC_FLUX = dim_mul(VOLTAGE, TIME)
MAGNETIC_FIELD = dim_mul(MAGNETIC_FLUX, dim_inv(AREA))
MAGNETIC_MOMENT = dim_mul(ENERGY, dim_inv(MAGNETIC_FIELD))
PERMITTIVITY = dim_mul(CHARGE, dim_inv(dim_mul(VOLTAGE, LENGTH)))
DENSITY = dim_mul(MASS, dim_pow(LENGTH, -3))
GRAVITATIONAL_PARAMETER = dim_mul(dim_pow(LENGTH, 3), dim_pow(TIME, -2))
GRAVITATIONAL_CONSTANT = dim_mul(GRAVITATIONAL_PARAMETER, dim_inv(MASS))


def format_dimension(dim: Dimension) -> str:
    """次元ベクトルを 'm^2·kg·s^-2' のような文字列にします。"""
    parts = []
    for unit, exponent in zip(BASE_UNITS, dim):
        if exponent == 0:
            continue
        parts.append(unit if exponent == 1 else f"{unit}^{exponent}")
    return "·".join(parts) if parts else "1"


@dataclass(frozen=True)
class Quantity:
    """
    次元付きの物理量。値はSI単位で保持し、次元はSI基本単位の指数ベクトルで表します。
    加減算は次元が一致しない場合に DimensionError を送出します。
    """
    value: float
    dimension: Dimension = DIMENSIONLESS

    def __post_init__(self):
        if len(self.dimension) != len(BASE_UNITS):
            raise DimensionError(f"次元ベクトルの長さが不正です: {self.dimension}")
        object.__setattr__(self, "dimension", tuple(int(x) for x in self.dimension))

    def _check_same(self, other: "Quantity", op: str):
        if self.dimension != other.dimension:
            raise DimensionError(
                f"次元が一致しないため {op} できません: "
                f"{format_dimension(self.dimension)} と {format_dimension(other.dimension)}"
            )

    @staticmethod
    def _coerce(other) -> "Quantity":
        if isinstance(other, Quantity):
            return other
        if isinstance(other, (int, float)):
            return Quantity(float(other), DIMENSIONLESS)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._check_same(other, "加算")
        return Quantity(self.value + other.value, self.dimension)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._check_same(other, "減算")
        return Quantity(self.value - other.value, self.dimension)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Quantity(self.value * other.value, dim_mul(self.dimension, other.dimension))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Quantity(self.value / other.value, dim_mul(self.dimension, dim_inv(other.dimension)))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, power: int):
        if not isinstance(power, int):
            raise DimensionError("物理量のべき乗は整数指数のみ対応しています。")
        return Quantity(self.value ** power, dim_pow(self.dimension, power))

    def __neg__(self):
        return Quantity(-self.value, self.dimension)

    def sqrt(self) -> "Quantity":
        """平方根。全ての指数が偶数の場合のみ許可します。"""
        if any(x % 2 for x in self.dimension):
            raise DimensionError(f"次元 {format_dimension(self.dimension)} の平方根は取れません。")
        return Quantity(self.value ** 0.5, tuple(x // 2 for x in self.dimension))

    def is_close(self, other: "Quantity", rel: float = 1e-9) -> bool:
        """同じ次元を持ち、相対誤差 rel 以内で一致するかを返します。"""
        self._check_same(other, "比較")
        scale = max(abs(self.value), abs(other.value))
        return scale == 0.0 or abs(self.value - other.value) <= rel * scale

    @property
    def unit(self) -> str:
        return format_dimension(self.dimension)

    def __str__(self):
        return f"{self.value:.12g} {self.unit}"
