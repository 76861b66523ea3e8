# src/engines/diamagnetic_perturbation.py

import numpy as np

from src.engines.base_perturbation import BasePerturbation, PerturbationResult
from src.errors import DomainError
from src.physical_constants import PhysicalConstants, constants
from src.rydberg import CircularState, MomentMode, effective_transverse_moment


def _diamagnetic_prefactor(state: CircularState, mode: MomentMode, c: PhysicalConstants) -> float:
    # e²⟨x²+y²⟩/8m
    return c.electron_charge ** 2 * effective_transverse_moment(state, mode, c) / (8.0 * c.electron_mass)


def diamagnetic_shift(state: CircularState, B: float, mode: MomentMode = MomentMode.EXACT,
                      c: PhysicalConstants | None = None) -> float:
    """
    ランダウ反磁性項によるエネルギーシフト ΔE_A·A = (e²/8m)⟨x²+y²⟩B² (J)。
    対称ゲージ A = B×r/2、B は z 方向です。
    """
    c = c or constants()
    if B < 0:
        raise DomainError(f"磁場の大きさ B は0以上でなければなりません (B={B})。")
    return _diamagnetic_prefactor(state, mode, c) * B ** 2


def magnetic_force(state: CircularState, grad_B2, mode: MomentMode = MomentMode.EXACT,
                   c: PhysicalConstants | None = None) -> np.ndarray:
    """
    不均一磁場中の力 F = -(e²⟨x²+y²⟩/8m)∇(B²) (N)。常に ∇(B²) と逆向き（低磁場シーカー）です。

    Args:
        grad_B2 (array_like): ∇(B²) の3成分 (T²/m)。
    """
    c = c or constants()
    grad = np.asarray(grad_B2, dtype=float).reshape(3)
    return -_diamagnetic_prefactor(state, mode, c) * grad


class DiamagneticPerturbation(BasePerturbation):
    """A ≠ 0, h = 0 の場合（一様な直流磁場）の摂動エンジン。駆動パラメータは磁場 B (T)。"""
    name = "diamagnetic"

    def landau_frequency(self, drive: float) -> float:
        # eB/2m
        return self.constants.electron_charge * drive / (2.0 * self.constants.electron_mass)

    def energy_shift(self, state: CircularState, drive: float) -> float:
        return diamagnetic_shift(state, drive, self.mode, self.constants)

    def force(self, state: CircularState, grad_B2) -> np.ndarray:
        return magnetic_force(state, grad_B2, self.mode, self.constants)

    def evaluate(self, state: CircularState, B: float, grad_B2=(0.0, 0.0, 0.0)) -> PerturbationResult:
        return PerturbationResult(
            energy_shift=self.energy_shift(state, B),
            force=self.force(state, grad_B2),
        )

    def describe(self) -> dict:
        return {
            'drive': 'B', 'drive_unit': 'T',
            'shift_source': 'Delta E_A.A = e^2 <x^2+y^2> B^2 / 8m',
            'force_source': 'F_A.A = -e^2 <x^2+y^2> grad(B^2) / 8m',
        }
