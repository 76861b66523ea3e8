# src/engines/base_perturbation.py

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from src.physical_constants import PhysicalConstants, constants
from src.rydberg import CircularState, MomentMode, effective_transverse_moment


@dataclass(frozen=True)
class PerturbationResult:
    """一次摂動のエネルギーシフト (J)、力のベクトル (N)、評価時刻 (s)。"""
    energy_shift: float
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    time_evaluated: float = 0.0


class BasePerturbation(ABC):
    """
    DeWitt ハミルトニアンの二次項（A·A 項、h·h 項）を扱う摂動エンジンの抽象基底クラス。
    どちらの項も x²+y² に比例するランダウ型の二次形式で、
    ΔE = (m/2) ω² ⟨x²+y²⟩ と書ける角周波数 ω を各エンジンが定義します。
    """
    # PerturbationManager に登録する名前
    name = "base"

    def __init__(self, c: PhysicalConstants | None = None, mode: MomentMode = MomentMode.EXACT):
        """
        Args:
            c (PhysicalConstants): 使用する物理定数。
            mode (MomentMode): ⟨x²+y²⟩ を厳密値で評価するか a_n² 近似で評価するか。
        """
        self.constants = c or constants()
        self.mode = mode

    def moment(self, state: CircularState) -> float:
        """このエンジンのモードで評価した ⟨x²+y²⟩ (m²)。"""
        return effective_transverse_moment(state, self.mode, self.constants)

    @abstractmethod
    def landau_frequency(self, drive: float) -> float:
        """
        駆動パラメータ（磁場 B や落下時間 t）に対応する角周波数 ω (rad/s) を返します。
        """
        pass

    @abstractmethod
    def energy_shift(self, state: CircularState, drive: float) -> float:
        """
        一次摂動論によるエネルギーシフト (J) を返します。

        Args:
            state (CircularState): 円軌道状態。
            drive (float): 駆動パラメータ。
        """
        pass

    @abstractmethod
    def describe(self) -> dict:
        """出力レコード用に、駆動パラメータの名前と単位、対応する式の名前を返します。"""
        pass
