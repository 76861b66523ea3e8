# src/perturbation_manager.py

import logging
import threading

from src.engines.diamagnetic_perturbation import DiamagneticPerturbation
from src.engines.tidal_perturbation import TidalPerturbation
from src.physical_constants import PhysicalConstants, constants
from src.rydberg import CircularState, MomentMode

logger = logging.getLogger(__name__)


class PerturbationManager:
    """
    アプリケーション全体で使う摂動エンジンを名前で管理するクラス。
    パラメータ掃引を複数スレッドで並行計算し、結果は入力の順番どおりに返します。
    """

    PERTURBATION_MAP = {
        'diamagnetic': DiamagneticPerturbation,
        'tidal': TidalPerturbation,
    }

    def __init__(self, c: PhysicalConstants | None = None, mode: MomentMode = MomentMode.EXACT,
                 max_workers: int = 4):
        """
        Args:
            c (PhysicalConstants): 全エンジン共通の物理定数。
            mode (MomentMode): ⟨x²+y²⟩ の評価モード。
            max_workers (int): 掃引に使うスレッド数の上限。
        """
        self.constants = c or constants()
        self.mode = mode
        self.max_workers = max(1, max_workers)
        self.engines = {}
        self.lock = threading.Lock()

    def get_engine(self, engine_name: str):
        """
        指定された名前のエンジンインスタンスを返します。初回呼び出し時に生成してキャッシュします。
        """
        key = engine_name.lower()
        with self.lock:
            if key not in self.engines:
                if key not in self.PERTURBATION_MAP:
                    raise KeyError(f"未知の摂動エンジンです: '{engine_name}' (候補: {sorted(self.PERTURBATION_MAP)})")
                EngineClass = self.PERTURBATION_MAP[key]
                self.engines[key] = EngineClass(self.constants, self.mode)
                logger.debug("摂動エンジン '%s' を初期化しました (モード: %s)。", key, self.mode.value)
            return self.engines[key]

    def sweep(self, engine_name: str, state: CircularState, drives: list[float]) -> list[float]:
        """
        駆動パラメータの列に対するエネルギーシフトを並行計算します。

        Args:
            engine_name (str): 'diamagnetic' または 'tidal'。
            state (CircularState): 円軌道状態。
            drives (list[float]): 磁場 B または時刻 t の列。

        Returns:
            list[float]: drives と同じ順番のエネルギーシフト (J)。
        """
        engine = self.get_engine(engine_name)
        drives = list(drives)
        results = [None] * len(drives)
        errors = []
        lock = threading.Lock()

        # 入力を連続したチャンクに分け、各スレッドが自分の添字の結果だけを書き込む
        worker_count = min(self.max_workers, max(1, len(drives)))
        chunk = -(-len(drives) // worker_count) if drives else 0

        def worker(start: int, stop: int):
            try:
                for index in range(start, stop):
                    results[index] = engine.energy_shift(state, drives[index])
            except Exception as e:
                with lock:
                    errors.append(e)

        threads = []
        for start in range(0, len(drives), chunk or 1):
            thread = threading.Thread(target=worker, args=(start, min(start + chunk, len(drives))))
            threads.append(thread)
            thread.start()

        for thread in threads:
            thread.join()

        if errors:
            raise errors[0]
        logger.debug("'%s' の掃引を %d 点で完了しました。", engine_name, len(drives))
        return results
