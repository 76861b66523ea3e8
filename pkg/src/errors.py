# src/errors.py

class WorkbenchError(Exception):
    """
    ワークベンチ内の全てのエラーの基底クラス。
    アプリケーション層はこのクラスを捕捉して終了コード1に変換します。
    """
    pass


class DomainError(WorkbenchError, ValueError):
    """引数が物理的・数学的な定義域の外にある場合のエラー。"""
    pass


class ValidationError(WorkbenchError, ValueError):
    """設定値が検証に失敗した場合のエラー（負の長さなど）。"""
    pass


class MalformedInputError(WorkbenchError, ValueError):
    """設定ドキュメントが解析できない場合のエラー。問題のキー名を保持します。"""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class DimensionError(WorkbenchError, TypeError):
    """次元の異なる物理量同士を加減算しようとした場合のエラー。"""
    pass


class UndersampledError(WorkbenchError):
    """位相ループのサンプリングが粗すぎて巻き数が確定できない場合のエラー。"""
    pass


class SingularityError(WorkbenchError, ZeroDivisionError):
    """点電荷・点質量が評価点と一致して場が発散する場合のエラー。"""
    pass


class TruncatedTrajectoryError(WorkbenchError):
    """
    積分の途中で地表に到達した場合のエラー。
    そこまでの軌道を partial に保持します。
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientDataError(WorkbenchError):
    """同期検波に必要な長さの記録がない場合のエラー。"""
    pass


class SmallAngleViolationError(WorkbenchError):
    """振り子の小角近似が成り立たない大きさの加速度が与えられた場合のエラー。"""
    pass
