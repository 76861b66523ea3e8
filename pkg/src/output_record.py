# src/output_record.py

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from src.errors import ValidationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12
# 物理の式ではなく、計算の組み立てに由来する値の出典名
PLUMBING_SOURCE = "artifact plumbing"


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """浮動小数点数を有効数字 digits 桁に丸めます。"""
    if value == 0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def _normalize(value, digits: int):
    # JSON出力用に値を正規化する
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round_significant(float(value), digits)
    if isinstance(value, np.ndarray):
        return [_normalize(item, digits) for item in value.tolist()]
    if isinstance(value, dict):
        return {str(key): _normalize(item, digits) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(item, digits) for item in value]
    return value


@dataclass
class OutputRecord:
    """
    1回の実行結果のレコード。各数値には単位と出典（評価した式）を付けます。
    タイムスタンプは含めないため、同じ入力からはバイト単位で同じ出力になります。
    """
    subcommand: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def add(self, name: str, value, unit: str, source: str = PLUMBING_SOURCE):
        """
        名前付きの結果を追加します。

        Args:
            name (str): 結果の名前。
            value: 値。Fraction は '11/18' の形の文字列で出力されます。
            unit (str): 単位の文字列。無次元量は '1'。
            source (str): 値を与えた式の名前。
        """
        if not unit:
            raise ValidationError(f"結果 '{name}' に単位がありません。")
        if not source:
            raise ValidationError(f"結果 '{name}' に出典がありません。")
        if name in self.results:
            raise ValidationError(f"結果 '{name}' はすでに登録されています。")
        self.results[name] = {'value': value, 'unit': unit, 'source': source}
        if source not in self.provenance:
            self.provenance.append(source)

    def value(self, name: str):
        return self.results[name]['value']

    def to_dict(self, digits: int = SIGNIFICANT_DIGITS) -> dict:
        return {
            'schema_version': self.schema_version,
            'subcommand': self.subcommand,
            'inputs': _normalize(self.inputs, digits),
            'results': _normalize(self.results, digits),
            'provenance': list(self.provenance),
        }

    def to_json(self, digits: int = SIGNIFICANT_DIGITS) -> str:
        return json.dumps(self.to_dict(digits), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self, digits: int = SIGNIFICANT_DIGITS) -> str:
        """名前, 値, 単位, 出典 の4列のCSV。"""
        rows = []
        for name in sorted(self.results):
            entry = self.results[name]
            value = _normalize(entry['value'], digits)
            if isinstance(value, float):
                value = format_number(value, digits)
            elif isinstance(value, (list, dict)):
                value = json.dumps(value, sort_keys=True)
            rows.append((name, value, entry['unit'], entry['source']))
        return render_csv(('name', 'value', 'unit', 'source'), rows, digits)


def format_number(value, digits: int = SIGNIFICANT_DIGITS) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{digits}g}"
    return str(value)


def render_csv(header: Iterable[str], rows: Iterable[Iterable], digits: int = SIGNIFICANT_DIGITS) -> str:
    """ヘッダと行からCSVテキストを作ります。浮動小数点数は有効数字 digits 桁で出力します。"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_number(item, digits) for item in row])
    return buffer.getvalue()


def write_text(path: str | None, text: str, stream=None):
    """path が None なら stream（標準出力）に、そうでなければファイルに書き出します。"""
    if path is None:
        if stream is not None:
            stream.write(text)
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info("%s に出力しました。", path)
