# src/scenario_config.py

import json
import logging
from dataclasses import dataclass, field, fields, asdict
from fractions import Fraction

from src.errors import MalformedInputError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CircuitConfig:
    """2つの超伝導キューブ回路のパラメータ。"""
    L_m: float = 0.01
    rho_kg_m3: float = 1.0e4
    alpha: Fraction = Fraction(11, 18)
    beta: Fraction = Fraction(-2, 3)


@dataclass(frozen=True)
class AtomConfig:
    """円軌道リュードベリ原子のパラメータ。"""
    n: int = 100


@dataclass(frozen=True)
class DropConfig:
    """2点自由落下シミュレーションのパラメータ。"""
    height_m: float = 10.0
    duration_s: float = 1.0
    step_s: float = 1.0e-3
    separation_m: float = 1.0


@dataclass(frozen=True)
class CavendishConfig:
    """回転するレンガ山（重力源）と検出系のパラメータ。"""
    brick_mass_kg: float = 500.0
    orbit_radius_m: float = 0.5
    rotation_hz: float = 0.01
    noise_rms: float = 1.0e-14
    pile_count: int = 2
    record_s: float = 1000.0
    sample_hz: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    """
    全モジュールで共有するシナリオ設定。
    JSONドキュメントの各セクション (circuit / atom / drop / cavendish) に対応します。
    """
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    atom: AtomConfig = field(default_factory=AtomConfig)
    drop: DropConfig = field(default_factory=DropConfig)
    cavendish: CavendishConfig = field(default_factory=CavendishConfig)

    @property
    def cube_edge(self) -> float:
        return self.circuit.L_m

    @property
    def density(self) -> float:
        return self.circuit.rho_kg_m3

    @property
    def principal_n(self) -> int:
        return self.atom.n


SECTION_TYPES = {
    'circuit': CircuitConfig,
    'atom': AtomConfig,
    'drop': DropConfig,
    'cavendish': CavendishConfig,
}

# 厳密に正でなければならない項目
_STRICTLY_POSITIVE = {
    'circuit.L_m', 'circuit.rho_kg_m3', 'atom.n',
    'drop.duration_s', 'drop.step_s',
    'cavendish.brick_mass_kg', 'cavendish.orbit_radius_m', 'cavendish.rotation_hz',
    'cavendish.pile_count', 'cavendish.record_s', 'cavendish.sample_hz',
}
# 0を許す項目
_NON_NEGATIVE = {'drop.height_m', 'drop.separation_m', 'cavendish.noise_rms'}


def _parse_value(key: str, expected_type: type, raw):
    """JSONの値を設定項目の型に変換します。変換できない場合はキー名付きで例外を送出します。"""
    if expected_type is Fraction:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise MalformedInputError(f"'{key}' は '11/18' のような有理数の文字列で指定してください。", key)
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise MalformedInputError(f"'{key}' の値 '{raw}' を有理数として解釈できません。", key)
    if expected_type is int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise MalformedInputError(f"'{key}' には整数を指定してください (値: {raw!r})。", key)
        return raw
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise MalformedInputError(f"'{key}' には数値を指定してください (値: {raw!r})。", key)
    return float(raw)


def _validate(key: str, value):
    if key in _STRICTLY_POSITIVE and not value > 0:
        raise ValidationError(f"'{key}' は正の値でなければなりません (値: {value})。")
    if key in _NON_NEGATIVE and value < 0:
        raise ValidationError(f"'{key}' は0以上でなければなりません (値: {value})。")
    if key == 'circuit.alpha' and value <= 0:
        raise ValidationError(f"'circuit.alpha' は正でなければなりません (値: {value})。")
    if key == 'circuit.beta' and value == 0:
        raise ValidationError("'circuit.beta' は0以外でなければなりません。")


def config_from_dict(document: dict) -> ScenarioConfig:
    """
    辞書からシナリオ設定を組み立てます。未知のキーは受け付けません。

    Args:
        document (dict): トップレベルがセクション名の辞書。

    Returns:
        ScenarioConfig: 検証済みの設定。

    Raises:
        MalformedInputError: 未知のキー、型の不一致。
        ValidationError: 物理量の符号条件違反。
    """
    if not isinstance(document, dict):
        raise MalformedInputError("設定ドキュメントのトップレベルはオブジェクトでなければなりません。")

    sections = {}
    for section_name, raw_section in document.items():
        if section_name not in SECTION_TYPES:
            raise MalformedInputError(f"未知のセクションです: '{section_name}'", section_name)
        if not isinstance(raw_section, dict):
            raise MalformedInputError(f"セクション '{section_name}' はオブジェクトでなければなりません。", section_name)

        section_type = SECTION_TYPES[section_name]
        known = {f.name: f.type for f in fields(section_type)}
        values = {}
        for key, raw in raw_section.items():
            full_key = f"{section_name}.{key}"
            if key not in known:
                raise MalformedInputError(f"未知のキーです: '{full_key}'", full_key)
            value = _parse_value(full_key, known[key], raw)
            _validate(full_key, value)
            values[key] = value
        sections[section_name] = section_type(**values)

    return ScenarioConfig(**sections)


def load_config(source: str) -> ScenarioConfig:
    """
    JSONテキストからシナリオ設定を読み込み、省略された項目をデフォルト値で補います。
    空のドキュメントは全てデフォルト値の設定になります。

    Args:
        source (str): JSONテキスト。

    Returns:
        ScenarioConfig: 検証済みの設定。
    """
    if not source.strip():
        logger.info("設定ドキュメントが空のため、デフォルト値を使用します。")
        return ScenarioConfig()
    try:
        document = json.loads(source)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"設定ドキュメントのJSON解析に失敗しました (行 {e.lineno}, 列 {e.colno}): {e.msg}")
    return config_from_dict(document)


def load_config_file(path: str) -> ScenarioConfig:
    """ファイルパスからシナリオ設定を読み込みます。"""
    with open(path, 'r', encoding='utf-8-sig') as f:
        return load_config(f.read())


def config_to_dict(config: ScenarioConfig) -> dict:
    """設定を JSON 化可能な辞書にします。有理数は '11/18' 形式の文字列になります。"""
    document = {}
    for section_name in SECTION_TYPES:
        section = asdict(getattr(config, section_name))
        document[section_name] = {
            key: str(value) if isinstance(value, Fraction) else value
            for key, value in section.items()
        }
    return document


def serialize_config(config: ScenarioConfig) -> str:
    """設定を正規化したJSONテキストにします（キー順固定、全項目出力）。"""
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
