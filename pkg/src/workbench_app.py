# src/workbench_app.py

import argparse
import logging
import os
import sys
from configparser import ConfigParser, NoOptionError, NoSectionError

import numpy as np

from src import cavendish as cav
from src import electrostatics_circuit as ec
from src import freefall_sim as ff
from src import rydberg as ry
from src.engines import diamagnetic_perturbation as dia
from src.engines import tidal_perturbation as tidal
from src.errors import TruncatedTrajectoryError, ValidationError, WorkbenchError
from src.output_record import OutputRecord, render_csv, write_text, PLUMBING_SOURCE
from src.perturbation_manager import PerturbationManager
from src.physical_constants import constants, verify_consistency
from src.reproduction_report import reproduce_paper
from src.run_log_manager import RunLogManager
from src.scenario_config import ScenarioConfig, config_to_dict, load_config_file

logger = logging.getLogger(__name__)

# 式の出典名
SRC_RING_RADIUS = "a_n = n^2 a0"
SRC_MOMENT = "<x^2+y^2> = n^3(n+1) a0^2"
SRC_MOMENT_APPROX = "<x^2+y^2> ~ a_n^2"
SRC_R2 = "<r^2> = n^2(n+1)(2n+1) a0^2 / 2"
SRC_MU = "mu_n = n mu_B"
SRC_FLUX = "Phi_n = n h/2e"
SRC_RYDBERG = "f = R c (1/n_l^2 - 1/n_u^2)"
SRC_ADIABATIC = "f_pert * margin < f_gap"
SRC_DIA = "Delta E_A.A = e^2 B^2 <x^2+y^2> / 8m"
SRC_GRAV = "Delta E_h.h = m <x^2+y^2> g^2 t^2 / 2R_E^2"
SRC_EQUIV_B = "e A <-> m h"
SRC_FORCE = "F_h.h = -grad(Delta E_h.h)"
SRC_THETA = "theta ~ L/R_E"
SRC_GPRIME = "g' = g L/R_E"
SRC_ALPHA = "F_Coulomb = alpha Q^2/(4 pi eps0 L^2)"
SRC_BETA = "V = beta Q/(4 pi eps0 L)"
SRC_TIDAL = "F_Tidal = M g'"
SRC_EQUILIBRIUM = "F_Coulomb = F_Tidal"
SRC_VFF = "V_F-F = sqrt(rho g L^4/(4 pi eps0 R_E))"
SRC_OUTCOME = "outcome table (I)-(IV)"


class WorkbenchApp:
    """
    アプリケーション全体を制御するメインクラス。
    設定の読み込み、ログの準備、サブコマンドの振り分けと結果の出力を受け持ちます。
    """
    CONFIG_FILE_NAME = 'config.ini'

    # config.ini に項目がない場合のデフォルト値
    DEFAULT_SETTINGS = {
        'OUTPUT': {'SIGNIFICANT_DIGITS': '12', 'SCHEMA_VERSION': '1'},
        'LOGGING': {'LEVEL': 'INFO', 'RUN_LOG_PATH': 'savedata/run_history.log', 'RUN_LOG_LIMIT': '200'},
    }

    def __init__(self, app_root_dir: str, current_version: str, config_path: str | None = None):
        """
        Args:
            app_root_dir (str): 相対パスの基準になるディレクトリ。
            current_version (str): アプリケーションのバージョン。
            config_path (str): config.ini のパス。省略時は app_root_dir 直下。
        """
        self.app_root_dir = app_root_dir
        self.current_version = current_version
        self.config_path = config_path or os.path.join(app_root_dir, self.CONFIG_FILE_NAME)

        self.config = ConfigParser()
        self.config.optionxform = str
        self.config.read(self.config_path, encoding='utf-8-sig')
        self._fill_default_settings()
        self._setup_logging()
        self._load_config_values()

        self.constants = constants()
        verify_consistency(self.constants)

        run_log_path = self.config.get('LOGGING', 'RUN_LOG_PATH').strip()
        self.run_log_manager = None
        if run_log_path:
            if not os.path.isabs(run_log_path):
                run_log_path = os.path.join(self.app_root_dir, run_log_path)
            self.run_log_manager = RunLogManager(run_log_path, self.config)

        self.parser = self._build_parser()

    def _fill_default_settings(self):
        """config.ini に存在しないセクションや項目を、メモリ上でデフォルト値で補います。"""
        for section, options in self.DEFAULT_SETTINGS.items():
            if not self.config.has_section(section):
                self.config.add_section(section)
            for key, value in options.items():
                if not self.config.has_option(section, key):
                    logger.debug("config.ini に '%s.%s' が見つからないため、デフォルト値 %s を使用します。",
                                 section, key, value)
                    self.config.set(section, key, value)

    def _getint(self, section: str, key: str) -> int:
        default = int(self.DEFAULT_SETTINGS[section][key])
        try:
            value = self.config.getint(section, key)
            if value <= 0:
                logger.warning("%s の値 (%d) が不正です。デフォルト値(%d)を使用します。", key, value, default)
                return default
            return value
        except (ValueError, NoSectionError, NoOptionError):
            logger.warning("%s の値を数値として読めません。デフォルト値(%d)を使用します。", key, default)
            return default

    def _load_config_values(self):
        self.significant_digits = self._getint('OUTPUT', 'SIGNIFICANT_DIGITS')
        self.schema_version = self._getint('OUTPUT', 'SCHEMA_VERSION')

    def _setup_logging(self):
        level_name = self.config.get('LOGGING', 'LEVEL').strip().upper()
        level = logging.getLevelName(level_name)
        if not isinstance(level, int):
            level = logging.INFO
        root = logging.getLogger()
        root.setLevel(level)
        if not any(getattr(handler, '_workbench', False) for handler in root.handlers):
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(logging.Formatter('[%(name)s] %(message)s'))
            handler._workbench = True
            root.addHandler(handler)
        if not isinstance(logging.getLevelName(level_name), int):
            logger.warning("LEVEL の値 '%s' が不正です。INFO を使用します。", level_name)

    # --- コマンドライン ---

    def _build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config', default=None, help="シナリオ設定のJSONファイル")
        common.add_argument('--out', default=None, help="出力先ファイル (省略時は標準出力)")
        common.add_argument('--format', choices=('csv', 'json'), default='json', help="出力形式")
        common.add_argument('--seed', type=int, default=0, help="雑音生成の seed")
        common.add_argument('--use-paper-approx', action='store_true', help="⟨x²+y²⟩ を a_n² で近似する")

        parser = argparse.ArgumentParser(prog='workbench', description="落下するリュードベリ原子と超伝導回路の計算ツール")
        parser.add_argument('--version', action='version', version=self.current_version)
        sub = parser.add_subparsers(dest='subcommand', required=True)

        p = sub.add_parser('rydberg', parents=[common], help="円軌道状態の幾何量と遷移周波数")
        p.add_argument('--n', type=int, default=None, help="主量子数 (省略時は設定の atom.n)")
        p.add_argument('--perturbation-hz', type=float, default=None, help="断熱性を判定する摂動周波数")
        p.add_argument('--margin', type=float, default=10.0)

        p = sub.add_parser('shift', parents=[common], help="反磁性シフトと重力シフト")
        p.add_argument('--field', type=float, default=1.0, help="磁場 B (T)")
        p.add_argument('--time', type=float, default=1.0, help="落下時間 t (s)")
        p.add_argument('--sweep', choices=('diamagnetic', 'tidal'), default=None, help="掃引するエンジン")
        p.add_argument('--values', type=float, nargs='+', default=None, help="掃引する B または t の列")

        p = sub.add_parser('force', parents=[common], help="潮汐場による力と勾配の整合性")
        p.add_argument('--time', type=float, default=1.0, help="落下時間 t (s)")
        p.add_argument('--altitude', type=float, default=0.0, help="地表からの高度 (m)")
        p.add_argument('--grad-b2', type=float, default=0.0, help="∇(B²) の鉛直成分 (T²/m)")

        p = sub.add_parser('drop', parents=[common], help="2点の自由落下")
        p.add_argument('--mode', choices=[mode.value for mode in ff.FallMode], default=ff.FallMode.INDEPENDENT_POINTS.value)

        sub.add_parser('dumbbell', parents=[common], help="ダンベル模型の α と β の候補")
        sub.add_parser('circuit', parents=[common], help="超伝導回路のつり合い")
        p = sub.add_parser('cavendish', parents=[common], help="キャベンディッシュ型実験の信号と同期検波")
        p.add_argument('--charge-detected', choices=('yes', 'no'), default=None)
        p.add_argument('--deflection-detected', choices=('yes', 'no'), default=None)
        sub.add_parser('reproduce-paper', parents=[common], help="全ての基準量の検証レポート")
        return parser

    def run(self, argv: list[str] | None = None) -> int:
        """コマンドラインを処理して終了ステータスを返します。"""
        argv = list(sys.argv[1:] if argv is None else argv)
        status, detail = self.dispatch(argv)
        if self.run_log_manager is not None:
            subcommand = argv[0] if argv else ''
            self.run_log_manager.add_entry(subcommand, status, detail)
        return status

    def dispatch(self, argv: list[str]) -> tuple[int, str]:
        """
        サブコマンドを実行します。

        Returns:
            tuple[int, str]: 終了ステータス (0: 成功, 1: 計算エラー, 2: 使い方の誤り) と詳細。
        """
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            code = e.code if isinstance(e.code, int) else 2
            return code, "usage"

        try:
            scenario = load_config_file(args.config) if args.config else ScenarioConfig()
            handler = getattr(self, '_cmd_' + args.subcommand.replace('-', '_'))
            status, text = handler(args, scenario)
        except WorkbenchError as e:
            logger.error("%s: %s", type(e).__name__, e)
            return 1, str(e)
        except OSError as e:
            logger.error("ファイルの入出力に失敗しました: %s", e)
            return 1, str(e)

        write_text(args.out, text, sys.stdout)
        return status, args.out or "stdout"

    def _mode(self, args) -> ry.MomentMode:
        return ry.MomentMode.PAPER_APPROX if args.use_paper_approx else ry.MomentMode.EXACT

    def _record(self, subcommand: str, args, scenario: ScenarioConfig, **extra) -> OutputRecord:
        inputs = {'config': config_to_dict(scenario), 'seed': args.seed,
                  'moment_mode': self._mode(args).value}
        inputs.update(extra)
        return OutputRecord(subcommand, inputs=inputs, schema_version=self.schema_version)

    def _render(self, record: OutputRecord, args) -> str:
        if args.format == 'csv':
            return record.to_csv(self.significant_digits)
        return record.to_json(self.significant_digits)

    def _moment_source(self, args) -> str:
        return SRC_MOMENT_APPROX if args.use_paper_approx else SRC_MOMENT

    # --- サブコマンド ---

    def _cmd_rydberg(self, args, scenario):
        c = self.constants
        n = args.n if args.n is not None else scenario.principal_n
        state = ry.circular_state(n)
        mode = self._mode(args)
        record = self._record('rydberg', args, scenario, n=n)
        record.add('orbit_radius', ry.orbit_radius(state, c), 'm', SRC_RING_RADIUS)
        record.add('transverse_moment', ry.effective_transverse_moment(state, mode, c), 'm^2', self._moment_source(args))
        record.add('rms_transverse_size', ry.rms_transverse_size(state, c), 'm', SRC_MOMENT)
        record.add('mean_square_radius', ry.mean_square_radius(state, c), 'm^2', SRC_R2)
        record.add('magnetic_moment', ry.magnetic_moment(n, c), 'J/T', SRC_MU)
        record.add('trapped_flux_equivalent', ry.trapped_flux(n, c), 'Wb', SRC_FLUX)
        record.add('angular_momentum', ry.angular_momentum(state, c), 'J s', "L_z = m hbar")
        if n >= 2:
            gap = ry.gap_frequency(n, c)
            record.add('gap_frequency', gap, 'Hz', SRC_RYDBERG)
            if args.perturbation_hz is not None:
                adiabatic = ry.adiabaticity_check(ry.QuantumSystemKind.rydberg_atom(), gap,
                                                  args.perturbation_hz, args.margin)
                record.add('adiabatic', adiabatic, '1', SRC_ADIABATIC)
        return 0, self._render(record, args)

    def _cmd_shift(self, args, scenario):
        c = self.constants
        state = ry.circular_state(scenario.principal_n)
        mode = self._mode(args)
        record = self._record('shift', args, scenario, field_T=args.field, time_s=args.time)
        record.add('diamagnetic_shift', dia.diamagnetic_shift(state, args.field, mode, c), 'J', SRC_DIA)
        record.add('gravitational_shift', tidal.gravitational_shift(state, args.time, mode=mode, c=c), 'J', SRC_GRAV)
        record.add('equivalent_magnetic_field', tidal.equivalent_magnetic_field(args.time, c=c), 'T', SRC_EQUIV_B)
        if args.sweep:
            if not args.values:
                raise ValidationError("--sweep には --values が必要です。")
            manager = PerturbationManager(c, mode)
            shifts = manager.sweep(args.sweep, state, args.values)
            source = SRC_DIA if args.sweep == 'diamagnetic' else SRC_GRAV
            record.add(f'{args.sweep}_sweep', {'drives': args.values, 'shifts': shifts}, 'J', source)
        return 0, self._render(record, args)

    def _cmd_force(self, args, scenario):
        c = self.constants
        state = ry.circular_state(scenario.principal_n)
        mode = self._mode(args)
        engine = tidal.TidalPerturbation(c, mode)
        r = c.earth_radius + args.altitude
        record = self._record('force', args, scenario, time_s=args.time, altitude_m=args.altitude,
                              grad_b2=args.grad_b2)
        record.add('gravitational_force_z', float(engine.force(state, args.time, r)[2]), 'N', SRC_FORCE)
        record.add('numerical_force_z', tidal.numerical_force(state, args.time, r, engine.model, mode, c), 'N',
                   PLUMBING_SOURCE)
        record.add('gradient_mismatch', engine.gradient_mismatch(state, args.time, r), '1', PLUMBING_SOURCE)
        record.add('magnetic_force_z', float(dia.magnetic_force(state, np.array([0.0, 0.0, args.grad_b2]), mode, c)[2]),
                   'N', "F_A.A = -grad(Delta E_A.A)")
        return 0, self._render(record, args)

    def _cmd_drop(self, args, scenario):
        c = self.constants
        drop = scenario.drop
        fall = ff.FallScenario(drop.separation_m, drop.height_m, drop.duration_s, drop.step_s, ff.FallMode(args.mode))
        try:
            pair = ff.simulate_pair(fall, c)
            status = 0
        except TruncatedTrajectoryError as e:
            logger.error("%s", e)
            pair, status = e.partial, 1

        if args.format == 'csv':
            return status, render_csv(('t', 'x1', 'z1', 'x2', 'z2', 'separation'), pair.as_rows(),
                                      self.significant_digits)

        record = self._record('drop', args, scenario, mode=args.mode)
        angle = ff.convergence_angle(drop.separation_m, c)
        record.add('convergence_angle', angle.angle_rad, 'rad', SRC_THETA)
        record.add('small_angle_valid', angle.small_angle_valid, '1', SRC_THETA)
        if drop.separation_m <= ff.MAX_HORIZONTAL_OFFSET_RATIO * c.earth_radius:
            record.add('horizontal_accel_per_point', ff.horizontal_accel(0.5 * drop.separation_m, c), 'm/s^2', SRC_GPRIME)
        record.add('separation_shrinkage', float(pair.separation[0] - pair.separation[-1]), 'm', PLUMBING_SOURCE)
        if len(pair) > 1:
            record.add('observed_convergence_angle', pair.convergence_angle_observed, 'rad', PLUMBING_SOURCE)
        record.add('final_time', float(pair.t[-1]), 's', PLUMBING_SOURCE)
        record.add('constraint_accel_final', float(pair.constraint_accel[-1]), 'm/s^2', PLUMBING_SOURCE)
        return status, self._render(record, args)

    def _cmd_dumbbell(self, args, scenario):
        record = self._record('dumbbell', args, scenario)
        record.add('alpha', ec.alpha_constant(), 'k Q^2/L^2', SRC_ALPHA)
        candidates = ec.beta_candidates()
        for label, value in candidates.values.items():
            record.add(f'beta[{label}]', value, 'k Q/L', SRC_BETA)
        record.add('beta_published', candidates.published, 'k Q/L', SRC_BETA)
        record.add('beta_discrepancy', candidates.discrepancy, '1', SRC_BETA)
        dominance = ec.innermost_dominance()
        record.add('innermost_term', dominance.innermost_term, 'k Q^2/L^2', SRC_ALPHA)
        record.add('other_terms_sum', dominance.other_terms_sum, 'k Q^2/L^2', SRC_ALPHA)
        record.add('net_force_repulsive', dominance.repulsive, '1', SRC_ALPHA)
        return 0, self._render(record, args)

    def _cmd_circuit(self, args, scenario):
        c = self.constants
        circuit = scenario.circuit
        result = ec.equilibrium_solve(circuit.rho_kg_m3, circuit.L_m, circuit.alpha, circuit.beta, c)
        record = self._record('circuit', args, scenario)
        units = {'alpha': 'k Q^2/L^2', 'Q_coulomb': 'C', 'V_volt': 'V', 'F_tidal_newton': 'N',
                 'residual': '1', 'beta_convention': '1'}
        sources = {'alpha': SRC_ALPHA, 'Q_coulomb': SRC_EQUILIBRIUM, 'V_volt': SRC_BETA,
                   'F_tidal_newton': SRC_TIDAL, 'residual': SRC_EQUILIBRIUM, 'beta_convention': SRC_BETA}
        for name, value in result.to_record().items():
            record.add(name, value, units[name], sources[name])
        record.add('F_coulomb_newton', result.F_coulomb, 'N', SRC_ALPHA)
        record.add('V_freefall', ec.freefall_voltage_scale(circuit.rho_kg_m3, circuit.L_m, c), 'V', SRC_VFF)
        record.add('g_prime', ff.horizontal_accel(circuit.L_m, c), 'm/s^2', SRC_GPRIME)
        record.add('capacitance_scale', ec.capacitance_scale(circuit.L_m, c), 'F', PLUMBING_SOURCE)
        return 0, self._render(record, args)

    def _cmd_cavendish(self, args, scenario):
        c = self.constants
        signal = cav.synthesize_record(scenario, args.seed, c)
        if args.format == 'csv':
            return 0, render_csv(('t', 'charge_C', 'deflection_rad'), signal.as_rows(), self.significant_digits)

        rotation = scenario.cavendish.rotation_hz
        duration = len(signal.t) / scenario.cavendish.sample_hz
        record = self._record('cavendish', args, scenario)
        for harmonic in (1, 2):
            detection = cav.synchronous_detect(signal.t, signal.charge_C, rotation, harmonic, duration)
            record.add(f'charge_detection_h{harmonic}', detection.to_record(args.seed), 'C', PLUMBING_SOURCE)
        deflection = cav.synchronous_detect(signal.t, signal.deflection_rad, rotation, 2, duration)
        record.add('deflection_detection_h2', deflection.to_record(args.seed), 'rad', PLUMBING_SOURCE)
        record.add('peak_deflection', float(np.max(np.abs(signal.deflection_rad))), 'rad', "theta = a_h/g")
        if args.charge_detected and args.deflection_detected:
            outcome = cav.classify_outcome(args.charge_detected == 'yes', args.deflection_detected == 'yes')
            record.add('outcome', outcome.classification.name, '1', SRC_OUTCOME)
        return 0, self._render(record, args)

    def _cmd_reproduce_paper(self, args, scenario):
        report = reproduce_paper(scenario, args.seed, self.constants)
        record = report.to_record(scenario)
        record.schema_version = self.schema_version
        if not report.passed:
            logger.error("検証に失敗した項目があります: %s", ", ".join(report.failed_checks()))
        return (0 if report.passed else 1), self._render(record, args)
