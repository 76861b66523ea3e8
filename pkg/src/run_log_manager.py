# src/run_log_manager.py

import logging
import os
import threading
from configparser import ConfigParser, NoOptionError, NoSectionError
from dataclasses import dataclass
from datetime import datetime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunLogEntry:
    timestamp: str
    subcommand: str
    status: int
    detail: str


class RunLogManager:
    """
    実行履歴の永続化（ファイルへの追記・読み込み）を行うクラス。
    結果ファイルとは別に保存するため、結果ファイルはタイムスタンプを含まず再現性を保ちます。
    """
    DEFAULT_LIMIT = 200

    def __init__(self, log_file_path: str, config: ConfigParser):
        """
        Args:
            log_file_path (str): 実行履歴ファイルのパス。
            config (ConfigParser): アプリケーション全体の設定情報。
        """
        self.log_file_path = log_file_path
        self.lock = threading.Lock()

        # configから設定値を読み込み、不正な場合はデフォルト値を使用
        try:
            self.history_limit = config.getint('LOGGING', 'RUN_LOG_LIMIT')
            if self.history_limit <= 0:
                logger.warning("RUN_LOG_LIMIT の値 (%d) が不正です。デフォルト値(%d)を使用します。",
                               self.history_limit, self.DEFAULT_LIMIT)
                self.history_limit = self.DEFAULT_LIMIT
        except (ValueError, NoSectionError, NoOptionError):
            self.history_limit = self.DEFAULT_LIMIT

        directory = os.path.dirname(self.log_file_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

    @staticmethod
    def _escape(text: str) -> str:
        # 履歴ファイルはカンマ区切りなため、カンマと改行を置換する
        return text.replace(',', '<comma>').replace('\n', '<br>')

    @staticmethod
    def _unescape(text: str) -> str:
        return text.replace('<comma>', ',').replace('<br>', '\n')

    def add_entry(self, subcommand: str, status: int, detail: str = ""):
        """
        1回の実行結果を履歴ファイルに追記します。

        Args:
            subcommand (str): 実行したサブコマンド。
            status (int): 終了ステータス。
            detail (str): 出力先やエラーメッセージなど。
        """
        with self.lock:
            timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
            line = f"{timestamp},{self._escape(subcommand)},{status},{self._escape(detail)}\n"
            try:
                with open(self.log_file_path, 'a', encoding='utf-8') as f:
                    f.write(line)
            except OSError as e:
                logger.error("実行履歴の書き込みに失敗しました: %s", e)

    def get_entries(self) -> list[RunLogEntry]:
        """最新の RUN_LOG_LIMIT 件の履歴を古い順に返します。"""
        with self.lock:
            if not os.path.exists(self.log_file_path):
                return []
            try:
                with open(self.log_file_path, 'r', encoding='utf-8') as f:
                    lines = f.readlines()
            except OSError as e:
                logger.error("実行履歴の読み込みに失敗しました: %s", e)
                return []

        entries = []
        for line in lines[-self.history_limit:]:
            parts = line.rstrip('\n').split(',', 3)
            if len(parts) < 4:
                logger.debug("履歴行を読み飛ばしました: %s", line.strip())
                continue
            timestamp, subcommand, status, detail = parts
            try:
                entries.append(RunLogEntry(timestamp, self._unescape(subcommand), int(status), self._unescape(detail)))
            except ValueError:
                logger.debug("履歴行の終了ステータスが不正です: %s", line.strip())
        return entries

    def clear_log(self):
        """実行履歴ファイルを削除します。"""
        with self.lock:
            if os.path.exists(self.log_file_path):
                try:
                    os.remove(self.log_file_path)
                    logger.info("実行履歴をクリアしました。")
                except OSError as e:
                    logger.error("実行履歴のクリアに失敗しました: %s", e)
