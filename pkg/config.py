import json
import os
from typing import Dict, Optional


class Config:
    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize configuration

        Args:
            config_file: Path to JSON configuration file; None means defaults only
        """
        self.config_file = config_file
        self.data = self._load_config()

    def _load_config(self) -> Dict:
        """Load configuration from file"""
        if self.config_file is None:
            return {}
        if not os.path.exists(self.config_file):
            raise FileNotFoundError(f"Config file {self.config_file} not found")

        with open(self.config_file) as f:
            return json.load(f)

    def get(self, key: str, default=None):
        """Get configuration value"""
        return self.data.get(key, default)

    def get_enumeration_settings(self) -> Dict:
        """Budgets and seed for bounded enumeration and random sampling"""
        seed = os.environ.get('REGULUS_SEED')
        return {
            'max_enum': int(self.get('max_enum', 4096)),
            'seed': int(seed) if seed else int(self.get('seed', 0)),
            'show_progress': bool(self.get('show_progress', False))
        }

    def get_logging_settings(self) -> Dict:
        """Get logging configuration"""
        return {
            'log_level': os.environ.get('REGULUS_LOG_LEVEL', self.get('log_level', 'WARNING')).upper()
        }
