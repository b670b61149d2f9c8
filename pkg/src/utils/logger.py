"""
fuzzy-psi logging: console plus rotating file output, JSON event and metric lines
"""

import json
import logging
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

from config.settings import settings


class PsiLogger:
    """
    Logger wrapper with one instance per name

    Console output goes to stderr so tables written to stdout stay clean.
    """

    _instances: Dict[str, "PsiLogger"] = {}

    def __new__(cls, name: str = "fuzzy_psi", log_dir: Optional[Path] = None):
        if name not in cls._instances:
            cls._instances[name] = super().__new__(cls)
        return cls._instances[name]

    def __init__(self, name: str = "fuzzy_psi", log_dir: Optional[Path] = None):
        if hasattr(self, "_initialized"):
            return

        self.name = name
        self.log_dir = Path(log_dir or settings.logging.log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.logger = logging.getLogger(f"fuzzy_psi.{name}")
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        self._initialized = True

        if self.logger.handlers:
            return

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, settings.logging.log_level.upper(), logging.INFO))
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
        )

        log_file = self.log_dir / f"{name.lower()}_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=settings.logging.max_log_size,
            backupCount=settings.logging.backup_count,
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )

        self.logger.addHandler(console_handler)
        self.logger.addHandler(file_handler)

    def set_console_level(self, level: str):
        for handler in self.logger.handlers:
            if not isinstance(handler, RotatingFileHandler):
                handler.setLevel(getattr(logging, level.upper(), logging.INFO))

    @classmethod
    def set_level_all(cls, level: str):
        """Console level for every named logger created so far"""
        for instance in cls._instances.values():
            instance.set_console_level(level)

    def debug(self, message: str, **kwargs):
        self.logger.debug(message, extra=kwargs)

    def info(self, message: str, **kwargs):
        self.logger.info(message, extra=kwargs)

    def warning(self, message: str, **kwargs):
        self.logger.warning(message, extra=kwargs)

    def error(self, message: str, **kwargs):
        self.logger.error(message, extra=kwargs)

    def exception(self, message: str, **kwargs):
        self.logger.exception(message, extra=kwargs)

    def log_event(self, event_type: str, data: Dict[str, Any]):
        """One JSON object per event, at debug level"""
        event = {"timestamp": datetime.now().isoformat(), "event_type": event_type, "data": data}
        self.debug(f"EVENT: {json.dumps(event, default=str)}")

    def log_metric(self, metric_name: str, value: float, tags: Optional[Dict[str, Any]] = None):
        metric = {"timestamp": datetime.now().isoformat(), "metric": metric_name, "value": value, "tags": tags or {}}
        self.info(f"METRIC: {json.dumps(metric, default=str)}")


class PerformanceMonitor:
    """Wall-clock timers reported as metrics"""

    def __init__(self, logger: PsiLogger):
        self.logger = logger
        self.metrics: Dict[str, Dict[str, Any]] = {}

    def start_timer(self, operation: str):
        self.metrics[operation] = {"start_time": datetime.now(), "end_time": None, "duration": None}

    def stop_timer(self, operation: str, **tags) -> Optional[float]:
        if operation not in self.metrics:
            return None
        record = self.metrics[operation]
        record["end_time"] = datetime.now()
        record["duration"] = (record["end_time"] - record["start_time"]).total_seconds()
        self.logger.log_metric(f"{operation}_duration", record["duration"], tags)
        return record["duration"]

    def get_metrics(self) -> Dict[str, Dict[str, Any]]:
        return self.metrics.copy()
