"""
Unit Tests for settings, helpers, the worker pool and logging
"""

import configparser
import json
import tempfile
import threading
import unittest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import Settings
from src.core.errors import ParseError
from src.utils.helpers import Timer, format_half, parse_half, parse_rational
from src.utils.logger import PerformanceMonitor, PsiLogger
from src.utils.workers import WorkerPool, WorkStatus


class TestSettings(unittest.TestCase):
    """Test configuration loading and validation"""

    def test_defaults_valid(self):
        """Defaults pass validation"""
        settings = Settings()
        self.assertEqual(settings.algebra.n_max, "2")
        self.assertTrue(settings.validate()["valid"])

    def test_flat_overrides(self):
        """Flat keys are coerced to the setting's type"""
        settings = Settings()
        settings.update_from_flat({"jobs": "4", "suite": "norms, hahn", "nmax": "3/2", "rhat": None})
        self.assertEqual(settings.runtime.jobs, 4)
        self.assertEqual(settings.verify.suites, ["norms", "hahn"])
        self.assertEqual(settings.algebra.n_max, "3/2")
        self.assertIsNone(settings.point.rhat)

    def test_yaml_and_flat_files(self):
        """YAML sections and key = value files"""
        with tempfile.TemporaryDirectory() as tmp:
            yaml_path = Path(tmp) / "psi.yaml"
            yaml_path.write_text("verify:\n  seed: 99\nruntime:\n  jobs: 2\n")
            flat_path = Path(tmp) / "psi.conf"
            flat_path.write_text("eps=1/3\nk=2\n")
            settings = Settings(str(yaml_path))
            settings.load_from_file(str(flat_path))
        self.assertEqual(settings.verify.seed, 99)
        self.assertEqual(settings.runtime.jobs, 2)
        self.assertEqual((settings.point.eps, settings.point.k), ("1/3", "2"))

    def test_invalid_values(self):
        """Every problem is reported"""
        settings = Settings()
        settings.algebra.n_max = "5/4"
        settings.point.eps = "-1"
        settings.verify.suites = ["topology"]
        settings.update_from_flat({"colour": "red"})
        issues = settings.validate()["issues"]
        self.assertEqual(len(issues), 4)

    def test_cap(self):
        """n_max above the cap is invalid unless overridden"""
        settings = Settings()
        settings.algebra.n_max = "5"
        self.assertFalse(settings.validate()["valid"])
        settings.algebra.allow_cap_override = True
        self.assertTrue(settings.validate()["valid"])

    def test_missing_and_unsupported_files(self):
        """Config file errors"""
        settings = Settings()
        with self.assertRaises(FileNotFoundError):
            settings.load_from_file("/nonexistent/psi.yaml")
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "psi.ini"
            path.write_text("")
            with self.assertRaises(ValueError):
                settings.load_from_file(str(path))

    def test_save_round_trip(self):
        """save_to_file writes every section"""
        settings = Settings()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "saved.json"
            settings.save_to_file(str(path), format="json")
            data = json.loads(path.read_text())
        self.assertEqual(data["app_name"], "fuzzy-psi")
        self.assertEqual(data["algebra"]["hard_cap"], "4")


class TestHelpers(unittest.TestCase):
    """Test half-integer and rational parsing"""

    def test_parse_half(self):
        """Half-integers come back doubled"""
        self.assertEqual(parse_half("3/2"), 3)
        self.assertEqual(parse_half("-1"), -2)
        self.assertEqual(parse_half("1.5"), 3)
        with self.assertRaises(ParseError):
            parse_half("1/3")

    def test_parse_rational(self):
        """Exact parsing"""
        self.assertEqual(parse_rational(" 0.25 "), Fraction(1, 4))
        with self.assertRaises(ParseError):
            parse_rational("one")

    def test_format_half(self):
        """Doubled labels render as fractions"""
        self.assertEqual([format_half(d) for d in (3, -2, 0, -1)], ["3/2", "-1", "0", "-1/2"])

    def test_timer(self):
        """Elapsed time is non-negative after the block"""
        with Timer("test") as timer:
            pass
        self.assertGreaterEqual(timer.elapsed, 0.0)


class TestWorkerPool(unittest.TestCase):
    """Test ordered parallel execution"""

    def test_order_preserved(self):
        """Results follow input order for any worker count"""
        payloads = list(range(20))
        for workers in (1, 4):
            with self.subTest(workers=workers):
                self.assertEqual(WorkerPool(workers).map_ordered(lambda x: x * x, payloads), [x * x for x in payloads])

    def test_uses_threads(self):
        """Several workers run on named threads"""
        names = set()
        lock = threading.Lock()

        def record(_):
            with lock:
                names.add(threading.current_thread().name)

        WorkerPool(3).run(record, range(12))
        self.assertTrue(all(name.startswith("Worker-") for name in names))

    def test_first_failure_raised(self):
        """The first failing input re-raises after the run"""

        def fail_on_odd(x):
            if x % 2:
                raise ValueError(f"odd {x}")
            return x

        items = WorkerPool(2).run(fail_on_odd, range(4))
        self.assertEqual([item.status for item in items], [WorkStatus.COMPLETED, WorkStatus.FAILED] * 2)
        with self.assertRaisesRegex(ValueError, "odd 1"):
            WorkerPool(2).map_ordered(fail_on_odd, range(4))

    def test_invalid_size(self):
        """At least one worker"""
        with self.assertRaises(ValueError):
            WorkerPool(0)


class TestLogger(unittest.TestCase):
    """Test the named logger and timers"""

    def test_singleton_per_name(self):
        """One instance per name"""
        self.assertIs(PsiLogger("tests"), PsiLogger("tests"))
        self.assertIsNot(PsiLogger("tests"), PsiLogger("tests_other"))

    def test_performance_monitor(self):
        """Timers report a duration once stopped"""
        monitor = PerformanceMonitor(PsiLogger("tests"))
        self.assertIsNone(monitor.stop_timer("never_started"))
        monitor.start_timer("block")
        self.assertGreaterEqual(monitor.stop_timer("block", rows=3), 0.0)
        self.assertIn("block", monitor.get_metrics())


class TestPackaging(unittest.TestCase):
    """Test the tool configuration files"""

    def test_pytest_configured_once(self):
        """pytest options live in pyproject.toml only"""
        root = Path(__file__).parent.parent
        parser = configparser.ConfigParser()
        parser.read(root / "setup.cfg")
        self.assertNotIn("pytest", parser.sections())
        self.assertIn("[tool.pytest.ini_options]", (root / "pyproject.toml").read_text())


if __name__ == '__main__':
    unittest.main()
