"""
Integration Tests for fuzzy-psi: property suites and the command line
"""

import io
import json
import tempfile
import unittest
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import KNOWN_SUITES, Settings
from src.core.psi import SYMBOLIC, ParamPoint
from src.main import FuzzyPsiApp, build_parser, main
from src.modules.tables import TableRequest
from src.modules.verification import DEFAULT_POINTS, VerifyContext, run_verify


@pytest.mark.integration
class TestVerification(unittest.TestCase):
    """Run property suites end to end"""

    def setUp(self):
        self.points = [ParamPoint.at_level(2, 1)]

    def test_selected_suites(self):
        """Only the named suites run, each reporting its checks"""
        req = TableRequest("verify", n_max2=2, points=self.points, suites=["coeff", "structure"])
        ctx = VerifyContext(n_max2=2, points=self.points, random_triples=10)
        report = run_verify(req, ctx)
        self.assertEqual(list(report["summary"]["suites"]), ["coeff", "structure"])
        self.assertEqual(report["summary"]["total"], len(report["results"]))
        self.assertTrue(report["passed"])

    def test_unknown_suite(self):
        """Suite names are checked before anything runs"""
        req = TableRequest("verify", n_max2=2, suites=["topology"])
        with self.assertRaises(ValueError):
            run_verify(req)

    def test_result_records(self):
        """Every record names its suite and property"""
        req = TableRequest("verify", n_max2=2, points=self.points, suites=["spinor"])
        report = run_verify(req, VerifyContext(n_max2=2, points=self.points, random_triples=40))
        for record in report["results"]:
            self.assertEqual(record["suite"], "spinor")
            self.assertTrue(record["property"])
        self.assertTrue(report["passed"])

    def test_default_levels_always_checked(self):
        """The three default levels follow any given numeric point"""
        ctx = VerifyContext(n_max2=2, points=[SYMBOLIC])
        self.assertEqual(ctx.numeric_points, list(DEFAULT_POINTS))
        ctx = VerifyContext(n_max2=2, points=[ParamPoint.at_level(2, 1)])
        self.assertEqual(ctx.numeric_points, list(DEFAULT_POINTS))
        extra = ParamPoint.numeric(Fraction(1, 2), 2)
        ctx = VerifyContext(n_max2=2, points=[extra])
        self.assertEqual(ctx.numeric_points, [extra] + list(DEFAULT_POINTS))

    def test_orthogonality_and_geometry_at_default_levels(self):
        """Orthogonality and the coordinate identities hold at every default level"""
        points = list(DEFAULT_POINTS)
        req = TableRequest("verify", n_max2=2, points=points, suites=["orthogonality", "geometry"])
        report = run_verify(req, VerifyContext(n_max2=2, points=points, random_triples=10))
        failures = [r for r in report["results"] if not r["passed"]]
        self.assertEqual(failures, [])
        checked = {r["parameters"].get("point") for r in report["results"] if r["property"].startswith("sum_m x^m")}
        self.assertEqual(checked, {str(p) for p in points})

    @pytest.mark.slow
    def test_all_suites(self):
        """Every suite passes at n <= 1"""
        req = TableRequest("verify", n_max2=2, points=self.points, jobs=2)
        ctx = VerifyContext(n_max2=2, points=self.points, random_triples=20, classical_samples=5)
        report = run_verify(req, ctx)
        self.assertEqual(list(report["summary"]["suites"]), list(KNOWN_SUITES))
        failures = [r for r in report["results"] if not r["passed"]]
        self.assertEqual(failures, [])


@pytest.mark.integration
class TestCommandLine(unittest.TestCase):
    """Test argument handling and exit codes"""

    def setUp(self):
        patcher = patch("src.main.settings", Settings())
        self.settings = patcher.start()
        self.addCleanup(patcher.stop)

    def run_main(self, argv):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            code = main(argv)
        return code, buffer.getvalue()

    def test_version(self):
        """--version prints the name and version"""
        code, text = self.run_main(["--version"])
        self.assertEqual(code, 0)
        self.assertIn("fuzzy-psi v1.0.0", text)

    def test_no_command(self):
        """Missing subcommand is a usage error"""
        code, _ = self.run_main([])
        self.assertEqual(code, 2)

    def test_norms_json(self):
        """A small table on stdout"""
        code, text = self.run_main(["norms", "--nmax", "1", "--eps", "1", "--k", "1", "--format", "json"])
        self.assertEqual(code, 0)
        rows = json.loads(text)
        self.assertEqual(len(rows), 1 + 2 + 3)
        self.assertTrue(all(row["point"] == "eps=1,Rh=(3/2)" for row in rows))

    def test_cap_rejected(self):
        """n_max above the hard cap exits with 2"""
        code, _ = self.run_main(["norms", "--nmax", "9"])
        self.assertEqual(code, 2)

    def test_config_file(self):
        """Values from a YAML config apply"""
        with tempfile.TemporaryDirectory() as tmp:
            config = Path(tmp) / "psi.yaml"
            config.write_text("algebra:\n  n_max: '1/2'\noutput:\n  format: json\n")
            code, text = self.run_main(["--config", str(config), "norms", "--symbolic"])
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(text)), 3)

    def test_verify_to_file(self):
        """verify writes a JSON report and exits 0 when every check passes"""
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "reports" / "verify.json"
            code, _ = self.run_main(["verify", "--suite", "structure", "--nmax", "1", "--out", str(out)])
            report = json.loads(out.read_text())
        self.assertEqual(code, 0)
        self.assertTrue(report["passed"])


class TestPointSelection(unittest.TestCase):
    """Test how --eps, --k and --rhat become evaluation points"""

    def setUp(self):
        patcher = patch("src.main.settings", Settings())
        self.settings = patcher.start()
        self.addCleanup(patcher.stop)
        self.parser = build_parser()

    def points(self, argv):
        return FuzzyPsiApp(self.parser.parse_args(argv)).points()

    def test_symbolic(self):
        """--symbolic keeps eps and Rh open"""
        self.assertEqual(self.points(["norms", "--symbolic"]), [SYMBOLIC])

    def test_levels(self):
        """Each k gives Rh = eps (k + 1/2)"""
        points = self.points(["norms", "--eps", "1", "--k", "1/2", "--k", "1"])
        self.assertEqual(points, [ParamPoint.at_level(1, 1), ParamPoint.at_level(2, 1)])

    def test_rhat_overrides_k(self):
        """--rhat wins over the configured level"""
        self.assertEqual(self.points(["norms", "--eps", "1/2", "--rhat", "2"]), [ParamPoint.numeric(Fraction(1, 2), 2)])

    def test_classical_point(self):
        """eps = 0 without Rh uses the unit sphere"""
        self.assertEqual(self.points(["classical", "--eps", "0"]), [ParamPoint.numeric(0, 1)])

    def test_plain_verify_covers_default_levels(self):
        """verify without point flags checks every default level"""
        args = self.parser.parse_args(["verify"])
        app = FuzzyPsiApp(args)
        ctx = VerifyContext(n_max2=2, points=app.points())
        for point in DEFAULT_POINTS:
            self.assertIn(point, ctx.numeric_points)


if __name__ == '__main__':
    unittest.main()
