"""
fuzzy-psi: exact algebra of fields on the fuzzy sphere
Command-line entry point
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# Add the repository root to the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import KNOWN_FORMATS, KNOWN_SUITES, settings
from src.core.errors import AlgebraError
from src.core.psi import SYMBOLIC, ParamPoint
from src.modules.tables import TABLE_KINDS, TableRequest, generate, write_table
from src.modules.verification import VerifyContext, run_verify
from src.utils.helpers import Timer, parse_half, parse_rational
from src.utils.logger import PsiLogger


class FuzzyPsiApp:
    """
    Turns parsed arguments plus settings into table requests and runs them
    """

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.logger = PsiLogger("main")
        self._apply_overrides()

    def _apply_overrides(self):
        args = self.args
        overrides = {
            "nmax": args.nmax,
            "format": args.format,
            "jobs": None if args.jobs is None else str(args.jobs),
            "seed": None if args.seed is None else str(args.seed),
            "rhat": args.rhat,
            "log_level": args.log_level,
        }
        settings.update_from_flat(overrides)
        if args.suite:
            settings.verify.suites = list(args.suite)
        if args.allow_cap_override:
            settings.algebra.allow_cap_override = True
        if args.float:
            settings.output.include_float = True
        if args.progress:
            settings.runtime.show_progress = True
        PsiLogger.set_level_all(settings.logging.log_level)

    def points(self) -> List[ParamPoint]:
        """
        Evaluation points from --eps x (--rhat | --k)

        Rh wins when given; otherwise each k gives Rh = eps (k + 1/2). At
        eps = 0 without Rh the classical sphere R = Rh = 1 is used.
        """
        if self.args.symbolic:
            return [SYMBOLIC]
        eps_values = [parse_rational(e) for e in (self.args.eps or [settings.point.eps])]
        k_texts = self.args.k or ([settings.point.k] if settings.point.k is not None else [])
        points = []
        for eps in eps_values:
            if settings.point.rhat is not None:
                points.append(ParamPoint.numeric(eps, parse_rational(settings.point.rhat)))
            elif eps == 0 or not k_texts:
                points.append(ParamPoint.numeric(eps, 1))
            else:
                points.extend(ParamPoint.at_level(parse_half(k), eps) for k in k_texts)
        return points

    def request(self) -> TableRequest:
        return TableRequest(
            kind=self.args.command,
            n_max2=parse_half(settings.algebra.n_max),
            points=self.points(),
            format=settings.output.format,
            out=self._output_path(),
            jobs=settings.runtime.jobs,
            hard_cap2=parse_half(settings.algebra.hard_cap),
            allow_cap_override=settings.algebra.allow_cap_override,
            include_float=settings.output.include_float,
            float_precision=settings.output.float_precision,
            show_progress=settings.runtime.show_progress,
            warm_cache=settings.algebra.warm_cache,
            seed=settings.verify.seed,
            classical_samples=settings.verify.classical_samples,
            suites=list(settings.verify.suites),
        )

    def _output_path(self) -> Optional[str]:
        """--out wins; a bare directory from settings gets <kind>.<format>"""
        if self.args.out:
            return self.args.out
        if self.args.to_dir:
            extension = "json" if self.args.command == "verify" else settings.output.format
            return str(Path(settings.output.out_dir) / f"{self.args.command}.{extension}")
        return None

    def run(self) -> int:
        req = self.request()
        self.logger.info(f"Running {req.kind} with n_max={settings.algebra.n_max} at {len(req.points)} point(s)")
        if req.kind == "verify":
            return self._verify(req)
        with Timer(f"table_{req.kind}", self.logger):
            rows = generate(req)
        write_table(rows, req.format, req.out)
        return 0

    def _verify(self, req: TableRequest) -> int:
        ctx = VerifyContext(
            n_max2=req.n_max2,
            points=list(req.points),
            seed=req.seed,
            random_triples=settings.verify.random_triples,
            float_tolerance=settings.verify.float_tolerance,
            classical_samples=settings.verify.classical_samples,
            nullity_margin=settings.verify.nullity_margin,
        )
        with Timer("verify", self.logger):
            report = run_verify(req, ctx)
        text = json.dumps(report, indent=2) + "\n"
        if req.out is None or req.out == "-":
            sys.stdout.write(text)
        else:
            path = Path(req.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        summary = report["summary"]
        self.logger.info(f"verify: {summary['passed']}/{summary['total']} checks passed")
        return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzy-psi",
        description="Exact tables and property checks for the fuzzy-sphere algebra (Psi, rho)",
    )
    parser.add_argument("--version", action="store_true", help="Show version information")
    parser.add_argument("--config", type=str, help="Config file (.yaml, .json or flat key = value)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nmax", type=str, help="Largest n as a fraction, e.g. 3/2")
    common.add_argument("--eps", action="append", help="Rational eps; repeat for several points")
    common.add_argument("--k", action="append", help="Fuzzy level k (Rh = eps (k + 1/2)); repeatable")
    common.add_argument("--rhat", type=str, help="Rational Rh; overrides --k")
    common.add_argument("--symbolic", action="store_true", help="Keep eps and Rh symbolic")
    common.add_argument("--format", choices=KNOWN_FORMATS, help="Output format")
    common.add_argument("--out", type=str, help="Output file ('-' for stdout)")
    common.add_argument("--to-dir", action="store_true", help="Write <kind>.<format> into the output directory")
    common.add_argument("--jobs", type=int, help="Worker threads")
    common.add_argument("--suite", action="append", choices=KNOWN_SUITES, help="Verification suite; repeatable")
    common.add_argument("--seed", type=int, help="Seed for randomized suites")
    common.add_argument("--allow-cap-override", action="store_true", help="Accept n_max above the hard cap")
    common.add_argument("--float", action="store_true", help="Add a float column")
    common.add_argument("--progress", action="store_true", help="Show progress bars")
    common.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="Console log level")

    subparsers = parser.add_subparsers(dest="command")
    descriptions = {
        "structure": "Structure constants of rho(Xi Xi)",
        "reduced": "Wigner-Eckart reduced matrix elements",
        "norms": "Norms ||Xi(n,r,m)||^2 and their signs",
        "hahn": "Hahn closed forms of the basis",
        "cg": "Clebsch-Gordan coefficients",
        "classical": "eps = 0 limit against rotation matrices",
        "verify": "Run the property suites",
    }
    for kind in TABLE_KINDS + ("verify",):
        subparsers.add_parser(kind, parents=[common], help=descriptions[kind])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        print(f"{settings.app_name} v{settings.app_version}")
        return 0

    if not args.command:
        parser.print_help()
        return 2

    logger = PsiLogger("main")
    try:
        if args.config:
            settings.load_from_file(args.config)
        app = FuzzyPsiApp(args)
        validation = settings.validate()
        if not validation["valid"]:
            for issue in validation["issues"]:
                logger.error(issue)
            return 2
        return app.run()
    except AlgebraError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except (ValueError, FileNotFoundError) as e:
        logger.error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
