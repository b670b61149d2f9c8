"""
Batch table generation: structure constants, reduced matrix elements,
norms, Hahn closed forms, Clebsch-Gordan coefficients and classical limits
"""

import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from src.core.coeff import Scalar
from src.core.errors import CapExceeded, InconsistentReduction, SelectionRuleViolation
from src.core.psi import (
    SYMBOLIC,
    XI_CACHE,
    BasisLabel,
    ParamPoint,
    PsiElement,
    labels_up_to,
    norm_sign,
    norm_sq,
    product_rho,
)
from src.modules.special import (
    BINOMIAL_INDICES,
    EulerAngles,
    classical_rotation_form,
    clebsch_gordan,
    closed_form_case,
    hahn_eps0_form,
    pipeline_reduced,
    triangle,
    xi_classical,
    xi_closed_form,
)
from src.utils.helpers import format_half
from src.utils.logger import PerformanceMonitor, PsiLogger
from src.utils.workers import WorkerPool

TABLE_KINDS = ("structure", "reduced", "norms", "hahn", "cg", "classical")
KINDS = TABLE_KINDS + ("verify",)
FORMATS = ("csv", "json")

logger = PsiLogger("tables")
monitor = PerformanceMonitor(logger)


@dataclass
class TableRequest:
    """
    One batch job

    Label ranges are doubled: n_max2 = 4 means n <= 2.
    """
    kind: str
    n_max2: int = 4
    points: List[ParamPoint] = field(default_factory=list)
    format: str = "csv"
    out: Optional[str] = None
    jobs: int = 1
    hard_cap2: int = 8
    allow_cap_override: bool = False
    include_float: bool = False
    float_precision: int = 12
    show_progress: bool = False
    warm_cache: bool = True
    seed: int = 1234
    classical_samples: int = 20
    suites: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown table kind {self.kind!r}; expected one of {KINDS}")
        if self.format not in FORMATS:
            raise ValueError(f"Unknown output format {self.format!r}")
        if self.n_max2 < 0:
            raise ValueError(f"n_max must be non-negative, got {format_half(self.n_max2)}")
        if self.n_max2 > self.hard_cap2 and not self.allow_cap_override:
            raise CapExceeded(
                f"n_max {format_half(self.n_max2)} exceeds the hard cap {format_half(self.hard_cap2)}; "
                "pass --allow-cap-override to accept the runtime"
            )
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")
        if not self.points:
            self.points = [SYMBOLIC]

    def pool(self, name: str) -> WorkerPool:
        return WorkerPool(self.jobs, show_progress=self.show_progress, name=name)


Row = Dict[str, Any]


def _format_complex(value: complex, precision: int) -> str:
    real, imag = value.real, value.imag
    if abs(imag) <= 10.0 ** (-precision):
        return f"{real:.{precision}g}"
    return f"{real:.{precision}g}{imag:+.{precision}g}j"


def _float_column(value: Scalar, point: ParamPoint, precision: int) -> str:
    if not point.is_numeric and not value.is_numeric():
        return ""
    return _format_complex(point.evaluate(value).evaluate_float(), precision)


def _prepare(req: TableRequest):
    if req.warm_cache:
        monitor.start_timer("xi_cache_warm_up")
        built = XI_CACHE.warm_up(req.n_max2)
        monitor.stop_timer("xi_cache_warm_up", labels=built)


def _run(req: TableRequest, name: str, func: Callable[[Any], List[Row]], payloads: List[Any]) -> List[Row]:
    _prepare(req)
    monitor.start_timer(name)
    chunks = req.pool(name).map_ordered(func, payloads)
    rows = [row for chunk in chunks for row in chunk]
    monitor.stop_timer(name, rows=len(rows), jobs=req.jobs)
    return rows


# -------------------------------------------------------------------- structure constants


def check_selection_rules(left: BasisLabel, right: BasisLabel, product: PsiElement):
    """m = m1 + m2, r = r1 + r2 and the triangle rule on every term of rho(Xi Xi)"""
    for label in product.labels():
        sector_ok = label.r2 == left.r2 + right.r2 and label.m2 == left.m2 + right.m2
        if not sector_ok or not triangle(left.n2, right.n2, label.n2):
            raise SelectionRuleViolation(f"{left} * {right} produced {label}")


def structure_row(point: ParamPoint, left: BasisLabel, right: BasisLabel, label: BasisLabel, coeff: Scalar) -> Row:
    return {
        "point": str(point),
        "n1": format_half(left.n2),
        "r1": format_half(left.r2),
        "m1": format_half(left.m2),
        "n2": format_half(right.n2),
        "r2": format_half(right.r2),
        "m2": format_half(right.m2),
        "n": format_half(label.n2),
        "r": format_half(label.r2),
        "m": format_half(label.m2),
        "coefficient": str(coeff),
    }


def _structure_pair(req: TableRequest) -> Callable[[Tuple[ParamPoint, BasisLabel, BasisLabel]], List[Row]]:
    def compute(payload: Tuple[ParamPoint, BasisLabel, BasisLabel]) -> List[Row]:
        point, left, right = payload
        product = product_rho(PsiElement.basis(*left), PsiElement.basis(*right), point)
        check_selection_rules(left, right, product)
        rows = []
        for label, coeff in product.items():
            row = structure_row(point, left, right, label, coeff)
            if req.include_float:
                row["float"] = _float_column(coeff, point, req.float_precision)
            rows.append(row)
        return rows

    return compute


def gen_structure_constants(req: TableRequest) -> List[Row]:
    """
    Rows (n1,r1,m1,n2,r2,m2,n,r,m,coefficient) of rho(Xi(n1,r1,m1) Xi(n2,r2,m2))

    Raises:
        SelectionRuleViolation: a product term breaks m = m1+m2, r = r1+r2 or the triangle rule
    """
    labels = labels_up_to(req.n_max2)
    payloads = [(point, left, right) for point in req.points for left in labels for right in labels]
    return _run(req, "structure", _structure_pair(req), payloads)


# -------------------------------------------------------------------- reduced matrix elements


def reduced_matrix_element(
    n1_2: int, n2_2: int, n_2: int, coefficients: Mapping[Tuple[int, int], Scalar], context: str = ""
) -> Tuple[Scalar, int]:
    """
    R = coefficient / CG, common to every (m1, m2) pair

    Args:
        coefficients: (m1_2, m2_2) -> coefficient of Xi(n, r, m1+m2) in the product
        context: Label text for error messages

    Returns:
        (R, number of m-pairs with a nonzero CG coefficient)

    Raises:
        InconsistentReduction: two pairs disagree on R, or a zero CG meets a nonzero coefficient
    """
    value: Optional[Scalar] = None
    used = 0
    for (m1_2, m2_2), coeff in sorted(coefficients.items()):
        cg = clebsch_gordan(n1_2, n2_2, n_2, m1_2, m2_2, m1_2 + m2_2)
        if cg.is_zero():
            if not coeff.is_zero():
                raise InconsistentReduction(
                    f"{context}: CG vanishes at m=({m1_2}/2,{m2_2}/2) but coefficient is {coeff}"
                )
            continue
        ratio = coeff * cg.inverse()
        used += 1
        if value is None:
            value = ratio
        elif ratio != value:
            raise InconsistentReduction(
                f"{context}: reduced element {ratio} at m=({m1_2}/2,{m2_2}/2) differs from {value}"
            )
    if value is None:
        raise InconsistentReduction(f"{context}: no m-pair with a nonzero CG coefficient")
    return value, used


def _reduced_block(req: TableRequest) -> Callable[[Tuple[ParamPoint, int, int, int, int]], List[Row]]:
    def compute(payload: Tuple[ParamPoint, int, int, int, int]) -> List[Row]:
        point, n1_2, r1_2, n2_2, r2_2 = payload
        r_2 = r1_2 + r2_2
        per_n: Dict[int, Dict[Tuple[int, int], Scalar]] = {}
        for m1_2 in range(-n1_2, n1_2 + 1, 2):
            for m2_2 in range(-n2_2, n2_2 + 1, 2):
                left, right = BasisLabel(n1_2, r1_2, m1_2), BasisLabel(n2_2, r2_2, m2_2)
                product = product_rho(PsiElement.basis(*left), PsiElement.basis(*right), point)
                check_selection_rules(left, right, product)
                for n_2 in range(abs(n1_2 - n2_2), n1_2 + n2_2 + 1, 2):
                    if abs(r_2) > n_2 or abs(m1_2 + m2_2) > n_2:
                        continue
                    per_n.setdefault(n_2, {})[(m1_2, m2_2)] = product.coefficient(n_2, r_2, m1_2 + m2_2)
        rows = []
        for n_2, coefficients in sorted(per_n.items()):
            context = (
                f"n1={format_half(n1_2)} n2={format_half(n2_2)} n={format_half(n_2)} "
                f"r1={format_half(r1_2)} r2={format_half(r2_2)}"
            )
            value, used = reduced_matrix_element(n1_2, n2_2, n_2, coefficients, context)
            row = {
                "point": str(point),
                "n1": format_half(n1_2),
                "n2": format_half(n2_2),
                "n": format_half(n_2),
                "r1": format_half(r1_2),
                "r2": format_half(r2_2),
                "reduced": str(value),
                "m_pairs": used,
            }
            if req.include_float:
                row["float"] = _float_column(value, point, req.float_precision)
            rows.append(row)
        return rows

    return compute


def gen_reduced_elements(req: TableRequest) -> List[Row]:
    """
    Rows (n1,n2,n,r1,r2,R) of the Wigner-Eckart reduced elements

    Every coupling (n1, n2 -> n) with r = r1 + r2 allowed for n yields one row,
    after checking that coefficient/CG agrees over all m-pairs.
    """
    payloads = []
    for point in req.points:
        for n1_2 in range(req.n_max2 + 1):
            for r1_2 in range(-n1_2, n1_2 + 1, 2):
                for n2_2 in range(req.n_max2 + 1):
                    for r2_2 in range(-n2_2, n2_2 + 1, 2):
                        payloads.append((point, n1_2, r1_2, n2_2, r2_2))
    return _run(req, "reduced", _reduced_block(req), payloads)


# -------------------------------------------------------------------- norms, Hahn, CG


def gen_norms(req: TableRequest) -> List[Row]:
    """||Xi(n,r,m)||^2 and its sign at every requested point"""

    def compute(payload: Tuple[ParamPoint, int, int]) -> List[Row]:
        point, n2, r2 = payload
        value = norm_sq(n2, r2, point)
        row = {
            "point": str(point),
            "n": format_half(n2),
            "r": format_half(r2),
            "norm_sq": str(value),
            "sign": str(norm_sign(n2, r2, point)) if point.is_numeric else "",
        }
        if req.include_float:
            row["float"] = _float_column(value, point, req.float_precision)
        return [row]

    payloads = [
        (point, n2, r2) for point in req.points for n2 in range(req.n_max2 + 1) for r2 in range(-n2, n2 + 1, 2)
    ]
    return _run(req, "norms", compute, payloads)


def gen_hahn(req: TableRequest) -> List[Row]:
    """Closed-form J0-polynomials of every Xi(n,r,m), checked against the rho pipeline"""

    def compute(payload: Tuple[ParamPoint, BasisLabel]) -> List[Row]:
        point, label = payload
        closed = xi_closed_form(*label, point=point)
        return [
            {
                "point": str(point),
                "n": format_half(label.n2),
                "r": format_half(label.r2),
                "m": format_half(label.m2),
                "case": closed_form_case(*label),
                "polynomial": " ; ".join(str(c) for c in closed.q),
                "matches_pipeline": closed == pipeline_reduced(*label, point=point),
            }
        ]

    payloads = [(point, label) for point in req.points for label in labels_up_to(req.n_max2)]
    return _run(req, "hahn", compute, payloads)


def gen_cg(req: TableRequest) -> List[Row]:
    """<j1 m1; j2 m2 | j m> for j1, j2 <= n_max"""

    def compute(payload: Tuple[int, int, int]) -> List[Row]:
        j1_2, j2_2, j_2 = payload
        rows = []
        for m1_2 in range(-j1_2, j1_2 + 1, 2):
            for m2_2 in range(-j2_2, j2_2 + 1, 2):
                m_2 = m1_2 + m2_2
                if abs(m_2) > j_2:
                    continue
                value = clebsch_gordan(j1_2, j2_2, j_2, m1_2, m2_2, m_2)
                row = {
                    "j1": format_half(j1_2),
                    "m1": format_half(m1_2),
                    "j2": format_half(j2_2),
                    "m2": format_half(m2_2),
                    "j": format_half(j_2),
                    "m": format_half(m_2),
                    "cg": str(value),
                }
                if req.include_float:
                    row["float"] = _format_complex(value.to_complex(), req.float_precision)
                rows.append(row)
        return rows

    payloads = []
    for j1_2 in range(req.n_max2 + 1):
        for j2_2 in range(req.n_max2 + 1):
            for j_2 in range(abs(j1_2 - j2_2), j1_2 + j2_2 + 1, 2):
                payloads.append((j1_2, j2_2, j_2))
    return _run(req, "cg", compute, payloads)


# -------------------------------------------------------------------- classical limit


def _radius(point: ParamPoint) -> float:
    """R at eps = 0 is Rh; symbolic points fall back to R = 1"""
    if point.rhat is None:
        return 1.0
    return point.rhat.evaluate_float().real


def gen_classical(req: TableRequest) -> List[Row]:
    """
    xi at eps = 0 against the rotation-matrix form (both binomial indices)
    and the Jacobi-limit closed form, at random Euler angles
    """
    rng = random.Random(req.seed)
    samples = [EulerAngles.random(rng) for _ in range(req.classical_samples)]
    radius = _radius(req.points[0])

    def compute(payload: Tuple[int, EulerAngles, BasisLabel]) -> List[Row]:
        index, angles, label = payload
        direct = xi_classical(*label, radius, angles)
        row = {
            "sample": index,
            "alpha": f"{angles.alpha:.{req.float_precision}g}",
            "beta": f"{angles.beta:.{req.float_precision}g}",
            "gamma": f"{angles.gamma:.{req.float_precision}g}",
            "n": format_half(label.n2),
            "r": format_half(label.r2),
            "m": format_half(label.m2),
            "value": _format_complex(direct, req.float_precision),
        }
        for binomial_index in BINOMIAL_INDICES:
            reference = classical_rotation_form(*label, radius, angles, binomial_index=binomial_index)
            row[f"residual_{binomial_index.replace('+', '_plus_')}"] = f"{abs(direct - reference):.3e}"
        row["residual_hahn_eps0"] = f"{abs(direct - hahn_eps0_form(*label, radius, angles)):.3e}"
        return [row]

    payloads = [(i, angles, label) for i, angles in enumerate(samples) for label in labels_up_to(req.n_max2)]
    return _run(req, "classical", compute, payloads)


GENERATORS: Dict[str, Callable[[TableRequest], List[Row]]] = {
    "structure": gen_structure_constants,
    "reduced": gen_reduced_elements,
    "norms": gen_norms,
    "hahn": gen_hahn,
    "cg": gen_cg,
    "classical": gen_classical,
}


def generate(req: TableRequest) -> List[Row]:
    if req.kind not in GENERATORS:
        raise ValueError(f"{req.kind!r} is not a table kind")
    rows = GENERATORS[req.kind](req)
    logger.log_event("table_generated", {"kind": req.kind, "rows": len(rows), "n_max": format_half(req.n_max2)})
    return rows


# -------------------------------------------------------------------- writers


def render(rows: List[Row], fmt: str) -> str:
    """CSV with a header row, or a JSON array mirroring it"""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buffer = io.StringIO()
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buffer.getvalue()


def write_table(rows: List[Row], fmt: str, out: Optional[str] = None) -> Optional[Path]:
    """Write to out (parents created) or to stdout when out is None or '-'"""
    text = render(rows, fmt)
    if out is None or out == "-":
        sys.stdout.write(text)
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path
