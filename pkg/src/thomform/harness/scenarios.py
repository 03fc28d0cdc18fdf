"""One runner per identity.  Each builds both sides independently and compares
them exactly at ``compare_order`` in the base variables."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

from gmpy2 import mpq

from .. import oracle
from ..coeff import Jet
from ..forms import Chart, ChartForm, substitute_fiber_frame
from ..gaussian import (WickInput, fiber_integrate, fiber_integrate_rotated, gaussian_integral_direct,
                        pullback_inclusion, wick, wick_integrand)
from ..matforms import (FormMatrix, JetMatrix, OrthoJetMatrix, block, cayley, constrain, curvature_structure,
                        frame_connection, maurer_cartan, reflection, restricted_connection)
from ..mq import mq_form, thom_gaussian
from .generators import partition_from, random_jet, random_partition_of_unity, random_skew_forms, random_skew_jet
from .report import FAIL, PASS, SIGN_DISCREPANCY, VerificationReport

# how many orders of base accuracy each identity loses to exterior derivatives
DERIVATIVE_LOSS = {
    "theorem-nat": 1,
    "theorem-res": 1,
    "closedness": 1,
    "normalization": 0,
    "lemma-nat": 1,
    "lemma-part": 1,
    "theorem-patch": 1,
    "wick-crosscheck": 0,
}
ORACLE_POINTS = 3
ORACLE_RTOL = 1e-9


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one scenario run.

    ``n``/``m`` are the ranks of V and its complement; for ``wick-crosscheck``
    they are the ambient dimension l and the number of rows s.  ``variant``
    selects special instances (``constant-xi``, ``equal-thetas`` for the
    patching scenarios, ``cayley`` connections for closedness/normalization,
    ``one-form`` rows for Wick).
    """

    scenario: str
    n: int = 2
    m: int = 1
    d: int = 1
    K: int = 3
    s: int = 2
    seed: int = 1
    compare_order: int | None = None
    variant: str = "random"
    oracle: bool = True

    def __post_init__(self) -> None:
        if self.scenario not in DERIVATIVE_LOSS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.compare_order is None:
            object.__setattr__(self, "compare_order", max(0, self.K - DERIVATIVE_LOSS[self.scenario]))
        if self.compare_order > self.K:
            raise ValueError("compare_order cannot exceed K")

    def params(self) -> dict:
        p = asdict(self)
        p.pop("scenario")
        return p


def _report(spec, witness, started, counts, oracle_info=None, verdict=None) -> VerificationReport:
    if verdict is None:
        verdict = PASS if witness is None else FAIL
    return VerificationReport(spec.scenario, spec.params(), verdict, witness,
                              (time.perf_counter() - started) * 1000.0, counts, oracle_info)


def _oracle_result(worst: float) -> dict:
    return {"points": ORACLE_POINTS, "max_rel_err": float(f"{worst:.3e}"), "agrees": worst <= ORACLE_RTOL}


def _points(spec) -> list:
    return oracle.random_points(spec.d, ORACLE_POINTS, spec.seed)


def _with_oracle(spec, witness, oracle_info):
    """An exact pass that the oracle contradicts is reported as a failure."""
    if witness is None and oracle_info is not None and not oracle_info["agrees"]:
        return {"term": "<oracle>", "left": "exact pass", "right": f"numeric rel err {oracle_info['max_rel_err']}"}
    return witness


def run_theorem_nat(spec: ScenarioSpec) -> VerificationReport:
    """Push-forward of the standard Gaussian Thom form along a rotating splitting."""
    started = time.perf_counter()
    n, m, d, K = spec.n, spec.m, spec.d, spec.K
    if n < 1 or m < 1:
        raise ValueError("theorem-nat needs n >= 1 and m >= 1")
    N = n + m
    A = cayley(random_skew_jet(N, d, K, spec.seed))
    phi0 = thom_gaussian(Chart(d, N, K))
    pulled = substitute_fiber_frame(phi0, A, Chart(d, N, K, split=n))  # y = A x
    rhs = fiber_integrate(pulled, range(n, N))
    theta, omega = restricted_connection(A, n)
    lhs = mq_form(Chart(d, n, K), theta, omega)
    witness = lhs.difference(rhs, spec.compare_order)
    info = None
    if spec.oracle:
        info = _oracle_result(oracle.confirm_integral(lhs, pulled, range(n, N), spec.compare_order, _points(spec)))
    counts = {"integrand": pulled.term_count(), "pushforward": rhs.term_count(), "mq": lhs.term_count()}
    return _report(spec, _with_oracle(spec, witness, info), started, counts, info)


def run_theorem_res(spec: ScenarioSpec) -> VerificationReport:
    """Restriction: push-forward of the ambient MQ form equals the MQ form of the
    constrained connection."""
    started = time.perf_counter()
    n, m, d, K = spec.n, spec.m, spec.d, spec.K
    if n < 1 or m < 1:
        raise ValueError("theorem-res needs n >= 1 and m >= 1")
    N = n + m
    theta_amb = random_skew_forms(N, d, K, spec.seed)
    omega_amb = curvature_structure(theta_amb)
    ambient = mq_form(Chart(d, N, K, split=n), theta_amb, omega_amb)
    rhs = fiber_integrate(ambient, range(n, N))
    theta_v = block(theta_amb, "oo", n)
    lhs = mq_form(Chart(d, n, K), theta_v, curvature_structure(theta_v))
    witness = lhs.difference(rhs, spec.compare_order)
    info = None
    if spec.oracle:
        info = _oracle_result(oracle.confirm_integral(lhs, ambient, range(n, N), spec.compare_order, _points(spec)))
    counts = {"ambient_mq": ambient.term_count(), "pushforward": rhs.term_count(), "mq": lhs.term_count()}
    return _report(spec, _with_oracle(spec, witness, info), started, counts, info)


def _connection(spec: ScenarioSpec) -> tuple[FormMatrix, FormMatrix]:
    """(theta, omega) on a rank-n bundle: from a Cayley frame or a random skew matrix."""
    n, d, K = spec.n, spec.d, spec.K
    if spec.variant == "cayley":
        A = cayley(random_skew_jet(n + max(spec.m, 1), d, K, spec.seed))
        theta, _ = restricted_connection(A, n)
    else:
        theta = random_skew_forms(n, d, K, spec.seed)
    return theta, curvature_structure(theta)


def run_closedness(spec: ScenarioSpec) -> VerificationReport:
    started = time.perf_counter()
    theta, omega = _connection(spec)
    form = mq_form(Chart(spec.d, spec.n, spec.K), theta, omega)
    dform = form.d()
    zero = type(dform).zero(dform.chart)
    witness = dform.difference(zero, spec.compare_order)
    info = None
    if spec.oracle:
        worst = max(oracle.evaluate_at(dform.truncate(spec.compare_order), p).max_abs() for p in _points(spec))
        info = _oracle_result(worst)
    return _report(spec, _with_oracle(spec, witness, info), started,
                   {"mq": form.term_count(), "d_mq": dform.truncate(spec.compare_order).term_count()}, info)


def run_normalization(spec: ScenarioSpec) -> VerificationReport:
    started = time.perf_counter()
    theta, omega = _connection(spec)
    form = mq_form(Chart(spec.d, spec.n, spec.K), theta, omega)
    total = fiber_integrate(form, range(spec.n))
    witness = total.difference(ChartForm.one(total.chart), spec.compare_order)
    info = None
    if spec.oracle:
        one = ChartForm.one(total.chart)
        info = _oracle_result(oracle.confirm_integral(one, form, range(spec.n), spec.compare_order, _points(spec)))
    return _report(spec, _with_oracle(spec, witness, info), started,
                   {"mq": form.term_count(), "integral": total.term_count()}, info)


def _first(*witnesses):
    return next((w for w in witnesses if w is not None), None)


def _tag(witness, label):
    return None if witness is None else {"check": label, **witness}


def run_lemma_nat(spec: ScenarioSpec) -> VerificationReport:
    """Constraining is transitive along nested subbundles and commutes with direct sums."""
    started = time.perf_counter()
    n, m, d, K, order = spec.n, spec.m, spec.d, spec.K, spec.compare_order
    N = n + m
    n1 = n + 1
    theta = random_skew_forms(N, d, K, spec.seed, tag=1)

    identity = JetMatrix.identity(N, d, K)
    w_identity = _tag(constrain(theta, identity).difference(theta, order), "identity")

    q1 = JetMatrix.scalar_diag([-1] * n1 + [1] * (N - n1), d, K)
    q2 = JetMatrix.scalar_diag([-1] * n + [1] * (N - n), d, K)
    nested = block(constrain(constrain(theta, q1), q2), "oo", n)
    direct = block(constrain(theta, q2), "oo", n)
    w_axis = _first(_tag(nested.difference(direct, order), "nested-axis"),
                    _tag(direct.difference(block(theta, "oo", n), order), "axis-restriction"))

    A = cayley(random_skew_jet(N, d, K, spec.seed, tag=2))
    r1, r2 = reflection(A, n1), reflection(A, n)
    nested_r = block(frame_connection(constrain(constrain(theta, r1), r2), A), "oo", n)
    direct_r = block(frame_connection(constrain(theta, r2), A), "oo", n)
    restricted = block(frame_connection(theta, A), "oo", n)
    w_rot = _first(_tag(nested_r.difference(direct_r, order), "nested-rotated"),
                   _tag(direct_r.difference(restricted, order), "rotated-restriction"))

    theta2 = random_skew_forms(n + 1, d, K, spec.seed, tag=3)
    A2 = cayley(random_skew_jet(n + 1, d, K, spec.seed, tag=4))
    s1, s2 = reflection(A, n), reflection(A2, 1)
    summed = constrain(FormMatrix.block_diag(theta, theta2), JetMatrix.block_diag(s1, s2))
    separate = FormMatrix.block_diag(constrain(theta, s1), constrain(theta2, s2))
    w_sum = _tag(summed.difference(separate, order), "direct-sum")

    info = None
    if spec.oracle:
        worst = 0.0
        for a, b in ((nested_r, direct_r), (summed, separate)):
            for ra, rb in zip(a.rows, b.rows):
                for x, y in zip(ra, rb):
                    worst = max(worst, oracle.confirm_equal(x, y, order, _points(spec)))
        info = _oracle_result(worst)
    witness = _first(w_identity, w_axis, w_rot, w_sum)
    return _report(spec, _with_oracle(spec, witness, info), started,
                   {"theta": theta.term_count(), "nested_rotated": nested_r.term_count()}, info)


def _xi(spec: ScenarioSpec) -> list[Jet]:
    if spec.variant in ("constant-xi", "equal-thetas"):
        return list(partition_from(Jet.constant(mpq(1, 2), spec.d, spec.K)))
    return random_partition_of_unity(2, spec.d, spec.K, spec.seed, tag=3)


def partition_block_matrix(frames: list[JetMatrix], xi: list[Jet]) -> JetMatrix:
    """The (s+1) x (s+1) block matrix built from frames A_k and a quadratic partition xi."""
    N = frames[0].shape[0]
    d, K = frames[0].base_dim, frames[0].order
    eye = JetMatrix.identity(N, d, K)
    zero = JetMatrix.zeros(N, N, d, K)
    s = len(frames)
    top = [zero] + [eye.scale(-x) for x in xi]
    rows = [top]
    for k in range(s):
        row = [frames[k].scale(xi[k])]
        for j in range(s):
            c = (1 if j == k else 0) - xi[k] * xi[j]
            row.append(frames[k].scale(c))
        rows.append(row)
    return JetMatrix.block(rows)


def run_lemma_part(spec: ScenarioSpec) -> VerificationReport:
    started = time.perf_counter()
    n, m, d, K, order = spec.n, spec.m, spec.d, spec.K, spec.compare_order
    if spec.s != 2:
        raise ValueError("lemma-part is implemented for s = 2")
    N = n + m
    frames = [cayley(random_skew_jet(N, d, K, spec.seed, tag=k + 1)) for k in range(2)]
    xi = _xi(spec)
    A = partition_block_matrix(frames, xi)
    w_orth = None
    if not A.is_orthogonal():
        gram = A.T @ A
        w_orth = {"check": "orthogonality", "term": "A^T A", "left": "not identity", "right": "identity"}
        for i, row in enumerate(gram.rows):
            for j, e in enumerate(row):
                if not e.equals(Jet.constant(1 if i == j else 0, d, K)):
                    w_orth = {"check": "orthogonality", "term": f"(A^T A)[{i + 1},{j + 1}]",
                              "left": str(e), "right": str(int(i == j))}
                    break
            else:
                continue
            break
    lhs = block(maurer_cartan(OrthoJetMatrix.of(A, check=False)), "oo", n)
    rhs = FormMatrix.zeros(n, n, lhs.chart)
    for frame, x in zip(frames, xi):
        rhs = rhs + block(maurer_cartan(frame), "oo", n).scale(x * x)
    w_mc = _tag(lhs.difference(rhs, order), "maurer-cartan-oo")
    info = None
    if spec.oracle:
        worst = 0.0
        for ra, rb in zip(lhs.rows, rhs.rows):
            for a, b in zip(ra, rb):
                worst = max(worst, oracle.confirm_equal(a, b, order, _points(spec)))
        info = _oracle_result(worst)
    witness = _first(w_orth, w_mc)
    return _report(spec, _with_oracle(spec, witness, info), started,
                   {"block_size": A.shape[0], "mc_oo": lhs.term_count()}, info)


def run_theorem_patch(spec: ScenarioSpec) -> VerificationReport:
    """MQ form of a patched connection vs. pulled-back push-forward of the direct sum."""
    started = time.perf_counter()
    n, d, K, order = spec.n, spec.d, spec.K, spec.compare_order
    if spec.s != 2:
        raise ValueError("theorem-patch is implemented for s = 2")
    xi1, xi2 = _xi(spec)
    theta1 = random_skew_forms(n, d, K, spec.seed, tag=1)
    theta2 = theta1 if spec.variant == "equal-thetas" else random_skew_forms(n, d, K, spec.seed, tag=2)

    theta = theta1.scale(xi1 * xi1) + theta2.scale(xi2 * xi2)
    lhs = mq_form(Chart(d, n, K), theta, curvature_structure(theta))

    big_theta = FormMatrix.block_diag(theta1, theta2)
    big = mq_form(Chart(d, 2 * n, K, split=n), big_theta, curvature_structure(big_theta))
    eye = JetMatrix.identity(n, d, K)
    R = OrthoJetMatrix.of(JetMatrix.block([[eye.scale(xi1), eye.scale(-xi2)],
                                           [eye.scale(xi2), eye.scale(xi1)]]))
    iota = JetMatrix.block([[eye.scale(xi1)], [eye.scale(xi2)]])
    pushed = fiber_integrate_rotated(big, R, n)
    # push-forward coordinates are taken against the first n columns of R
    iota_in_frame = R.sub(range(2 * n), range(n)).T @ iota
    rhs = pullback_inclusion(pushed, iota_in_frame)

    witness = lhs.difference(rhs, order)
    verdict = None
    if witness is not None and lhs.equals(-rhs, order):
        verdict = SIGN_DISCREPANCY
    info = None
    if spec.oracle:
        rotated = substitute_fiber_frame(big, R, big.chart)
        info = _oracle_result(oracle.confirm_integral(lhs, rotated, range(n, 2 * n), order, _points(spec)))
    counts = {"ambient_mq": big.term_count(), "pushforward": pushed.term_count(), "mq": lhs.term_count()}
    return _report(spec, _with_oracle(spec, witness, info), started, counts, info, verdict)


def random_wick_input(l: int, s: int, d: int, K: int, seed: int, one_forms: bool) -> WickInput:
    chart = Chart(d, 0, K)
    rows = []
    for k in range(s):
        row = []
        for j in range(l):
            if one_forms:
                entry = ChartForm.zero(chart)
                for a in range(d):
                    f = random_jet(d, K, seed, tag=100 * (k * l + j) + a + 1)
                    entry = entry + ChartForm.dt(chart, a) * f
            else:
                entry = ChartForm.from_jet(chart, random_jet(d, K, seed, tag=100 * (k * l + j)))
            row.append(entry)
        rows.append(row)
    return WickInput(l, rows, chart)


def run_wick_crosscheck(spec: ScenarioSpec) -> VerificationReport:
    """Pairing-sum Wick formula vs. factorized moments (l = n, s = m)."""
    started = time.perf_counter()
    inp = random_wick_input(spec.n, spec.m, spec.d, spec.K, spec.seed, spec.variant == "one-form")
    by_pairs = wick(inp)
    by_moments = gaussian_integral_direct(inp)
    witness = by_pairs.difference(by_moments, spec.compare_order)
    info = None
    if spec.oracle:
        integrand = wick_integrand(inp)
        info = _oracle_result(oracle.confirm_integral(by_pairs, integrand, range(inp.l),
                                                      spec.compare_order, _points(spec)))
    return _report(spec, _with_oracle(spec, witness, info), started,
                   {"wick": by_pairs.term_count(), "moments": by_moments.term_count()}, info)


SCENARIOS = {
    "theorem-nat": run_theorem_nat,
    "theorem-res": run_theorem_res,
    "closedness": run_closedness,
    "normalization": run_normalization,
    "lemma-nat": run_lemma_nat,
    "lemma-part": run_lemma_part,
    "theorem-patch": run_theorem_patch,
    "wick-crosscheck": run_wick_crosscheck,
}


def run_scenario(spec: ScenarioSpec) -> VerificationReport:
    return SCENARIOS[spec.scenario](spec)
