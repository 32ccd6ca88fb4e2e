"""End-to-end jobs for a multiplicatively degenerating curve.

A job fixes the prime, working precision, the chart count r (the curve
parameter is a uniformizer power pi^r times a unit), an optional
Eisenstein polynomial cutting out the ground field, and a branch point q
for the logarithm. The run certifies the standard cohomology classes on
both sides of the comparison, extracts Frobenius, monodromy and the
branch period matrix by expressing operator images in the class basis,
locates the one-form line of the fiber, assembles the filtered module
and renders everything into a deterministic JSON-ready report.

Verification suites re-derive key identities from scratch on randomized
data; they are what the `verify` command runs.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction

from .cech import (BlockIndex, CechSpec, cech_D, cech_frobenius, cech_N,
                   cech_psi, class_e1, class_e2, express_in_classes, h_ranks,
                   is_cocycle, operator_matrix, top_class, unit_class)
from .charts import ChartElement
from .field import FieldDescriptor, k_teichmuller, parse_eisenstein
from .kimhain import UForm
from .linalg import PrecMatrix, kernel_basis, row_reduce
from .padic import PadicContext
from .phin import (FilteredPhiNModule, branch_transition, embed_matrix,
                   exp_unipotent, matrix_inverse, matrix_same_at, tate_object)
from .plog import LogBranch, branch_from_spec

_VERSION = "0.1.0"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class JobSpec:
    """Parameters of one run; windows default to S = T = 2p + 2, U = 3."""

    __slots__ = ("p", "prec", "r", "eisenstein", "q", "S", "T", "U", "slack")

    def __init__(self, p: int, prec: int, r: int, eisenstein: str | None = None,
                 q: str = "pi", S: int | None = None, T: int | None = None,
                 U: int = 3, slack: int = 5):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if prec < 8:
            raise ValueError("working precision below 8 leaves no room to certify")
        if r < 1:
            raise ValueError("need r >= 1 charts")
        self.p = p
        self.prec = prec
        self.r = r
        self.eisenstein = eisenstein
        self.q = q
        self.S = 2 * p + 2 if S is None else S
        self.T = 2 * p + 2 if T is None else T
        self.U = U
        self.slack = slack
        if self.T < p or self.S < p:
            raise ValueError("windows must at least contain the Frobenius image "
                             "of the class monomials")

    def resized(self, S, T, U) -> "JobSpec":
        return JobSpec(self.p, self.prec, self.r, self.eisenstein, self.q,
                       S, T, U, self.slack)


class TateComputation:
    """All objects produced by one run, before report rendering."""

    __slots__ = ("job", "field", "base", "hk", "dr", "branch", "lam",
                 "hk_classes", "dr_classes", "cocycle_cert",
                 "phi", "n_pi", "psi", "psi_inv",
                 "h0_phi", "h2_phi", "h2_n", "h0_psi", "h2_psi",
                 "fil_dr", "fil_hk", "module",
                 "ranks_hk", "ranks_dr", "ranks_tainted")


def _columns_matrix(field, columns) -> PrecMatrix:
    m = PrecMatrix(field, len(columns[0]), len(columns))
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            m.set_entry(i, j, v)
    return m


def _operator_in_basis(op, classes, floor_pi) -> PrecMatrix:
    cols = [express_in_classes(op(cls), classes, floor_pi)[0] for cls in classes]
    return _columns_matrix(classes[0].spec.field, cols)


def fiber_one_form_lines(dr: CechSpec, classes, floor_pi: int):
    """Classes of degree-1 cocycles with no overlap component.

    These are the candidates for the one-form line of the fiber: global
    one-forms of the cover glue to a cocycle exactly when the overlap
    component vanishes. Returns independent coordinate vectors in the
    given class basis."""
    idx1 = BlockIndex(dr, 1, [0])
    idx2 = BlockIndex(dr, 2, [0])
    mat, _ = operator_matrix(idx1, idx2, cech_D)
    zcols = [k for k, key in enumerate(idx1.keys) if key[1] == "Z"]
    sub = PrecMatrix(dr.field, len(idx2), len(zcols))
    for newc, oldc in enumerate(zcols):
        for row in range(len(idx2)):
            v = mat.rows[row].get(oldc)
            if v is not None:
                sub.rows[row][newc] = v
    lines = []
    for vec in kernel_basis(sub, floor_pi):
        coch = idx1.cochain({zcols[k]: v for k, v in vec.items()})
        coords, _ = express_in_classes(coch, classes, floor_pi)
        if all(c.is_zero_at(floor_pi) for c in coords):
            continue
        lines.append(coords)
    if not lines:
        return []
    stacked = PrecMatrix(dr.field, len(lines), len(classes))
    for i, coords in enumerate(lines):
        for j, v in enumerate(coords):
            stacked.set_entry(i, j, v)
    red = row_reduce(stacked)
    red.rank_at(floor_pi)
    return [[red.echelon.entry(i, j) for j in range(len(classes))]
            for i, _ in red.pivots]


def compute_tate(job: JobSpec) -> TateComputation:
    ctx = PadicContext(job.p, job.prec)
    field = parse_eisenstein(job.eisenstein, ctx) if job.eisenstein \
        else FieldDescriptor.base(ctx)
    base = FieldDescriptor.base(ctx)
    out = TateComputation()
    out.job = job
    out.field = field
    out.base = base
    out.hk = CechSpec(job.r, "hk", base, job.S, job.T, job.U)
    out.dr = CechSpec(job.r, "dr", field, job.S, job.T, 0, point=field.pi())
    out.branch = branch_from_spec(field, job.q)
    out.lam = -out.branch.log_pi()
    floor_b = job.prec - job.slack
    floor_k = field.e * (job.prec - job.slack)

    e1h, e2h = class_e1(out.hk), class_e2(out.hk)
    unith, toph = unit_class(out.hk), top_class(out.hk)
    e1d, e2d = class_e1(out.dr), class_e2(out.dr)
    unitd, topd = unit_class(out.dr), top_class(out.dr)
    out.hk_classes = {"unit": unith, "e1": e1h, "e2": e2h, "top": toph}
    out.dr_classes = {"unit": unitd, "e1": e1d, "e2": e2d, "top": topd}
    out.cocycle_cert = {}
    for side, table in (("hk", out.hk_classes), ("dr", out.dr_classes)):
        floor = floor_b if side == "hk" else floor_k
        for name, cls in table.items():
            ok, depth = is_cocycle(cls, floor)
            out.cocycle_cert[f"{side}.{name}"] = (ok, depth)

    h1h = [e1h, e2h]
    out.phi = _operator_in_basis(cech_frobenius, h1h, floor_b)
    out.n_pi = _operator_in_basis(cech_N, h1h, floor_b)
    out.h0_phi = express_in_classes(cech_frobenius(unith), [unith], floor_b)[0][0]
    out.h2_phi = express_in_classes(cech_frobenius(toph), [toph], floor_b)[0][0]
    out.h2_n = express_in_classes(cech_N(toph), [toph], floor_b)[0][0]

    h1d = [e1d, e2d]
    psi_cols = [express_in_classes(cech_psi(cls, out.lam, out.dr), h1d,
                                   floor_k)[0] for cls in h1h]
    out.psi = _columns_matrix(field, psi_cols)
    out.psi_inv = matrix_inverse(out.psi)
    out.h0_psi = express_in_classes(cech_psi(unith, out.lam, out.dr),
                                    [unitd], floor_k)[0][0]
    out.h2_psi = express_in_classes(cech_psi(toph, out.lam, out.dr),
                                    [topd], floor_k)[0][0]

    out.fil_dr = fiber_one_form_lines(out.dr, h1d, floor_k)
    out.fil_hk = []
    for coords in out.fil_dr:
        vec = out.psi_inv.apply_to(dict(enumerate(coords)))
        out.fil_hk.append([vec.get(i, field.zero()) for i in range(2)])

    phi_k = embed_matrix(out.phi, field)
    n_k = embed_matrix(out.n_pi, field)
    one, zero = field.one(), field.zero()
    filtration = {0: [[one, zero], [zero, one]]}
    if out.fil_hk:
        filtration[1] = out.fil_hk
    out.module = FilteredPhiNModule(field, phi_k, n_k, filtration)

    out.ranks_hk, t1 = h_ranks(out.hk)
    out.ranks_dr, t2 = h_ranks(out.dr)
    out.ranks_tainted = t1 or t2
    return out


# -- report rendering ----------------------------------------------------------


def _fmt(x) -> str:
    return x.expansion_str()


def _fmt_matrix(m: PrecMatrix):
    return [[_fmt(m.entry(i, j)) for j in range(m.ncols)] for i in range(m.nrows)]


def render_report(comp: TateComputation) -> dict:
    job = comp.job
    field = comp.field
    floor_k = field.e * (job.prec - job.slack)
    mod = comp.module
    k0 = tate_object(field, 0)
    km1 = tate_object(field, -1)
    h0_phi_k = field.embed_scalar(comp.h0_phi.coeffs[0])
    h2_phi_k = field.embed_scalar(comp.h2_phi.coeffs[0])
    h0_ok = (h0_phi_k.same_at(k0.phi.entry(0, 0), floor_k)
             and comp.cocycle_cert["hk.unit"][0])
    h2_ok = (h2_phi_k.same_at(km1.phi.entry(0, 0), floor_k)
             and comp.h2_n.is_zero_at(comp.base.e * (job.prec - job.slack)))
    report = {
        "spec": {
            "p": job.p,
            "prec": job.prec,
            "r": job.r,
            "eisenstein": field.poly_str(),
            "ramification": field.e,
            "q_branch": comp.branch.label,
            "lambda": _fmt(comp.lam),
        },
        "windows": {"S": job.S, "T": job.T, "U": job.U},
        "classes": {
            key: {"cocycle_ok": ok, "residual_depth": depth}
            for key, (ok, depth) in sorted(comp.cocycle_cert.items())
        },
        "matrices": {
            "frobenius": _fmt_matrix(comp.phi),
            "monodromy_pi": _fmt_matrix(comp.n_pi),
            "monodromy_ordp": _fmt_matrix(mod.n_ordp()),
            "psi": _fmt_matrix(comp.psi),
            "psi_inverse": _fmt_matrix(comp.psi_inv),
            "h0_frobenius": _fmt(comp.h0_phi),
            "h2_frobenius": _fmt(comp.h2_phi),
            "h2_monodromy": _fmt(comp.h2_n),
            "h0_psi": _fmt(comp.h0_psi),
            "h2_psi": _fmt(comp.h2_psi),
        },
        "filtration": {
            "jumps": {str(s): len(basis) for s, basis in mod.filtration.items()},
            "gr_dims": {str(s): d for s, d in mod.gr_dims().items()},
            "f1_dr_coords": [[_fmt(v) for v in vec] for vec in comp.fil_dr],
            "f1_hk_coords": [[_fmt(v) for v in vec] for vec in comp.fil_hk],
        },
        "identifications": {
            "h_ranks_hk": [comp.ranks_hk[d] for d in range(4)],
            "h_ranks_dr": [comp.ranks_dr[d] for d in range(4)],
            "ranks_tainted": comp.ranks_tainted,
            "h0_object": "K(0)" if h0_ok else "unidentified",
            "h2_object": "K(-1)" if h2_ok else "unidentified",
            "newton_number": str(mod.newton_number()),
            "hodge_number": mod.hodge_number(),
            "weakly_admissible": mod.is_weakly_admissible_numerically(),
            "frobenius_monodromy_relation": mod.check_relation(floor_k),
        },
        "suites": {},
        "meta": {
            "package": "tatehk",
            "version": _VERSION,
            "floor_pi": floor_k,
            "cap_pi": field.e * job.prec,
            "report_format": 1,
        },
    }
    return report


def run_tate_job(job: JobSpec, suites=()) -> dict:
    report = render_report(compute_tate(job))
    for name in suites:
        report["suites"][name] = verify_suite(name, p=job.p, prec=job.prec,
                                              r=job.r, eisenstein=job.eisenstein)
    return report


# -- verification suites -------------------------------------------------------


def _random_uform(rng, field, r, kind, n, degree, S, T, U, span=3,
                  imax=None, jmax=None, umax=None):
    total = UForm.zero(field, r, kind, n, degree, S, T, U)
    slots = {0: (0,), 1: (0, 1), 2: (0,)}[degree]
    imax = S // 2 if imax is None else imax
    jmax = T // 2 if jmax is None else jmax
    umax = U if umax is None else umax
    for _ in range(span):
        i = rng.randrange(0, imax + 1)
        j = rng.randrange(-jmax, jmax + 1)
        if kind == "W":
            j = abs(j)
        u = rng.randrange(0, umax + 1)
        slot = rng.choice(slots)
        coeff = field.from_int(rng.randrange(-9, 10))
        el = ChartElement.monomial(field, r, kind, n, degree, S, T, i, j,
                                   slot, coeff)
        total = total + UForm.from_chart(el, U, u)
    return total


def _suite_result(name, params, failures, checks):
    return {"suite": name, "params": params, "checks": checks,
            "failures": failures, "ok": not failures}


def _suite_kim_hain(p, prec, r, eisenstein, seed, trials):
    ctx = PadicContext(p, prec)
    field = FieldDescriptor.base(ctx)
    rng = random.Random(seed)
    S = T = 2 * p + 2
    U = 3
    cap = prec
    failures = []
    checks = 0
    skipped = 0
    trials = trials or 40
    p_scalar = field.from_int(p)
    for t in range(trials):
        kind = rng.choice(("Z", "W"))
        n = rng.randrange(1, r + 1)
        draw = dict(imax=max(1, S // 4), jmax=max(1, T // 4), umax=1)
        x = _random_uform(rng, field, r, kind, n, 0, S, T, U, **draw)
        y = _random_uform(rng, field, r, kind, n, 0, S, T, U, **draw)
        z = _random_uform(rng, field, r, kind, n, 0, S, T, U, **draw)
        w = _random_uform(rng, field, r, kind, n, 1, S, T, U, **draw)
        residuals = {
            "d_squared": x.d().d(),
            "w_d_squared": w.d().d(),
            "leibniz": x.mul(y).d() - (x.d().mul(y) + x.mul(y.d())),
            "n_derivation": x.mul(y).N() - (x.N().mul(y) + x.mul(y.N())),
            "nd_commute": w.d().N() - w.N().d(),
            "frobenius_twist": x.frobenius().N()
            - x.N().frobenius().scale(p_scalar),
            "frobenius_ring": x.mul(y).frobenius()
            - x.frobenius().mul(y.frobenius()),
            "frobenius_chain": w.frobenius().d() - w.d().frobenius(),
            "associativity": x.mul(y).mul(z) - x.mul(y.mul(z)),
        }
        for label, res in residuals.items():
            if res.overflow:
                # a route left the monomial window; identities are only
                # certified on in-window data
                skipped += 1
                continue
            checks += 1
            if not res.is_zero_at(cap):
                failures.append(f"trial {t}: {label}")
    return _suite_result("kim_hain_algebra",
                         {"p": p, "prec": prec, "r": r, "seed": seed,
                          "trials": trials, "skipped": skipped},
                         failures, checks)


def _suite_branch_calculus(p, prec, r, eisenstein, seed, trials):
    ctx = PadicContext(p, prec)
    field = parse_eisenstein(eisenstein, ctx) if eisenstein \
        else FieldDescriptor.base(ctx)
    rng = random.Random(seed)
    floor = field.e * (prec - 3)
    failures = []
    checks = 0
    trials = trials or 30

    def random_unit():
        return field.one() + field.pi() * field.from_int(
            rng.randrange(1, p ** (prec - 2)))

    for t in range(trials):
        a = rng.randrange(1, 4)
        q = field.pi() ** a * random_unit()
        b = LogBranch(field, q)
        checks += 1
        if not b.log(q).is_zero_at(floor):
            failures.append(f"trial {t}: log_q(q) != 0")
        x = field.pi() ** rng.randrange(0, 3) * random_unit()
        y = field.pi() ** rng.randrange(0, 3) * random_unit()
        checks += 1
        if not (b.log(x * y) - b.log(x) - b.log(y)).is_zero_at(floor):
            failures.append(f"trial {t}: log not additive")
        tw = k_teichmuller(field.from_int(rng.randrange(1, p)))
        checks += 1
        if not b.log(tw).is_zero_at(floor):
            failures.append(f"trial {t}: log of a root of unity != 0")
        q2 = field.pi() ** rng.randrange(1, 4) * random_unit()
        b2 = LogBranch(field, q2)
        ax = x.ord_pi()
        checks += 1
        lhs = b.log(x) - b2.log(x)
        rhs = (b.log_pi() - b2.log_pi()) * field.from_int(ax)
        if not (lhs - rhs).is_zero_at(floor):
            failures.append(f"trial {t}: branches disagree off the uniformizer")
    return _suite_result("branch_calculus",
                         {"p": p, "prec": prec, "eisenstein": eisenstein,
                          "seed": seed, "trials": trials}, failures, checks)


def _suite_choice_of_pi(p, prec, r, eisenstein, seed, trials):
    specs = ["pi", "p", "p*(1+p)", "p^2*(1+p)"]
    floor = None
    runs = {}
    failures = []
    checks = 0
    base_job = JobSpec(p, prec, r, eisenstein, "pi")
    for qspec in specs:
        job = JobSpec(p, prec, r, eisenstein, qspec,
                      base_job.S, base_job.T, base_job.U)
        runs[qspec] = compute_tate(job)
        if floor is None:
            floor = runs[qspec].field.e * (prec - 5)
    for qa in specs:
        for qb in specs:
            if qa == qb:
                continue
            ca, cb = runs[qa], runs[qb]
            factor = branch_transition(ca.module, ca.branch, cb.branch)
            checks += 1
            if not matrix_same_at(cb.psi, ca.psi.matmul(factor), floor):
                failures.append(f"psi transition fails for {qa} -> {qb}")
            # same identity written with the inverse factor
            c = ca.branch.log(cb.branch.q) * ca.field.from_rational(
                Fraction(ca.field.e, cb.branch.m))
            inv = exp_unipotent(ca.module.n_ordp(), -c)
            checks += 1
            if not matrix_same_at(ca.psi, cb.psi.matmul(inv), floor):
                failures.append(f"inverse transition fails for {qa} -> {qb}")
    return _suite_result("choice_of_pi",
                         {"p": p, "prec": prec, "r": r,
                          "eisenstein": eisenstein, "seed": seed},
                         failures, checks)


def _suite_base_change(p, prec, r, eisenstein, seed, trials):
    eis = eisenstein or f"s^2 - {p}"
    ell = parse_eisenstein(eis, PadicContext(p, prec)).e
    small = compute_tate(JobSpec(p, prec, 1, None, "pi"))
    bigfield = parse_eisenstein(eis, PadicContext(p, prec))
    moved = small.module.base_change(bigfield)
    big = compute_tate(JobSpec(p, prec, ell, eis, "pi"))
    floor = bigfield.e * (prec - 5)
    failures = []
    checks = 3
    if not matrix_same_at(moved.phi, big.module.phi, floor):
        failures.append("frobenius changes under base change")
    if not matrix_same_at(moved.n_pi, big.module.n_pi, floor):
        failures.append("pi-normalized monodromy mismatch")
    if not matrix_same_at(moved.n_ordp(), big.module.n_ordp(), floor):
        failures.append("ord_p-normalized monodromy not invariant")
    return _suite_result("base_change",
                         {"p": p, "prec": prec, "eisenstein": eis,
                          "ell": ell}, failures, checks)


def _suite_truncation_stability(p, prec, r, eisenstein, seed, trials):
    job = JobSpec(p, prec, r, eisenstein, "p")
    comp = compute_tate(job)
    wide = compute_tate(job.resized(job.S + 4, job.T + 4, job.U + 1))
    floor = comp.field.e * (prec - 5)
    failures = []
    checks = 5
    for name in ("phi", "n_pi", "psi"):
        if not matrix_same_at(getattr(comp, name), getattr(wide, name), floor):
            failures.append(f"{name} moved when the windows grew")
    if comp.ranks_hk != wide.ranks_hk:
        failures.append("hk ranks moved when the windows grew")
    if comp.ranks_dr != wide.ranks_dr:
        failures.append("dr ranks moved when the windows grew")
    return _suite_result("truncation_stability",
                         {"p": p, "prec": prec, "r": r,
                          "eisenstein": eisenstein}, failures, checks)


_SUITES = {
    "kim_hain_algebra": _suite_kim_hain,
    "branch_calculus": _suite_branch_calculus,
    "choice_of_pi": _suite_choice_of_pi,
    "base_change": _suite_base_change,
    "truncation_stability": _suite_truncation_stability,
}


def suite_names():
    return sorted(_SUITES)


def verify_suite(name: str, p: int = 3, prec: int = 14, r: int = 2,
                 eisenstein: str | None = None, seed: int = 1,
                 trials: int | None = None) -> dict:
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {suite_names()}")
    return _SUITES[name](p, prec, r, eisenstein, seed, trials)


# -- report comparison ---------------------------------------------------------

_O_TAIL = re.compile(r"O\(pi\^(-?\d+)\)$")
_SHIFT = re.compile(r"^pi\^(-?\d+)\*\((.*)\)$")


def parse_expansion(s: str):
    """Digits and stated depth of an expansion string, or None."""
    if not isinstance(s, str):
        return None
    text = s.strip()
    shift = 0
    m = _SHIFT.match(text)
    if m:
        shift = int(m.group(1))
        text = m.group(2).strip()
    mo = _O_TAIL.search(text)
    if mo is None:
        return None
    depth = int(mo.group(1)) + shift
    body = text[:mo.start()].strip()
    if body.endswith("+"):
        body = body[:-1].strip()
    digits = {}
    if body:
        for term in body.split("+"):
            term = term.strip()
            if not term:
                return None
            m2 = re.fullmatch(r"(\d+)", term)
            m3 = re.fullmatch(r"(?:(\d+)\*)?pi(?:\^(\d+))?", term)
            if m2:
                digits[shift] = int(m2.group(1))
            elif m3:
                c = int(m3.group(1)) if m3.group(1) else 1
                k = int(m3.group(2)) if m3.group(2) else 1
                digits[k + shift] = c
            else:
                return None
    return digits, depth


def _values_differ(a, b) -> bool:
    ea, eb = parse_expansion(a), parse_expansion(b)
    if ea is not None and eb is not None:
        depth = min(ea[1], eb[1])
        positions = set(ea[0]) | set(eb[0])
        return any(ea[0].get(k, 0) != eb[0].get(k, 0)
                   for k in positions if k < depth)
    return a != b


def report_diff(a, b, path: str = "") -> list:
    """Differences between two reports, comparing expansion strings only
    up to the smaller stated depth. Empty list means agreement."""
    diffs = []
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b), key=str):
            sub = f"{path}/{key}"
            if key not in a:
                diffs.append({"path": sub, "a": None, "b": b[key]})
            elif key not in b:
                diffs.append({"path": sub, "a": a[key], "b": None})
            else:
                diffs.extend(report_diff(a[key], b[key], sub))
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            diffs.append({"path": path, "a": f"list of {len(a)}",
                          "b": f"list of {len(b)}"})
        else:
            for k, (xa, xb) in enumerate(zip(a, b)):
                diffs.extend(report_diff(xa, xb, f"{path}/{k}"))
    else:
        if type(a) is not type(b) and not (isinstance(a, str) and isinstance(b, str)):
            diffs.append({"path": path, "a": a, "b": b})
        elif _values_differ(a, b):
            diffs.append({"path": path, "a": a, "b": b})
    return diffs
