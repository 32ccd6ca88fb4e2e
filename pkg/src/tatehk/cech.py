"""Covering complex of the length-r chart polygon and its cohomology.

Cochains live on the two-chart-type cover: degree k holds Z-chart forms of
degree k together with W-chart forms of degree k-1 (the overlap data). The
total differential combines the chart differential d with the overlap map

    partial(eta)_n = twist(eta_{n+1}) - nat(eta_n)   (n < r)
    partial(eta)_r = nat(eta_r) - twist(eta_1)

so that D0(f) = (df, partial f), D1(a, b) = (da, db - partial a) and
D2(a, b) = db + partial a, with D compose D = 0 exactly.

Two sides share the machinery: the "hk" side uses divided-power u-forms
over the base scalars, the "dr" side uses fiber forms at a chosen point.

Everything splits over the weight grading (weight of a Z monomial is -j,
of a W monomial +j; all the structure maps are weight-homogeneous), which
keeps the linear algebra per weight block small. Ranks on the hk side go
through exact integer elimination since the differentials have integer
matrices.
"""

from __future__ import annotations

from .charts import _CHART_SLOTS, _FIBER_SLOTS, ChartElement, FiberElement
from .errors import (AmbiguousSolve, ChartMismatch, NotACoboundary, NotInSpan,
                     TaintedWindow)
from .field import FieldDescriptor, KElement
from .kimhain import UForm
from .linalg import (PrecMatrix, int_kernel_sparse, int_rank_sparse, rank_at,
                     row_reduce, solve)

# form degree of the Z-part and W-part of a cochain of each total degree
_ZDEG = {0: 0, 1: 1, 2: 2, 3: None}
_WDEG = {0: None, 1: 0, 2: 1, 3: 2}


class CechSpec:
    """Shape of the covering complex: chart count, side, scalars, windows."""

    __slots__ = ("r", "side", "field", "S", "T", "U", "point")

    def __init__(self, r: int, side: str, field: FieldDescriptor,
                 S: int, T: int, U: int = 0, point: KElement | None = None):
        if r < 1:
            raise ValueError("need at least one chart")
        if side not in ("hk", "dr"):
            raise ValueError("side must be 'hk' or 'dr'")
        if side == "hk" and field.e != 1:
            raise ValueError("hk side works over the base scalars")
        if side == "dr":
            if point is None or point.field != field:
                raise ValueError("dr side needs a specialization point in its field")
            if point.ord_pi() < 1:
                raise ValueError("specialization point must have positive valuation")
        self.r = r
        self.side = side
        self.field = field
        self.S = S
        self.T = T
        self.U = U
        self.point = point

    def __eq__(self, other):
        if not isinstance(other, CechSpec):
            return NotImplemented
        if (self.r, self.side, self.field, self.S, self.T, self.U) != \
                (other.r, other.side, other.field, other.S, other.T, other.U):
            return False
        return self.point is other.point or self.side == "hk" or \
            (self.point - other.point).is_zero()

    def resized(self, S: int, T: int, U: int) -> "CechSpec":
        return CechSpec(self.r, self.side, self.field, S, T, U, self.point)

    # -- element factories -------------------------------------------------

    def zero_part(self, part: str, n: int, degree: int):
        kind = {"Z": "Z", "W": "W"}[part] if self.side == "hk" else \
            {"Z": "XF", "W": "WF"}[part]
        if self.side == "hk":
            return UForm.zero(self.field, self.r, kind, n, degree,
                              self.S, self.T, self.U)
        return FiberElement.zero(self.field, self.r, kind, n, degree, self.T)

    def monomial_part(self, part: str, n: int, degree: int, i: int, j: int,
                      slot: int, u: int, coeff: KElement):
        if self.side == "hk":
            el = ChartElement.monomial(self.field, self.r, part, n, degree,
                                       self.S, self.T, i, j, slot, coeff)
            return UForm.from_chart(el, self.U, u)
        kind = "XF" if part == "Z" else "WF"
        return FiberElement.monomial(self.field, self.r, kind, n, degree,
                                     self.T, j, slot, coeff)

    def nat(self, el):
        if self.side == "hk":
            return el.restrict_nat()
        return el.restrict_nat(self.point)

    def twist(self, el, target_n: int):
        if self.side == "hk":
            return el.restrict_twist(target_n)
        return el.restrict_twist(target_n, self.point)

    def slots(self, degree: int):
        table = _CHART_SLOTS if self.side == "hk" else _FIBER_SLOTS
        return table.get(degree, ())

    def cap(self) -> int:
        return self.field.e * self.field.ctx.prec


class CechCochain:
    """Degree-k cochain: Z-part of form degree k, W-part of form degree k-1."""

    __slots__ = ("spec", "degree", "zpart", "wpart")

    def __init__(self, spec: CechSpec, degree: int, zpart, wpart):
        self.spec = spec
        self.degree = degree
        self.zpart = zpart
        self.wpart = wpart

    @classmethod
    def zero(cls, spec: CechSpec, degree: int):
        if degree not in (0, 1, 2, 3):
            raise ValueError("cochain degree out of range")
        zdeg, wdeg = _ZDEG[degree], _WDEG[degree]
        zpart = None if zdeg is None else \
            [spec.zero_part("Z", n, zdeg) for n in range(1, spec.r + 1)]
        wpart = None if wdeg is None else \
            [spec.zero_part("W", n, wdeg) for n in range(1, spec.r + 1)]
        return cls(spec, degree, zpart, wpart)

    def copy(self):
        z = None if self.zpart is None else list(self.zpart)
        w = None if self.wpart is None else list(self.wpart)
        return CechCochain(self.spec, self.degree, z, w)

    def _compatible(self, other: "CechCochain"):
        if self.spec != other.spec or self.degree != other.degree:
            raise ChartMismatch("cochains live in different complexes or degrees")

    def __add__(self, other):
        self._compatible(other)
        z = None if self.zpart is None else \
            [a + b for a, b in zip(self.zpart, other.zpart)]
        w = None if self.wpart is None else \
            [a + b for a, b in zip(self.wpart, other.wpart)]
        return CechCochain(self.spec, self.degree, z, w)

    def __neg__(self):
        z = None if self.zpart is None else [-a for a in self.zpart]
        w = None if self.wpart is None else [-a for a in self.wpart]
        return CechCochain(self.spec, self.degree, z, w)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        z = None if self.zpart is None else [a.scale(c) for a in self.zpart]
        w = None if self.wpart is None else [a.scale(c) for a in self.wpart]
        return CechCochain(self.spec, self.degree, z, w)

    def parts(self):
        out = []
        if self.zpart is not None:
            out.extend(("Z", n + 1, el) for n, el in enumerate(self.zpart))
        if self.wpart is not None:
            out.extend(("W", n + 1, el) for n, el in enumerate(self.wpart))
        return out

    @property
    def overflow(self) -> bool:
        return any(el.overflow for _, _, el in self.parts())

    def is_zero_at(self, floor_pi: int) -> bool:
        return all(el.is_zero_at(floor_pi) for _, _, el in self.parts())

    def residual_prec(self) -> int:
        return min((el.residual_prec() for _, _, el in self.parts()),
                   default=self.spec.cap())


def cech_partial(spec: CechSpec, zparts) -> list:
    """Overlap map on a tuple of Z-chart elements, one output per W chart."""
    r = spec.r
    out = []
    for n0 in range(r - 1):
        out.append(spec.twist(zparts[n0 + 1], n0 + 1) - spec.nat(zparts[n0]))
    out.append(spec.nat(zparts[r - 1]) - spec.twist(zparts[0], r))
    return out


def cech_D(c: CechCochain) -> CechCochain:
    """Total differential."""
    spec = c.spec
    if c.degree == 0:
        z = [el.d() for el in c.zpart]
        w = cech_partial(spec, c.zpart)
        return CechCochain(spec, 1, z, w)
    if c.degree == 1:
        z = [el.d() for el in c.zpart]
        pb = cech_partial(spec, c.zpart)
        w = [el.d() - q for el, q in zip(c.wpart, pb)]
        return CechCochain(spec, 2, z, w)
    if c.degree == 2:
        pb = cech_partial(spec, c.zpart)
        w = [el.d() + q for el, q in zip(c.wpart, pb)]
        return CechCochain(spec, 3, None, w)
    raise ValueError("no differential out of the top degree")


def cech_N(c: CechCochain) -> CechCochain:
    if c.spec.side != "hk":
        raise ChartMismatch("monodromy acts on the hk side")
    z = None if c.zpart is None else [el.N() for el in c.zpart]
    w = None if c.wpart is None else [el.N() for el in c.wpart]
    return CechCochain(c.spec, c.degree, z, w)


def cech_frobenius(c: CechCochain) -> CechCochain:
    if c.spec.side != "hk":
        raise ChartMismatch("Frobenius acts on the hk side")
    z = None if c.zpart is None else [el.frobenius() for el in c.zpart]
    w = None if c.wpart is None else [el.frobenius() for el in c.wpart]
    return CechCochain(c.spec, c.degree, z, w)


def cech_psi(c: CechCochain, lam: KElement, dr_spec: CechSpec) -> CechCochain:
    """Evaluate an hk cochain at u := lam, s := the dr specialization point."""
    if c.spec.side != "hk" or dr_spec.side != "dr":
        raise ChartMismatch("evaluation goes from the hk side to the dr side")
    if (c.spec.r, c.spec.S, c.spec.T) != (dr_spec.r, dr_spec.S, dr_spec.T):
        raise ChartMismatch("window mismatch between the two sides")
    a = dr_spec.point
    z = None if c.zpart is None else \
        [el.evaluate(lam, a, dr_spec.field) for el in c.zpart]
    w = None if c.wpart is None else \
        [el.evaluate(lam, a, dr_spec.field) for el in c.wpart]
    return CechCochain(dr_spec, c.degree, z, w)


# -- standard classes ---------------------------------------------------------


def unit_class(spec: CechSpec) -> CechCochain:
    """Degree-0 cocycle of constants 1."""
    c = CechCochain.zero(spec, 0)
    one = spec.field.one()
    c.zpart = [spec.monomial_part("Z", n, 0, 0, 0, 0, 0, one)
               for n in range(1, spec.r + 1)]
    return c


def class_e1(spec: CechSpec) -> CechCochain:
    """First basis class in degree 1: the constant 1 on the last W chart."""
    c = CechCochain.zero(spec, 1)
    c.wpart[spec.r - 1] = spec.monomial_part("W", spec.r, 0, 0, 0, 0, 0,
                                             spec.field.one())
    return c


def class_e2(spec: CechSpec) -> CechCochain:
    """Second basis class in degree 1.

    hk side: dlog w on every Z chart plus u-corrections (-u^[1] on the first
    r-1 W charts, +u^[1] on the last) making it a cocycle. dr side: -dlog v
    on every chart, no correction needed."""
    c = CechCochain.zero(spec, 1)
    one = spec.field.one()
    if spec.side == "hk":
        c.zpart = [spec.monomial_part("Z", n, 1, 0, 0, 1, 0, one)
                   for n in range(1, spec.r + 1)]
        w = []
        for n in range(1, spec.r + 1):
            sign = one if n == spec.r else -one
            w.append(spec.monomial_part("W", n, 0, 0, 0, 0, 1, sign))
        c.wpart = w
    else:
        c.zpart = [spec.monomial_part("Z", n, 1, 0, 0, 0, 0, -one)
                   for n in range(1, spec.r + 1)]
    return c


def top_class(spec: CechSpec) -> CechCochain:
    """Degree-2 generator: a relative one-form on the last W chart."""
    c = CechCochain.zero(spec, 2)
    one = spec.field.one()
    if spec.side == "hk":
        c.wpart[spec.r - 1] = spec.monomial_part("W", spec.r, 1, 0, 0, 1, 0, one)
    else:
        c.wpart[spec.r - 1] = spec.monomial_part("W", spec.r, 1, 0, 0, 0, 0, -one)
    return c


# -- weight-block bases and matrices ------------------------------------------


def part_weight(part: str, j: int) -> int:
    return -j if part == "Z" else j


def cochain_weights(c: CechCochain):
    """Sorted list of weights carrying a coefficient of the cochain."""
    found = set()
    for part, _, el in c.parts():
        if c.spec.side == "hk":
            for _, chart_el in el.items():
                for (_, j, _) in chart_el.coeffs:
                    found.add(part_weight(part, j))
        else:
            for (j, _) in el.coeffs:
                found.add(part_weight(part, j))
    return sorted(found)


class BlockIndex:
    """Ordered basis of the given weight blocks of one cochain degree."""

    def __init__(self, spec: CechSpec, degree: int, weights):
        self.spec = spec
        self.degree = degree
        self.weights = sorted(set(weights))
        self.keys = []
        for wt in self.weights:
            self.keys.extend(self._block(wt))
        self.pos = {k: idx for idx, k in enumerate(self.keys)}

    def _block(self, wt):
        spec = self.spec
        keys = []
        for part, deg in (("Z", _ZDEG[self.degree]), ("W", _WDEG[self.degree])):
            if deg is None:
                continue
            j = -wt if part == "Z" else wt
            if abs(j) > spec.T:
                continue
            slots = spec.slots(deg)
            for n in range(1, spec.r + 1):
                if spec.side == "hk":
                    for i in range(spec.S + 1):
                        for u in range(spec.U + 1):
                            for slot in slots:
                                keys.append((wt, part, n, i, u, slot))
                else:
                    for slot in slots:
                        keys.append((wt, part, n, 0, 0, slot))
        return keys

    def __len__(self):
        return len(self.keys)

    def basis_cochain(self, key) -> CechCochain:
        wt, part, n, i, u, slot = key
        spec = self.spec
        j = -wt if part == "Z" else wt
        deg = _ZDEG[self.degree] if part == "Z" else _WDEG[self.degree]
        c = CechCochain.zero(spec, self.degree)
        el = spec.monomial_part(part, n, deg, i, j, slot, u, spec.field.one())
        if part == "Z":
            c.zpart[n - 1] = el
        else:
            c.wpart[n - 1] = el
        return c

    def vector(self, c: CechCochain) -> dict:
        """Coefficient vector; raises if the cochain leaves the index."""
        if c.degree != self.degree or c.spec != self.spec:
            raise ChartMismatch("cochain does not match the block index")
        vec = {}
        for part, n, el in c.parts():
            if self.spec.side == "hk":
                entries = ((i, j, slot, u, coeff)
                           for u, chart_el in el.items()
                           for (i, j, slot), coeff in chart_el.items())
            else:
                entries = ((0, j, slot, 0, coeff)
                           for (j, slot), coeff in el.items())
            for i, j, slot, u, coeff in entries:
                key = (part_weight(part, j), part, n, i, u, slot)
                idx = self.pos.get(key)
                if idx is None:
                    raise ChartMismatch(
                        f"coefficient at {key} falls outside the block index")
                vec[idx] = coeff
        return vec

    def cochain(self, vec: dict) -> CechCochain:
        c = CechCochain.zero(self.spec, self.degree)
        for idx, coeff in vec.items():
            wt, part, n, i, u, slot = self.keys[idx]
            j = -wt if part == "Z" else wt
            deg = _ZDEG[self.degree] if part == "Z" else _WDEG[self.degree]
            el = self.spec.monomial_part(part, n, deg, i, j, slot, u, coeff)
            if part == "Z":
                c.zpart[n - 1] = c.zpart[n - 1] + el
            else:
                c.wpart[n - 1] = c.wpart[n - 1] + el
        return c


def operator_matrix(src: BlockIndex, tgt: BlockIndex, op):
    """Matrix of a linear cochain operator between block bases.

    Returns (matrix, tainted): tainted records window overflow during any
    image computation (dropped coefficients beyond the window)."""
    mat = PrecMatrix(tgt.spec.field, len(tgt), len(src))
    tainted = False
    for col, key in enumerate(src.keys):
        image = op(src.basis_cochain(key))
        tainted = tainted or image.overflow
        for row, coeff in tgt.vector(image).items():
            mat.set_entry(row, col, coeff)
    return mat, tainted


def _centered_int(coeff: KElement):
    """Exact signed integer value of a scalar known to be an integer."""
    if coeff.field.e != 1:
        return None
    c = coeff.coeffs[0]
    if c.is_zero():
        return 0 if c.prec >= c.ctx.prec else None
    if c.val < 0 or c.prec < c.ctx.prec:
        return None
    m = c.lift()
    modulus = c.ctx.p ** c.prec
    return m - modulus if m > modulus // 2 else m


def operator_int_rows(src: BlockIndex, tgt: BlockIndex, op):
    """Sparse integer rows of an operator with exact integer matrix.

    Returns (rows, tainted) or (None, tainted) when an entry fails the
    integrality certificate."""
    rows = [{} for _ in range(len(tgt))]
    tainted = False
    for col, key in enumerate(src.keys):
        image = op(src.basis_cochain(key))
        tainted = tainted or image.overflow
        for row, coeff in tgt.vector(image).items():
            m = _centered_int(coeff)
            if m is None:
                return None, tainted
            if m:
                rows[row][col] = m
    return rows, tainted


def _block_h_direct(spec: CechSpec, wt: int, floor_pi: int):
    """Naive per-weight ranks of the truncated complex (one weight block)."""
    idx = {d: BlockIndex(spec, d, [wt]) for d in range(4)}
    dims = {d: len(idx[d]) for d in range(4)}
    ranks = {}
    introws = {}
    tainted = False
    for d in range(3):
        if not dims[d] or not dims[d + 1]:
            ranks[d] = 0
            introws[d] = [{} for _ in range(dims[d + 1])]
            continue
        if spec.side == "hk":
            rows, t = operator_int_rows(idx[d], idx[d + 1], cech_D)
            tainted = tainted or t
            if rows is not None:
                introws[d] = rows
                ranks[d] = int_rank_sparse(rows, dims[d])
                continue
        mat, t = operator_matrix(idx[d], idx[d + 1], cech_D)
        tainted = tainted or t
        introws[d] = None
        ranks[d] = rank_at(mat, floor_pi)
    h = {
        0: dims[0] - ranks[0],
        1: dims[1] - ranks[1] - ranks[0],
        2: dims[2] - ranks[2] - ranks[1],
        3: dims[3] - ranks[2],
    }
    return h, idx, introws, tainted


def _block_h_stable(spec: CechSpec, wt: int, degree: int, idx, introws) -> int:
    """Rank of H_degree(window) -> H_degree(window with two more u-levels).

    The u-cap cuts a genuine subcomplex (the differential lowers u-order),
    so classes that only exist because their primitive would need u-orders
    beyond the cap die in the enlarged complex; two extra levels cover the
    longest exactness cascade through the two-column cover. The surviving
    rank is the stable estimate."""
    dim_k = len(idx[degree])
    if not dim_k:
        return 0
    if degree < 3 and introws[degree] is not None and len(idx[degree + 1]):
        kernel = int_kernel_sparse(introws[degree], dim_k)
    else:
        kernel = [{k: 1} for k in range(dim_k)]
    if not kernel:
        return 0
    big = spec.resized(spec.S, spec.T, spec.U + 2)
    tgt = BlockIndex(big, degree, [wt])
    nb = 0
    if degree > 0:
        src = BlockIndex(big, degree - 1, [wt])
        rows, _ = operator_int_rows(src, tgt, cech_D)
        if rows is None:
            raise TaintedWindow("stable rank needs integer differentials")
        nb = len(src)
    else:
        rows = [{} for _ in range(len(tgt))]
    rank_b = int_rank_sparse(rows, nb) if nb else 0
    for t, vec in enumerate(kernel):
        for pos, val in vec.items():
            row = tgt.pos[idx[degree].keys[pos]]
            rows[row][nb + t] = rows[row].get(nb + t, 0) + val
    rank_bz = int_rank_sparse(rows, nb + len(kernel))
    return rank_bz - rank_b


def h_ranks(spec: CechSpec, floor_pi: int | None = None):
    """Cohomology rank estimate of the truncated complex, per degree.

    Splits over the weight grading. Weight blocks whose naive ranks vanish
    contribute nothing; the rest are refined to the rank surviving one more
    u-level, which removes the u-cap boundary artifacts on the hk side.
    Returns (ranks, tainted); tainted reports window overflow inside any
    block that contributed to the estimate."""
    if floor_pi is None:
        floor_pi = spec.cap() - 5 * spec.field.e
    out = {d: 0 for d in range(4)}
    tainted = False
    for wt in range(-spec.T, spec.T + 1):
        h, idx, introws, t = _block_h_direct(spec, wt, floor_pi)
        if not any(h.values()):
            continue
        tainted = tainted or t
        for d in range(4):
            if not h[d]:
                continue
            if spec.side == "hk":
                out[d] += _block_h_stable(spec, wt, d, idx, introws)
            else:
                out[d] += h[d]
    return out, tainted


# -- certified class arithmetic ------------------------------------------------


def is_cocycle(c: CechCochain, floor_pi: int):
    """(verdict, certified residual depth) for D(c) = 0."""
    image = cech_D(c)
    return image.is_zero_at(floor_pi), image.residual_prec()


def _solve_setup(target: CechCochain, classes, extra_weights=()):
    spec = target.spec
    weights = set(cochain_weights(target)) | set(extra_weights)
    for cl in classes:
        weights.update(cochain_weights(cl))
    if not weights:
        weights = {0}
    tgt = BlockIndex(spec, target.degree, weights)
    if target.degree == 0:
        src = None
        nsrc = 0
        full = PrecMatrix(spec.field, len(tgt), len(classes))
        tainted = False
    else:
        src = BlockIndex(spec, target.degree - 1, weights)
        nsrc = len(src)
        mat, tainted = operator_matrix(src, tgt, cech_D)
        full = PrecMatrix(spec.field, len(tgt), nsrc + len(classes))
        full.rows = [dict(row) for row in mat.rows]
    for t, cl in enumerate(classes):
        tainted = tainted or cl.overflow
        for row, coeff in tgt.vector(cl).items():
            full.set_entry(row, nsrc + t, coeff)
    tainted = tainted or target.overflow
    return src, tgt, full, tainted


def express_in_classes(target: CechCochain, classes, floor_pi: int,
                       allow_tainted: bool = False):
    """Write target = D(witness) + sum_k coords[k] * classes[k].

    Returns (coords, witness). Raises NotInSpan on a certified obstruction,
    AmbiguousSolve if the coordinates are not pinned down at the requested
    depth, TaintedWindow if window overflow undermines the certificate."""
    spec = target.spec
    src, tgt, full, tainted = _solve_setup(target, classes)
    if tainted and not allow_tainted:
        raise TaintedWindow("window overflow while forming the class system")
    nsrc = 0 if src is None else len(src)
    b = tgt.vector(target)
    sol = solve(full, b, floor_pi)
    if sol is None:
        raise NotInSpan("target is certified outside the span of the classes "
                        "modulo coboundaries")
    # coordinates are canonical only if every class column earns a pivot
    # after the coboundary columns (independence modulo the image of D)
    res = row_reduce(full)
    res.rank_at(floor_pi)
    class_pivots = sum(1 for _, c in res.pivots if c >= nsrc)
    if class_pivots < len(classes):
        raise AmbiguousSolve(
            "classes are dependent modulo coboundaries at this depth")
    coords = []
    zero = spec.field.zero()
    for t in range(len(classes)):
        coords.append(sol.get(nsrc + t, zero))
    if src is None:
        witness = None
    else:
        witness = src.cochain({k: v for k, v in sol.items() if k < nsrc})
    return coords, witness


def coboundary_witness(target: CechCochain, floor_pi: int,
                       allow_tainted: bool = False) -> CechCochain:
    """Solve D(witness) = target; raises NotACoboundary when obstructed."""
    src, tgt, full, tainted = _solve_setup(target, [])
    if tainted and not allow_tainted:
        raise TaintedWindow("window overflow while forming the coboundary system")
    sol = solve(full, tgt.vector(target), floor_pi)
    if sol is None:
        err = NotACoboundary("target is certified not to be a coboundary")
        err.obstruction = target
        raise err
    if src is None:
        return None
    return src.cochain(sol)
