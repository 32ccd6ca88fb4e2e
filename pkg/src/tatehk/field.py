"""Totally ramified extensions K = Q_p(pi) cut out by an Eisenstein polynomial.

Elements are polynomials in the uniformizer pi of degree < e with
PadicScalar coefficients, reduced modulo f(pi) = 0. The base field is
the degenerate case e = 1 with f = s - p, so Q_p needs no special code
path. Both the pi-adic valuation (integer) and the p-adic valuation
(rational, ord_pi / e) are exposed.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import AmbiguousValuation, DivisionByIndistinguishableZero, NotAOneUnit
from .padic import PadicContext, PadicScalar, teichmuller, vp


class FieldDescriptor:
    """K = Q_p[s]/(f) for monic Eisenstein f = s^e + a_{e-1} s^{e-1} + ... + a_0."""

    __slots__ = ("ctx", "coeffs", "e", "_pi_inv", "_pi_pows")

    def __init__(self, ctx: PadicContext, coeffs: tuple):
        """coeffs are the non-leading coefficients (a_0, ..., a_{e-1}) as ints or Fractions."""
        coeffs = tuple(Fraction(c) for c in coeffs)
        if not coeffs:
            raise ValueError("need degree >= 1")
        for i, c in enumerate(coeffs):
            v = _frac_vp(c, ctx.p)  # None means c == 0, valuation +infinity
            if v is not None and v < 1:
                raise ValueError(f"coefficient a_{i} = {c} must have positive valuation")
            if i == 0 and v != 1:
                raise ValueError(f"constant term must have valuation exactly 1, got {v}")
        self.ctx = ctx
        self.coeffs = coeffs
        self.e = len(coeffs)
        self._pi_inv = None
        self._pi_pows = None

    @classmethod
    def base(cls, ctx: PadicContext) -> "FieldDescriptor":
        """Q_p itself, presented as the degenerate extension by f = s - p."""
        return cls(ctx, (-ctx.p,))

    @property
    def p(self) -> int:
        return self.ctx.p

    def __eq__(self, other):
        return (isinstance(other, FieldDescriptor)
                and self.ctx == other.ctx and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __repr__(self):
        return f"FieldDescriptor(p={self.ctx.p}, f={self.poly_str()})"

    def poly_str(self) -> str:
        parts = [f"s^{self.e}" if self.e > 1 else "s"]
        for i in range(self.e - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            term = "" if i == 0 else ("s" if i == 1 else f"s^{i}")
            mag = abs(c)
            coeff = "" if (mag == 1 and term) else str(mag)
            sep = "*" if coeff and term else ""
            parts.append(("- " if c < 0 else "+ ") + coeff + sep + term)
        return " ".join(parts)

    # -- element constructors --------------------------------------------

    def zero(self) -> "KElement":
        return KElement(self, tuple(PadicScalar.zero(self.ctx) for _ in range(self.e)))

    def one(self) -> "KElement":
        return self.from_int(1)

    def from_int(self, n: int) -> "KElement":
        c = [PadicScalar.from_int(self.ctx, n)]
        c += [PadicScalar.zero(self.ctx) for _ in range(self.e - 1)]
        return KElement(self, tuple(c))

    def from_rational(self, q) -> "KElement":
        c = [PadicScalar.from_rational(self.ctx, q)]
        c += [PadicScalar.zero(self.ctx) for _ in range(self.e - 1)]
        return KElement(self, tuple(c))

    def embed_scalar(self, x: PadicScalar) -> "KElement":
        c = [x] + [PadicScalar.zero(self.ctx) for _ in range(self.e - 1)]
        return KElement(self, tuple(c))

    def pi(self) -> "KElement":
        if self.e == 1:
            return self.from_rational(-self.coeffs[0])
        c = [PadicScalar.zero(self.ctx) for _ in range(self.e)]
        c[1] = PadicScalar.from_int(self.ctx, 1)
        return KElement(self, tuple(c))

    def pi_inv(self) -> "KElement":
        """pi^-1 = -(pi^{e-1} + sum_{i>=1} a_i pi^{i-1}) / a_0."""
        if self._pi_inv is None:
            if self.e == 1:
                self._pi_inv = self.from_rational(Fraction(-1, 1) / self.coeffs[0])
            else:
                body = [PadicScalar.from_rational(self.ctx, self.coeffs[j + 1])
                        for j in range(self.e - 1)]
                body.append(PadicScalar.from_int(self.ctx, 1))
                a0 = PadicScalar.from_rational(self.ctx, self.coeffs[0])
                self._pi_inv = KElement(self, tuple(-(c / a0) for c in body))
        return self._pi_inv

    def reduction_rows(self):
        """Coefficient rows of pi^e, ..., pi^(2e-2) on the basis pi^0..pi^{e-1}."""
        if self._pi_pows is None:
            rows = []
            # pi^e = -sum a_i pi^i
            cur = [-Fraction(c) for c in self.coeffs]
            rows.append(tuple(cur))
            for _ in range(self.e - 2):
                # multiply by pi: shift, then reduce the overflow of pi^e
                top = cur[-1]
                cur = [Fraction(0)] + cur[:-1]
                if top:
                    for i in range(self.e):
                        cur[i] += top * rows[0][i]
                rows.append(tuple(cur))
            self._pi_pows = rows
        return self._pi_pows


def _frac_vp(q: Fraction, p: int):
    if q == 0:
        return None
    return vp(q.numerator, p) - vp(q.denominator, p)


class KElement:
    """Element of K, a tuple of e PadicScalar coefficients on 1, pi, ..., pi^{e-1}."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: tuple):
        if len(coeffs) != field.e:
            raise ValueError("coefficient count must equal the degree")
        self.field = field
        self.coeffs = coeffs

    def _check(self, other: "KElement"):
        if self.field != other.field:
            raise ValueError("elements of different fields")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return KElement(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return KElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _coerce(self, other):
        if isinstance(other, KElement):
            self._check(other)
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            return self.field.from_rational(other)
        if isinstance(other, PadicScalar):
            return self.field.embed_scalar(other)
        return NotImplemented

    def scale(self, c: PadicScalar) -> "KElement":
        return KElement(self.field, tuple(a * c for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = self.field.e
        if e == 1:
            return KElement(self.field, (self.coeffs[0] * other.coeffs[0],))
        ctx = self.field.ctx
        prod = [PadicScalar.zero(ctx, 2 * ctx.prec) for _ in range(2 * e - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero() and a.prec >= ctx.prec:
                continue
            for j, b in enumerate(other.coeffs):
                prod[i + j] = prod[i + j] + a * b
        out = list(prod[:e])
        rows = self.field.reduction_rows()
        for k in range(e, 2 * e - 1):
            c = prod[k]
            if c.is_zero() and c.prec >= ctx.prec:
                continue
            row = rows[k - e]
            for i in range(e):
                if row[i]:
                    out[i] = out[i] + c * PadicScalar.from_rational(ctx, row[i])
        return KElement(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.field.one() / self ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other * self.inverse()

    def inverse(self) -> "KElement":
        a = self.ord_pi()
        fld = self.field
        u = self
        if a != 0:
            shift = fld.pi_inv() ** a if a > 0 else fld.pi() ** (-a)
            u = self * shift
        # u is now a unit: c_0 is a p-adic unit. Newton: z -> z(2 - uz).
        c0 = u.coeffs[0]
        z = fld.embed_scalar(1 / c0)
        two = fld.from_int(2)
        steps = max(1, (fld.e * fld.ctx.prec).bit_length() + 1)
        for _ in range(steps):
            z = z * (two - u * z)
        inv_u = z
        if a == 0:
            return inv_u
        shift = fld.pi_inv() ** a if a > 0 else fld.pi() ** (-a)
        return inv_u * shift

    # -- valuation and predicates -------------------------------------------

    def ord_pi(self) -> int:
        """pi-adic valuation; raises when the element is indistinguishable from zero."""
        v = self.ord_pi_or_none()
        if v is None:
            raise AmbiguousValuation(
                f"element is zero at O(pi^{self.cert_prec_pi()}); valuation undecidable")
        return v

    def ord_pi_or_none(self):
        e = self.field.e
        best = None
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                v = e * c.val + i
                if best is None or v < best:
                    best = v
        return best

    def ord_p(self) -> Fraction:
        return Fraction(self.ord_pi(), self.field.e)

    def cert_prec_pi(self) -> int:
        """Certified absolute pi-adic precision: min over coefficients of e*prec + i."""
        e = self.field.e
        cap = self.field.ctx.prec
        return min(e * min(c.prec, cap) + i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_zero_at(self, floor_pi: int) -> bool:
        """Certifiably divisible by pi^floor_pi (zero at that precision or deeper)."""
        v = self.ord_pi_or_none()
        if v is not None:
            return v >= floor_pi
        return self.cert_prec_pi() >= floor_pi

    def same_at(self, other: "KElement", floor_pi: int) -> bool:
        return (self - other).is_zero_at(floor_pi)

    def residue(self) -> int:
        """Image in the residue field F_p (= c_0 mod p)."""
        return self.coeffs[0].residue()

    def __repr__(self):
        return f"KElement({self.expansion_str()})"

    # -- serialization -------------------------------------------------------

    def pi_digits(self, n: int | None = None) -> list:
        """First n pi-adic digits d_j in {0..p-1}, x = sum d_j pi^j + O(pi^n)."""
        if n is None:
            n = self.cert_prec_pi()
        n = min(n, self.cert_prec_pi())
        fld = self.field
        p = fld.ctx.p
        x = self
        digits = []
        for j in range(n):
            if x.ord_pi_or_none() is not None and x.ord_pi() < 0:
                raise ValueError("negative valuation has no digit expansion")
            d = x.coeffs[0].residue()
            digits.append(d)
            x = (x - fld.from_int(d)) * fld.pi_inv()
        return digits

    def expansion_str(self, n: int | None = None) -> str:
        """Expansion string "c_0 + c_1*pi + ... + O(pi^N)" with digit coefficients."""
        prec = self.cert_prec_pi() if n is None else min(n, self.cert_prec_pi())
        v = self.ord_pi_or_none()
        if v is not None and v < 0:
            shifted = self * (self.field.pi() ** (-v))
            inner = shifted.expansion_str(prec - v if n is None else n)
            return f"pi^{v}*({inner})"
        digits = self.pi_digits(prec)
        terms = []
        for j, d in enumerate(digits):
            if d == 0:
                continue
            if j == 0:
                terms.append(str(d))
            elif j == 1:
                terms.append(f"{d}*pi" if d != 1 else "pi")
            else:
                terms.append(f"{d}*pi^{j}" if d != 1 else f"pi^{j}")
        terms.append(f"O(pi^{prec})")
        return " + ".join(terms)


def k_teichmuller(x: KElement) -> KElement:
    """Teichmuller lift of the residue of a unit of V (residue field is F_p)."""
    if x.ord_pi_or_none() != 0:
        raise NotAOneUnit("Teichmuller lift needs a unit of the integer ring")
    r = x.residue()
    t = teichmuller(PadicScalar.from_int(x.field.ctx, r)) if r else None
    if t is None:
        raise NotAOneUnit("unit has zero residue; element is not a unit")
    return x.field.embed_scalar(t)


def unit_decompose(x: KElement):
    """x = pi^a * omega * u with omega Teichmuller and u a one-unit.

    Returns (a, omega, u). Requires x certified nonzero.
    """
    a = x.ord_pi()
    fld = x.field
    y = x * (fld.pi_inv() ** a if a > 0 else fld.pi() ** (-a)) if a else x
    omega = k_teichmuller(y)
    u = y / omega
    return a, omega, u


# -- parsing ------------------------------------------------------------------


def parse_eisenstein(src: str, ctx: PadicContext) -> FieldDescriptor:
    """Parse a monic Eisenstein polynomial in s, e.g. "s^2-5" or "s^3+5*s+10"."""
    text = src.replace(" ", "")
    if not text:
        raise ValueError("empty polynomial")
    term_re = re.compile(r"([+-]?)((?:\d+/\d+)|\d+)?(?:(\*?)(s)(?:\^(\d+))?)?")
    pos = 0
    terms = {}
    while pos < len(text):
        m = term_re.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        sign, coeff, _, svar, expo = m.groups()
        if coeff is None and svar is None:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        k = 0
        if svar:
            k = int(expo) if expo else 1
        terms[k] = terms.get(k, Fraction(0)) + c
        pos = m.end()
    e = max(terms)
    if e < 1:
        raise ValueError("polynomial must involve s")
    if terms[e] != 1:
        raise ValueError("polynomial must be monic")
    coeffs = tuple(terms.get(i, Fraction(0)) for i in range(e))
    return FieldDescriptor(ctx, coeffs)


class _Tok:
    def __init__(self, text: str):
        self.toks = re.findall(r"\d+|pi|p|[()+\-*/^]", text.replace(" ", ""))
        if "".join(self.toks) != text.replace(" ", ""):
            raise ValueError(f"cannot tokenize element expression {text!r}")
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        self.i += 1
        return t


def parse_element(src: str, field: FieldDescriptor) -> KElement:
    """Parse an element expression over K: integers, p, pi, + - * / ^ and parentheses."""
    tk = _Tok(src)

    def atom():
        t = tk.next()
        if t == "(":
            v = expr()
            if tk.next() != ")":
                raise ValueError("unbalanced parentheses")
            return v
        if t == "pi":
            return field.pi()
        if t == "p":
            return field.from_int(field.ctx.p)
        if t == "-":
            return -atom()
        if t is not None and t.isdigit():
            return field.from_int(int(t))
        raise ValueError(f"unexpected token {t!r} in element expression")

    def power():
        v = atom()
        while tk.peek() == "^":
            tk.next()
            neg = False
            t = tk.next()
            if t == "-":
                neg = True
                t = tk.next()
            if t is None or not t.isdigit():
                raise ValueError("exponent must be an integer")
            n = int(t)
            v = v ** (-n if neg else n)
        return v

    def term():
        v = power()
        while tk.peek() in ("*", "/"):
            op = tk.next()
            w = power()
            v = v * w if op == "*" else v / w
        return v

    def expr():
        t = tk.peek()
        neg = False
        if t == "-":
            tk.next()
            neg = True
        v = term()
        if neg:
            v = -v
        while tk.peek() in ("+", "-"):
            op = tk.next()
            w = term()
            v = v + w if op == "+" else v - w
        return v

    out = expr()
    if tk.peek() is not None:
        raise ValueError(f"trailing input in element expression {src!r}")
    return out
