"""Exact truncated arithmetic in a local field and its unramified
quadratic extension.

Two kinds of field are supported: ``mixed`` (the p-adic numbers, residue
degree one) and ``equal_char`` (Laurent series over F_q with q = p^f).
Elements carry their own absolute precision; every operation propagates
worst-case precision loss, and an operation that would expose unknown
digits raises :class:`PrecisionError` instead of fabricating data.

An element that is indistinguishable from zero at its tracked precision
is "zero at precision": its valuation is undefined and comparisons
against it are refused rather than silently succeeding.
"""

from __future__ import annotations

from .errors import DomainError, ExprSyntaxError, PrecisionError

DEFAULT_PRECISION = 24
_JORDAN_EXTRA_STEPS = 5


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class ResidueField:
    """Arithmetic in F_q, q = p^f, with elements encoded as integers in
    [0, q) via base-p digits of the polynomial representative."""

    def __init__(self, p: int, f: int):
        self.p = p
        self.f = f
        self.q = p**f
        if f == 1:
            self.modulus = None
        else:
            self.modulus = self._find_irreducible()

    def _find_irreducible(self) -> tuple[int, ...]:
        # monic degree-f polynomial with no roots and no monic factor of
        # lower degree; brute force is fine at q <= 25
        p, f = self.p, self.f
        for code in range(p**f):
            coeffs = self._decode_int(code, f) + (1,)
            if self._poly_is_irreducible(coeffs):
                return coeffs
        raise DomainError(f"no irreducible polynomial of degree {f} over F_{p}")

    def _decode_int(self, code: int, length: int) -> tuple[int, ...]:
        out = []
        for _ in range(length):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def _poly_is_irreducible(self, coeffs) -> bool:
        p = self.p
        deg = len(coeffs) - 1
        for root in range(p):
            if sum(c * root**i for i, c in enumerate(coeffs)) % p == 0:
                return False
        if deg <= 3:
            return True  # no roots suffices through degree 3
        raise DomainError("residue degrees above 3 are not supported")

    def encode(self, coeffs) -> int:
        return sum(int(c) % self.p * self.p**i for i, c in enumerate(coeffs))

    def decode(self, code: int) -> tuple[int, ...]:
        return self._decode_int(code, self.f)

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        return self.encode(x + y for x, y in zip(self.decode(a), self.decode(b)))

    def neg(self, a: int) -> int:
        if self.f == 1:
            return (-a) % self.p
        return self.encode(-x for x in self.decode(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a * b) % self.p
        pa, pb = self.decode(a), self.decode(b)
        prod = [0] * (2 * self.f - 1)
        for i, x in enumerate(pa):
            if x:
                for j, y in enumerate(pb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        # reduce modulo the defining polynomial
        for k in range(len(prod) - 1, self.f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i, m in enumerate(self.modulus[:-1]):
                    prod[k - self.f + i] = (prod[k - self.f + i] - c * m) % self.p
        return self.encode(prod[: self.f])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out, base = 1, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero in the residue field")
        return self.pow(a, self.q - 2)

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def smallest_nonsquare(self) -> int:
        for code in range(1, self.q):
            if not self.is_square(code):
                return code
        raise DomainError(f"F_{self.q} has no non-square (q must be odd)")


class LocalField:
    """A truncated local field: Q_p (``mixed``) or F_q((t)) (``equal_char``)."""

    def __init__(self, p: int, f: int = 1, kind: str = "mixed",
                 precision: int = DEFAULT_PRECISION, u_expr: str | None = None):
        if kind not in ("mixed", "equal_char"):
            raise DomainError(f"unknown field kind {kind!r}")
        if not _is_prime(p) or p == 2:
            raise DomainError(f"residue characteristic must be an odd prime, got {p}")
        if f < 1:
            raise DomainError("residue degree must be positive")
        if kind == "mixed" and f != 1:
            raise DomainError("mixed-characteristic support is limited to residue degree one")
        if precision < 4:
            raise DomainError("precision must be at least 4 digits")
        self.p = p
        self.f = f
        self.q = p**f
        self.kind = kind
        self.precision = precision
        self.residue_field = ResidueField(p, f)
        if u_expr is None:
            self.u = self._default_nonsquare()
        else:
            self.u = eval_expr(u_expr, self)
            if self.u.is_zero_at_precision or self.u.valuation() != 0:
                raise DomainError("u must be a unit")
            if is_square_unit(self.u, self):
                raise DomainError("u must not be a square")

    def __repr__(self):
        base = f"Q_{self.p}" if self.kind == "mixed" else f"F_{self.q}((t))"
        return f"LocalField({base}, N={self.precision})"

    @property
    def uniformizer_name(self) -> str:
        return "p" if self.kind == "mixed" else "t"

    def _default_nonsquare(self) -> "FieldElement":
        c = self.residue_field.smallest_nonsquare()
        if self.kind == "mixed":
            return teichmuller(self.from_int(c), self)
        return self.from_residue(c)

    # -- element constructors ------------------------------------------------

    def zero(self, abs_prec: int | None = None) -> "FieldElement":
        return FieldElement(self, None, None, self.precision if abs_prec is None else abs_prec)

    def one(self) -> "FieldElement":
        return self.from_int(1)

    def from_int(self, k: int) -> "FieldElement":
        k = int(k)
        if self.kind == "mixed":
            if k == 0:
                return self.zero()
            val = 0
            while k % self.p == 0:
                k //= self.p
                val += 1
            unit = k % self.p**self.precision
            return FieldElement(self, val, unit, val + self.precision)
        return self.from_residue(k % self.p)

    def from_residue(self, code: int) -> "FieldElement":
        """The constant lift of a residue-field element (equal characteristic)."""
        if self.kind != "equal_char":
            raise DomainError("constant lifts only exist in equal characteristic")
        code = int(code) % self.q
        if code == 0:
            return self.zero()
        digits = (code,) + (0,) * (self.precision - 1)
        return FieldElement(self, 0, digits, self.precision)

    def uniformizer(self, power: int = 1) -> "FieldElement":
        if self.kind == "mixed":
            return FieldElement(self, power, 1, power + self.precision)
        return FieldElement(self, power, (1,) + (0,) * (self.precision - 1), power + self.precision)

    def from_digits(self, val: int, digits, pad: bool = True) -> "FieldElement":
        """Element with the given least-significant-first digits starting at
        position ``val``; trailing digits are taken to be exactly zero."""
        digits = tuple(int(d) for d in digits)
        while digits and digits[-1] == 0:
            digits = digits[:-1]
        lead = next((i for i, d in enumerate(digits) if d), None)
        if lead is None:
            return self.zero()
        val += lead
        digits = digits[lead:]
        rel = max(self.precision, len(digits)) if pad else len(digits)
        if self.kind == "mixed":
            if any(not 0 <= d < self.p for d in digits):
                raise DomainError("mixed-characteristic digits must lie in [0, p)")
            unit = sum(d * self.p**i for i, d in enumerate(digits))
            return FieldElement(self, val, unit, val + rel)
        if any(not 0 <= d < self.q for d in digits):
            raise DomainError("digits must be residue-field codes in [0, q)")
        return FieldElement(self, val, digits + (0,) * (rel - len(digits)), val + rel)


class FieldElement:
    """One truncated element: valuation, unit-part digits, and the absolute
    precision up to which the element is known."""

    __slots__ = ("field", "val", "unit", "abs_prec")

    def __init__(self, field: LocalField, val: int | None, unit, abs_prec: int):
        self.field = field
        self.val = val
        self.unit = unit
        self.abs_prec = abs_prec
        if val is not None:
            if val >= abs_prec:
                raise PrecisionError("element has no digits left at this precision")
            if field.kind == "equal_char" and len(unit) != abs_prec - val:
                raise DomainError("digit vector does not match the tracked precision")

    # -- state ---------------------------------------------------------------

    @property
    def is_zero_at_precision(self) -> bool:
        return self.val is None

    @property
    def rel_prec(self) -> int:
        if self.val is None:
            raise PrecisionError("zero at precision has no unit part")
        return self.abs_prec - self.val

    def valuation(self) -> int:
        if self.val is None:
            raise PrecisionError(f"valuation undefined: zero at precision {self.abs_prec}")
        return self.val

    def residue(self) -> int:
        """Leading digit, as a residue-field code."""
        if self.val is None:
            raise PrecisionError("zero at precision has no residue")
        if self.field.kind == "mixed":
            return self.unit % self.field.p
        return self.unit[0]

    def digit(self, position: int) -> int:
        if position >= self.abs_prec:
            raise PrecisionError(f"digit {position} is beyond the tracked precision {self.abs_prec}")
        if self.val is None or position < self.val:
            return 0
        if self.field.kind == "mixed":
            return (self.unit // self.field.p ** (position - self.val)) % self.field.p
        return self.unit[position - self.val]

    def digits_in_range(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.digit(i) for i in range(lo, hi))

    def to_json(self) -> dict:
        if self.val is None:
            return {"val": None, "digits": [], "zero_at_precision": True}
        return {"val": self.val, "digits": list(self.digits_in_range(self.val, self.abs_prec))}

    def __repr__(self):
        if self.val is None:
            return f"<0 + O({self.field.uniformizer_name}^{self.abs_prec})>"
        name = self.field.uniformizer_name
        shown = self.digits_in_range(self.val, min(self.abs_prec, self.val + 8))
        return f"<{name}^{self.val} * {list(shown)}... + O({name}^{self.abs_prec})>"

    # -- arithmetic ----------------------------------------------------------

    def _check_same_field(self, other: "FieldElement"):
        if self.field is not other.field:
            raise DomainError("elements belong to different fields")

    def truncate_abs(self, new_abs: int) -> "FieldElement":
        if new_abs >= self.abs_prec:
            return self
        if self.val is None or self.val >= new_abs:
            return self.field.zero(new_abs)
        rel = new_abs - self.val
        if self.field.kind == "mixed":
            return FieldElement(self.field, self.val, self.unit % self.field.p**rel, new_abs)
        return FieldElement(self.field, self.val, self.unit[:rel], new_abs)

    def shifted(self, k: int) -> "FieldElement":
        """Exact multiplication by the k-th power of the uniformizer."""
        if self.val is None:
            return self.field.zero(self.abs_prec + k)
        return FieldElement(self.field, self.val + k, self.unit, self.abs_prec + k)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check_same_field(other)
        if self.val is None and other.val is None:
            return self.field.zero(min(self.abs_prec, other.abs_prec))
        if self.val is None:
            return other.truncate_abs(min(self.abs_prec, other.abs_prec))
        if other.val is None:
            return self.truncate_abs(min(self.abs_prec, other.abs_prec))
        target = min(self.abs_prec, other.abs_prec)
        base = min(self.val, other.val)
        if self.field.kind == "mixed":
            p = self.field.p
            window = target - base
            total = (self.unit * p ** (self.val - base) + other.unit * p ** (other.val - base)) % p**window
            if total == 0:
                return self.field.zero(target)
            shift = 0
            while total % p == 0:
                total //= p
                shift += 1
            return FieldElement(self.field, base + shift, total, target)
        rf = self.field.residue_field
        window = target - base
        digits = [0] * window
        for pos in range(base, target):
            digits[pos - base] = rf.add(self.digit(pos), other.digit(pos))
        lead = next((i for i, d in enumerate(digits) if d), None)
        if lead is None:
            return self.field.zero(target)
        return FieldElement(self.field, base + lead, tuple(digits[lead:]), target)

    def __neg__(self) -> "FieldElement":
        if self.val is None:
            return self
        if self.field.kind == "mixed":
            return FieldElement(self.field, self.val, self.field.p**self.rel_prec - self.unit, self.abs_prec)
        rf = self.field.residue_field
        return FieldElement(self.field, self.val, tuple(rf.neg(d) for d in self.unit), self.abs_prec)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check_same_field(other)
        if self.val is None or other.val is None:
            lo_self = self.abs_prec if self.val is None else self.val
            lo_other = other.abs_prec if other.val is None else other.val
            return self.field.zero(lo_self + lo_other)
        rel = min(self.rel_prec, other.rel_prec)
        val = self.val + other.val
        if self.field.kind == "mixed":
            unit = (self.unit * other.unit) % self.field.p**rel
            return FieldElement(self.field, val, unit, val + rel)
        rf = self.field.residue_field
        a, b = self.unit, other.unit
        digits = [0] * rel
        for i in range(min(rel, len(a))):
            if a[i]:
                for j in range(min(rel - i, len(b))):
                    if b[j]:
                        digits[i + j] = rf.add(digits[i + j], rf.mul(a[i], b[j]))
        return FieldElement(self.field, val, tuple(digits), val + rel)

    def inverse(self) -> "FieldElement":
        if self.val is None:
            raise PrecisionError("inverse of zero at precision")
        rel = self.rel_prec
        if self.field.kind == "mixed":
            unit = pow(self.unit, -1, self.field.p**rel)
            return FieldElement(self.field, -self.val, unit, -self.val + rel)
        rf = self.field.residue_field
        inv0 = rf.inv(self.unit[0])
        digits = [inv0] + [0] * (rel - 1)
        for k in range(1, rel):
            acc = 0
            for i in range(1, min(k, len(self.unit) - 1) + 1):
                acc = rf.add(acc, rf.mul(self.unit[i], digits[k - i]))
            digits[k] = rf.neg(rf.mul(inv0, acc))
        return FieldElement(self.field, -self.val, tuple(digits), -self.val + rel)

    def __pow__(self, e: int) -> "FieldElement":
        if e == 0:
            return self.field.one()
        if e < 0:
            return self.inverse() ** (-e)
        out = None
        base = self
        while e:
            if e & 1:
                out = base if out is None else out * base
            base = base * base
            e >>= 1
        return out

    # -- comparisons ---------------------------------------------------------

    def equals(self, other: "FieldElement") -> bool:
        """Digit-for-digit equality at the common precision.  Refuses to
        compare when either operand is zero at precision; use
        ``(x - y).is_zero_at_precision`` for the explicit question."""
        self._check_same_field(other)
        if self.val is None or other.val is None:
            raise PrecisionError("comparison against zero at precision")
        return (self - other).is_zero_at_precision

    def __eq__(self, other):  # pragma: no cover - guard against accidental use
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        raise TypeError("FieldElement is not hashable; use digit keys instead")


def teichmuller(x: FieldElement, field: LocalField) -> FieldElement:
    """The multiplicative lift fixed by the q-power map, from any unit."""
    if x.is_zero_at_precision or x.valuation() != 0:
        raise DomainError("the multiplicative lift needs a unit")
    current = x
    for _ in range(field.precision + _JORDAN_EXTRA_STEPS):
        nxt = current**field.q
        if (nxt - current).is_zero_at_precision:
            return nxt
        current = nxt
    raise DomainError("q-power iteration failed to stabilize")


def sqrt_unit(x: FieldElement, field: LocalField) -> FieldElement:
    """Square root of a square element of even valuation, by residue
    square root plus quadratic lifting (residue characteristic is odd)."""
    if x.is_zero_at_precision:
        raise PrecisionError("square root of zero at precision")
    if x.valuation() % 2 != 0:
        raise DomainError("square root needs even valuation")
    shift = x.valuation() // 2
    unit = x.shifted(-x.valuation())
    rf = field.residue_field
    res = unit.residue()
    root_code = next((c for c in range(1, rf.q) if rf.mul(c, c) == res), None)
    if root_code is None:
        raise DomainError("element is not a square")
    y = field.from_residue(root_code) if field.kind == "equal_char" else field.from_int(root_code)
    half = field.from_int(2).inverse()
    for _ in range(64):
        err = y * y - unit
        if err.is_zero_at_precision:
            return y.shifted(shift)
        y = (y + unit * y.inverse()) * half
    raise DomainError("square-root iteration failed to converge")


def is_square_unit(x: FieldElement, field: LocalField) -> bool:
    """Whether a unit is a square; for odd residue characteristic this is
    decided on the residue."""
    if x.is_zero_at_precision:
        raise PrecisionError("square test of zero at precision")
    if x.valuation() != 0:
        raise DomainError(f"square test needs a unit, got valuation {x.valuation()}")
    return field.residue_field.is_square(x.residue())


def legendre_unit(x: FieldElement, field: LocalField) -> int:
    return 1 if is_square_unit(x, field) else -1


def is_norm(x: FieldElement, field: LocalField) -> bool:
    """Membership in the norm group of the unramified quadratic extension:
    exactly the elements of even valuation (every unit is a norm)."""
    if x.is_zero_at_precision:
        raise PrecisionError("norm test of zero at precision")
    return x.valuation() % 2 == 0


def hilbert_symbol(x: FieldElement, y: FieldElement, field: LocalField) -> int:
    """The tame quadratic Hilbert symbol for odd residue characteristic."""
    if x.is_zero_at_precision or y.is_zero_at_precision:
        raise PrecisionError("Hilbert symbol of zero at precision")
    a, b = x.valuation(), y.valuation()
    chi_x = legendre_unit(x.shifted(-a), field)
    chi_y = legendre_unit(y.shifted(-b), field)
    eps = (field.q - 1) // 2
    sign = -1 if (a * b * eps) % 2 else 1
    return sign * chi_x ** (b % 2) * chi_y ** (a % 2)


# -- matrices over the field --------------------------------------------------

def fmat_identity(n: int, field: LocalField):
    one, zero = field.one(), field.zero()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def fmat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0] * b[0][j]
            for t in range(1, k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def fmat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def fmat_pow(m, e: int):
    if e < 0:
        return fmat_pow(fmat_inv(m), -e)
    out = None
    base = m
    while e:
        if e & 1:
            out = base if out is None else fmat_mul(out, base)
        base = fmat_mul(base, base)
        e >>= 1
    if out is None:
        field = m[0][0].field
        return fmat_identity(len(m), field)
    return out


def fmat_det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def fmat_inv(m):
    """Inverse by Gaussian elimination with minimal-valuation pivoting."""
    n = len(m)
    field = m[0][0].field
    aug = [list(m[i]) + [field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            entry = aug[r][col]
            if not entry.is_zero_at_precision and (pivot is None or entry.valuation() < aug[pivot][col].valuation()):
                pivot = r
        if pivot is None:
            raise DomainError("matrix is singular at this precision")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero_at_precision:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def fmat_nullspace(rows):
    """Basis of the kernel of a matrix of field elements (rows = equations),
    treating zero-at-precision entries as zero."""
    if not rows:
        return []
    field = rows[0][0].field
    ncols = len(rows[0])
    work = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(work)):
            entry = work[r][col]
            if not entry.is_zero_at_precision and (
                pivot is None or entry.valuation() < work[pivot][col].valuation()
            ):
                pivot = r
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = work[rank][col].inverse()
        work[rank] = [x * inv for x in work[rank]]
        for r in range(len(work)):
            if r != rank and not work[r][col].is_zero_at_precision:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [field.zero() for _ in range(ncols)]
        vec[f] = field.one()
        for r, c in enumerate(pivots):
            vec[c] = -work[r][f]
        basis.append(tuple(vec))
    return basis


# -- topological Jordan decomposition -----------------------------------------

def jordan_decompose(x, field: LocalField):
    """Split a unit (or an integral matrix with invertible reduction) into
    its finite prime-to-p-order part and its topologically unipotent part,
    by iterating the q-power map to stability."""
    if isinstance(x, FieldElement):
        return _jordan_scalar(x, field)
    return _jordan_matrix(x, field)


def _jordan_scalar(x: FieldElement, field: LocalField):
    if x.is_zero_at_precision or x.valuation() != 0:
        raise DomainError("the decomposition needs a unit")
    x_s = teichmuller(x, field)
    x_u = x_s.inverse() * x
    return x_s, x_u


def _jordan_matrix(m, field: LocalField):
    n = len(m)
    for row in m:
        for entry in row:
            if not entry.is_zero_at_precision and entry.valuation() < 0:
                raise DomainError("matrix entries must be integral")
    det = fmat_det2(m) if n == 2 else None
    if n != 2:
        raise DomainError("matrix decomposition is implemented for size two")
    if det.is_zero_at_precision or det.valuation() != 0:
        raise DomainError("matrix reduction must be invertible")
    current = m
    for _ in range(field.precision + _JORDAN_EXTRA_STEPS):
        nxt = fmat_pow(current, field.q)
        if all(
            (a - b).is_zero_at_precision
            for ra, rb in zip(nxt, current)
            for a, b in zip(ra, rb)
        ):
            x_s = nxt
            x_u = fmat_mul(fmat_inv(x_s), m)
            return x_s, x_u
        current = nxt
    raise DomainError(f"iteration failed to stabilize within {field.precision + _JORDAN_EXTRA_STEPS} steps")


# -- the unramified quadratic extension ---------------------------------------

class QuadExtElement:
    """a + b*sqrt(u) in the unramified quadratic extension."""

    __slots__ = ("a", "b")

    def __init__(self, a: FieldElement, b: FieldElement):
        if a.field is not b.field:
            raise DomainError("components belong to different fields")
        self.a = a
        self.b = b

    @property
    def field(self) -> LocalField:
        return self.a.field

    def __repr__(self):
        return f"QuadExt(a={self.a!r}, b={self.b!r})"

    def __add__(self, other: "QuadExtElement") -> "QuadExtElement":
        return QuadExtElement(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "QuadExtElement") -> "QuadExtElement":
        return QuadExtElement(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "QuadExtElement":
        return QuadExtElement(-self.a, -self.b)

    def __mul__(self, other: "QuadExtElement") -> "QuadExtElement":
        u = self.field.u
        return QuadExtElement(
            self.a * other.a + u * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    def conjugate(self) -> "QuadExtElement":
        return QuadExtElement(self.a, -self.b)

    def norm(self) -> FieldElement:
        return self.a * self.a - self.field.u * self.b * self.b

    def trace(self) -> FieldElement:
        return self.a + self.a

    def inverse(self) -> "QuadExtElement":
        n_inv = self.norm().inverse()
        return QuadExtElement(self.a * n_inv, -self.b * n_inv)

    def __pow__(self, e: int) -> "QuadExtElement":
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadExtElement(self.field.one(), self.field.zero())
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def valuation(self) -> int:
        """min of the component valuations (the extension is unramified and
        {1, sqrt(u)} is an integral basis)."""
        a, b = self.a, self.b
        if a.is_zero_at_precision and b.is_zero_at_precision:
            raise PrecisionError("valuation undefined: zero at precision")
        if a.is_zero_at_precision:
            if b.valuation() < a.abs_prec:
                return b.valuation()
            raise PrecisionError("valuation not determined at this precision")
        if b.is_zero_at_precision:
            if a.valuation() < b.abs_prec:
                return a.valuation()
            raise PrecisionError("valuation not determined at this precision")
        return min(a.valuation(), b.valuation())

    def is_central_unit_at_precision(self) -> bool:
        """Whether the element is 1 or -1 as far as the digits show."""
        one = self.field.one()
        return self.b.is_zero_at_precision and (
            (self.a - one).is_zero_at_precision or (self.a + one).is_zero_at_precision
        )

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}


# -- expression grammar --------------------------------------------------------

_OPERATORS = set("+-*^()")


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            if j < len(text) and (text[j].isalpha() or text[j] == "("):
                raise ExprSyntaxError("missing operator after integer literal", j)
            i = j
            continue
        if ch in ("p", "t", "u"):
            tokens.append(("sym", ch, i))
            i += 1
            continue
        if ch in _OPERATORS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, len(text)))
    return tokens


class _ExprParser:
    """Recursive descent with the precedence chain ^ > unary - > * > + -."""

    def __init__(self, text: str, field: LocalField):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.field = field

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> FieldElement:
        value = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError("trailing input", pos)
        return value

    def expr(self) -> FieldElement:
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> FieldElement:
        value = self.unary()
        while self.peek()[0] == "*":
            self.advance()
            value = value * self.unary()
        return value

    def unary(self) -> FieldElement:
        if self.peek()[0] == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> FieldElement:
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        _, _, caret_pos = self.advance()
        sign = 1
        if self.peek()[0] == "-":
            self.advance()
            sign = -1
        kind, value, pos = self.advance()
        if kind != "int":
            raise ExprSyntaxError("exponent must be an integer literal", pos)
        exponent = sign * value
        if exponent < 0 and base.is_zero_at_precision:
            raise ExprSyntaxError("negative power of zero at precision", caret_pos)
        return base**exponent

    def atom(self) -> FieldElement:
        kind, value, pos = self.advance()
        if kind == "int":
            return self.field.from_int(value)
        if kind == "sym":
            if value == "u":
                return self.field.u
            if value == self.field.uniformizer_name or value in ("p", "t"):
                # both spellings denote the uniformizer; which letter is
                # conventional depends on the field kind
                return self.field.uniformizer()
        if kind == "(":
            inner = self.expr()
            closing = self.advance()
            if closing[0] != ")":
                raise ExprSyntaxError("expected ')'", closing[2])
            return inner
        raise ExprSyntaxError(f"unexpected token {value!r}", pos)


def eval_expr(text: str, field: LocalField) -> FieldElement:
    """Evaluate an element expression: integer literals, the uniformizer
    (``p`` or ``t``), the fixed non-square unit ``u``, operators + - * ^
    with integer (possibly negative) exponents, and parentheses."""
    return _ExprParser(text, field).parse()


def parse_quadext(text: str, field: LocalField) -> QuadExtElement:
    """Parse "a_expr,b_expr" (or a single expression with no extension
    part) into an element of the quadratic extension."""
    parts = text.split(",")
    if len(parts) == 1:
        return QuadExtElement(eval_expr(parts[0], field), field.zero())
    if len(parts) == 2:
        return QuadExtElement(eval_expr(parts[0], field), eval_expr(parts[1], field))
    raise DomainError("expected at most two comma-separated expressions")


def parse_matrix(text: str, field: LocalField):
    """Parse a row-major expression grid like "[[1+p,1],[2*p+p^2,1+p]]"."""
    stripped = text.strip()
    if not (stripped.startswith("[[") and stripped.endswith("]]")):
        raise DomainError("matrix grid must look like [[...],[...]]")
    body = stripped[2:-2]
    rows = body.split("],[")
    matrix = tuple(
        tuple(eval_expr(entry, field) for entry in row.split(","))
        for row in rows
    )
    width = len(matrix[0])
    if any(len(row) != width for row in matrix):
        raise DomainError("matrix grid rows have unequal lengths")
    return matrix
