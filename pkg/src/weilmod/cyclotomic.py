"""Exact arithmetic in the ring Z[1/p, zeta_p], its fraction field, and its
residue fields.

Elements of the base ring are integer vectors in the power basis
1, zeta, ..., zeta^(p-2) together with a p-power denominator exponent, so
every value is p^(-e) * sum(c_i zeta^i).  The minimal-polynomial relation
zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)) is applied eagerly, and the
denominator exponent is kept minimal, which makes equality a plain tuple
comparison.

Residue fields F_l(zeta_p) are presented as F_l[Z]/(h) for the
lexicographically smallest monic irreducible factor h of the p-th
cyclotomic polynomial, so their construction is deterministic.
"""

from __future__ import annotations

from functools import lru_cache

from .exactalg import Ring


class NonUnitError(ArithmeticError):
    """Raised when inverting a non-unit; carries the offending field norm."""

    def __init__(self, norm):
        super().__init__(f"element is not a unit (norm {norm})")
        self.norm = norm


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class CycNum:
    """An element of Z[1/p, zeta_p] in canonical form.

    value = p^(-denom_exp) * sum(coeffs[i] * zeta^i), coeffs of length p-1.
    """

    __slots__ = ("p", "coeffs", "denom_exp")

    def __init__(self, p: int, coeffs, denom_exp: int = 0):
        if p < 3 or not _is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if denom_exp < 0:
            raise ValueError("denominator exponent must be >= 0")
        coeffs = list(coeffs)
        if len(coeffs) == p:
            # fold the redundant zeta^(p-1) coordinate
            top = coeffs.pop()
            if top:
                coeffs = [c - top for c in coeffs]
        if len(coeffs) != p - 1:
            raise ValueError(f"need {p - 1} coefficients, got {len(coeffs)}")
        if all(c == 0 for c in coeffs):
            denom_exp = 0
        else:
            while denom_exp > 0 and all(c % p == 0 for c in coeffs):
                coeffs = [c // p for c in coeffs]
                denom_exp -= 1
        self.p = p
        self.coeffs = tuple(coeffs)
        self.denom_exp = denom_exp

    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "CycNum":
        return cls(p, [0] * (p - 1))

    @classmethod
    def one(cls, p: int) -> "CycNum":
        return cls.from_int(1, p)

    @classmethod
    def from_int(cls, n: int, p: int) -> "CycNum":
        return cls(p, [n] + [0] * (p - 2))

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycNum":
        """The root of unity zeta^k."""
        k %= p
        coeffs = [0] * p
        coeffs[k] = 1
        return cls(p, coeffs)

    @classmethod
    def p_inverse_power(cls, p: int, e: int) -> "CycNum":
        """The unit p^(-e), e >= 0."""
        return cls(p, [1] + [0] * (p - 2), e)

    # ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_one(self) -> bool:
        return self.denom_exp == 0 and self.coeffs[0] == 1 and \
            all(c == 0 for c in self.coeffs[1:])

    def _check_compat(self, other: "CycNum"):
        if self.p != other.p:
            raise ValueError(f"mixed cyclotomic orders {self.p} and {other.p}")

    def __add__(self, other):
        if isinstance(other, int):
            other = CycNum.from_int(other, self.p)
        if not isinstance(other, CycNum):
            return NotImplemented
        self._check_compat(other)
        e = max(self.denom_exp, other.denom_exp)
        sa = self.p ** (e - self.denom_exp)
        sb = self.p ** (e - other.denom_exp)
        return CycNum(self.p,
                      [sa * a + sb * b for a, b in zip(self.coeffs, other.coeffs)],
                      e)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.p, [-c for c in self.coeffs], self.denom_exp)

    def __sub__(self, other):
        if isinstance(other, int):
            other = CycNum.from_int(other, self.p)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycNum(self.p, [other * c for c in self.coeffs], self.denom_exp)
        if not isinstance(other, CycNum):
            return NotImplemented
        self._check_compat(other)
        p = self.p
        # exponents live in Z/p since zeta^p = 1
        prod = [0] * p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                prod[(i + j) % p] += a * b
        return CycNum(p, prod, self.denom_exp + other.denom_exp)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycNum.from_int(other, self.p)
        if not isinstance(other, CycNum):
            return NotImplemented
        return (self.p, self.coeffs, self.denom_exp) == \
            (other.p, other.coeffs, other.denom_exp)

    def __hash__(self):
        return hash((self.p, self.coeffs, self.denom_exp))

    # ------------------------------------------------------------------
    def galois(self, k: int) -> "CycNum":
        """The ring automorphism zeta -> zeta^k, gcd(k, p) = 1."""
        p = self.p
        k %= p
        if k == 0:
            raise ValueError("k must be prime to p")
        out = [0] * p
        for i, c in enumerate(self.coeffs):
            out[(i * k) % p] += c
        return CycNum(p, out, self.denom_exp)

    def norm(self):
        """Field norm down to Q, as a pair (integer, denominator exponent).

        The value of the norm is n * p^(-(p-1)*denom_exp).
        """
        prod = CycNum.from_int(1, self.p)
        numerator = CycNum(self.p, self.coeffs, 0)
        for k in range(1, self.p):
            prod = prod * numerator.galois(k)
        if any(c != 0 for c in prod.coeffs[1:]) or prod.denom_exp != 0:
            raise AssertionError("norm computation left the rationals")
        return prod.coeffs[0], (self.p - 1) * self.denom_exp

    def is_unit(self) -> bool:
        """Units of Z[1/p, zeta_p] are the elements of norm +- a power of p."""
        n, _ = self.norm()
        if n == 0:
            return False
        n = abs(n)
        while n % self.p == 0:
            n //= self.p
        return n == 1

    def inverse(self) -> "CycNum":
        """Inverse of a unit; raises NonUnitError otherwise."""
        n, _ = self.norm()
        if n == 0:
            raise NonUnitError(0)
        sign = 1 if n > 0 else -1
        m = abs(n)
        e = 0
        while m % self.p == 0:
            m //= self.p
            e += 1
        if m != 1:
            raise NonUnitError(n)
        # x * cofactor = norm(numerator) = sign * p^e
        numerator = CycNum(self.p, self.coeffs, 0)
        cof = CycNum.from_int(1, self.p)
        for k in range(2, self.p):
            cof = cof * numerator.galois(k)
        inv = CycNum(self.p, [sign * c for c in cof.coeffs], e)
        # undo the original denominator: (p^-d * y)^-1 = p^d * y^-1
        return inv * (self.p ** self.denom_exp)

    def exact_div(self, other: "CycNum") -> "CycNum":
        """Exact quotient self/other inside Z[1/p, zeta_p].

        Raises ZeroDivisionError on zero divisor and ValueError when the
        quotient does not lie in the ring.
        """
        self._check_compat(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero in Z[1/p, zeta_p]")
        n, _ = other.norm()
        num = CycNum(other.p, other.coeffs, 0)
        cof = CycNum.from_int(1, other.p)
        for k in range(2, other.p):
            cof = cof * num.galois(k)
        # self / other = self * cof * p^{e_other} / n
        top = self * cof * (other.p ** other.denom_exp)
        sign = 1 if n > 0 else -1
        m = abs(n)
        e = 0
        while m % self.p == 0:
            m //= self.p
            e += 1
        if m != 1 and any(c % m != 0 for c in top.coeffs):
            raise ValueError("quotient is not in Z[1/p, zeta_p]")
        coeffs = [sign * (c // m if m != 1 else c) for c in top.coeffs]
        return CycNum(self.p, coeffs, top.denom_exp + e)

    # ------------------------------------------------------------------
    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs), "denom_exp": self.denom_exp}

    @classmethod
    def from_json(cls, data: dict) -> "CycNum":
        return cls(data["p"], data["coeffs"], data["denom_exp"])

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{i}")
        body = " + ".join(terms) if terms else "0"
        if self.denom_exp:
            return f"CycNum(p={self.p}, ({body})/{self.p}^{self.denom_exp})"
        return f"CycNum(p={self.p}, {body})"


def conj_tau(a: CycNum) -> CycNum:
    """The involution zeta -> zeta^(-1)."""
    return a.galois(a.p - 1)


class FracElem:
    """Element of the fraction field of Z[1/p, zeta_p]: a quotient num/den
    of ring elements, denominator nonzero.  Used only inside exact kernel
    computations; the engine itself stays in the ring."""

    __slots__ = ("num", "den")

    def __init__(self, num: CycNum, den: CycNum | None = None):
        if den is None:
            den = CycNum.one(num.p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = CycNum.one(num.p)
        self.num = num
        self.den = den

    def __add__(self, other):
        return FracElem(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    def __sub__(self, other):
        return FracElem(self.num * other.den - other.num * self.den,
                        self.den * other.den)

    def __neg__(self):
        return FracElem(-self.num, self.den)

    def __mul__(self, other):
        return FracElem(self.num * other.num, self.den * other.den)

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FracElem(self.den, self.num)

    def __eq__(self, other):
        if not isinstance(other, FracElem):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("fractions are not canonicalized; do not hash")

    def is_zero(self):
        return self.num.is_zero()

    def as_ring_element(self) -> CycNum:
        """The value as a CycNum, when it lies in the ring."""
        return self.num.exact_div(self.den)

    def __repr__(self):
        return f"FracElem({self.num!r} / {self.den!r})"


class FractionFieldRing(Ring):
    """Field-of-fractions adapter over Z[1/p, zeta_p] (exact)."""

    is_field = True

    def __init__(self, p: int):
        self.p = p

    def zero(self):
        return FracElem(CycNum.zero(self.p))

    def one(self):
        return FracElem(CycNum.one(self.p))

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def eq(self, a, b):
        return a == b

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a):
        return a.is_zero()

    def from_int(self, n):
        return FracElem(CycNum.from_int(n, self.p))

    def embed(self, a: CycNum) -> FracElem:
        return FracElem(a)

    def __repr__(self):
        return f"Frac(A(p={self.p}))"


# ----------------------------------------------------------------------
# polynomial helpers over F_l (dense coefficient lists, low degree first)

def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f

def _poly_mod(f, g, l):
    f = [c % l for c in f]
    _poly_trim(f)
    dg = len(g) - 1
    lead_inv = pow(g[-1], -1, l)
    while len(f) - 1 >= dg and f:
        shift = len(f) - 1 - dg
        factor = (f[-1] * lead_inv) % l
        for i, c in enumerate(g):
            f[shift + i] = (f[shift + i] - factor * c) % l
        _poly_trim(f)
    return f

def _poly_mul(f, g, l):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % l
    return _poly_trim(out)

def _poly_divmod(f, g, l):
    f = _poly_trim([c % l for c in f])
    q = [0] * max(len(f) - len(g) + 1, 0)
    lead_inv = pow(g[-1], -1, l)
    while f and len(f) >= len(g):
        shift = len(f) - len(g)
        factor = (f[-1] * lead_inv) % l
        q[shift] = factor
        for i, c in enumerate(g):
            f[shift + i] = (f[shift + i] - factor * c) % l
        _poly_trim(f)
    return _poly_trim(q), f

def _poly_sub(f, g, l):
    n = max(len(f), len(g))
    f = f + [0] * (n - len(f))
    g = g + [0] * (n - len(g))
    return _poly_trim([(a - b) % l for a, b in zip(f, g)])

def _poly_divides(g, f, l) -> bool:
    return not _poly_mod(list(f), g, l)

def _poly_is_irreducible(g, l) -> bool:
    d = len(g) - 1
    if d <= 1:
        return d == 1
    for deg in range(1, d // 2 + 1):
        for code in range(l ** deg):
            cand = []
            c = code
            for _ in range(deg):
                cand.append(c % l)
                c //= l
            cand.append(1)
            if _poly_divides(cand, g, l):
                return False
    return True


def _multiplicative_order(l: int, p: int) -> int:
    d = 1
    x = l % p
    while x != 1:
        x = (x * l) % p
        d += 1
    return d


class CoeffRing(Ring):
    """Base class for the coefficient rings in scope: the universal ring
    Z[1/p, zeta_p] and its residue fields F_l(zeta_p)."""

    kind = None
    p = None


class UniversalRing(CoeffRing):
    """Ring adapter for CycNum entries (the universal coefficient ring)."""

    kind = "A"
    is_field = False
    char = 0

    def __init__(self, p: int):
        self.p = p

    def zero(self):
        return CycNum.zero(self.p)

    def one(self):
        return CycNum.one(self.p)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def eq(self, a, b):
        return a == b

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a):
        return a.is_zero()

    def from_int(self, n):
        return CycNum.from_int(n, self.p)

    def __repr__(self):
        return f"A(p={self.p})"


class FieldElem:
    """Element of a residue field F_l[Z]/(h); thin wrapper over a coeff tuple."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: "ResidueField", coeffs):
        coeffs = [c % ring.l for c in coeffs]
        coeffs += [0] * (ring.degree - len(coeffs))
        if len(coeffs) > ring.degree:
            coeffs = _poly_mod(coeffs, list(ring.modulus), ring.l)
            coeffs += [0] * (ring.degree - len(coeffs))
        self.ring = ring
        self.coeffs = tuple(coeffs)

    def __add__(self, other):
        return FieldElem(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return FieldElem(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return FieldElem(self.ring, [-a for a in self.coeffs])

    def __mul__(self, other):
        prod = _poly_mul(list(self.coeffs), list(other.coeffs), self.ring.l)
        prod = _poly_mod(prod, list(self.ring.modulus), self.ring.l)
        return FieldElem(self.ring, prod)

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.ring is other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.ring), self.coeffs))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        l = self.ring.l
        # extended Euclid: maintain r_i = t_i * self (mod modulus)
        r0, r1 = list(self.ring.modulus), _poly_trim(list(self.coeffs))
        t0, t1 = [], [1]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1, l)
            r0, r1 = r1, rem
            t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1, l), l)
        if not r1:
            raise ZeroDivisionError("element shares a factor with the modulus")
        c_inv = pow(r1[0], -1, l)
        inv = _poly_mod([(c_inv * c) % l for c in t1], list(self.ring.modulus), l)
        return FieldElem(self.ring, inv)

    def to_json(self) -> dict:
        return {"l": self.ring.l, "h": list(self.ring.modulus), "coeffs": list(self.coeffs)}

    def __repr__(self):
        return f"FieldElem({list(self.coeffs)} in {self.ring!r})"


class ResidueField(CoeffRing):
    """The residue field F_l(zeta_p) = F_l[Z]/(h(Z)).

    h is the deterministic (lexicographically smallest) monic irreducible
    factor of the p-th cyclotomic polynomial over F_l; its degree equals
    the multiplicative order of l modulo p.
    """

    kind = "Fl"
    is_field = True

    def __init__(self, l: int, p: int, modulus):
        self.l = l
        self.p = p
        self.char = l
        self.modulus = tuple(modulus)  # monic, low degree first
        self.degree = len(modulus) - 1
        # image of zeta and precomputed zeta powers / p-power inverses
        if self.degree == 1:
            z = [(-self.modulus[0]) % l]
        else:
            z = [0, 1] + [0] * (self.degree - 2)
        zeta = FieldElem(self, z)
        powers = [self.one()]
        for _ in range(p - 1):
            powers.append(powers[-1] * zeta)
        self.zeta_powers = powers
        self.p_unit_inverse = FieldElem(self, [pow(p % l, -1, l)])

    def zero(self):
        return FieldElem(self, [0])

    def one(self):
        return FieldElem(self, [1])

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def eq(self, a, b):
        return a.coeffs == b.coeffs

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a):
        return a.is_zero()

    def from_int(self, n):
        return FieldElem(self, [n])

    def element(self, coeffs) -> FieldElem:
        return FieldElem(self, coeffs)

    def __repr__(self):
        return f"F_{self.l}(zeta_{self.p})"


@lru_cache(maxsize=None)
def build_residue_field(l: int, p: int) -> ResidueField:
    """Construct F_l(zeta_p), picking the modulus deterministically.

    The modulus is the lexicographically smallest monic irreducible factor
    of Phi_p over F_l (coefficient tuples compared constant-term-fastest),
    found by exhaustive trial over monic polynomials of the right degree.
    """
    if not _is_prime(l):
        raise ValueError(f"l = {l} is not prime")
    if p < 3 or not _is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime")
    if l == p:
        raise ValueError("residue characteristic l must differ from p")
    d = _multiplicative_order(l, p)
    phi = [1] * p  # 1 + Z + ... + Z^(p-1)
    for code in range(l ** d):
        cand = []
        c = code
        for _ in range(d):
            cand.append(c % l)
            c //= l
        cand.append(1)
        if _poly_divides(cand, phi, l):
            if not _poly_is_irreducible(cand, l):
                raise AssertionError("degree-d factor of Phi_p must be irreducible")
            return ResidueField(l, p, cand)
    raise AssertionError(f"Phi_{p} has no degree-{d} factor over F_{l}")


def phi_reduce(a: CycNum, target: ResidueField) -> FieldElem:
    """The structure morphism Z[1/p, zeta_p] -> F_l(zeta_p), applied to a."""
    if target.p != a.p:
        raise ValueError("target residue field has the wrong zeta order")
    acc = target.zero()
    for i, c in enumerate(a.coeffs):
        if c % target.l:
            acc = acc + FieldElem(target, [c]) * target.zeta_powers[i]
    for _ in range(a.denom_exp):
        acc = acc * target.p_unit_inverse
    return acc


def psi(x) -> CycNum:
    """The additive character of F_q with values in Z[1/p, zeta_p]^x,
    realized as zeta_p^Tr(x) through the absolute trace."""
    return CycNum.zeta(x.field.p, x.trace_int())
