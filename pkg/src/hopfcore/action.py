"""Module-algebra actions at desk scale and truncated stable cores of ideals.

The host algebra acts on a small algebra A through operator matrices for the
generator lifts; a general basis monomial acts as the increasing-order
divided composition of those operators.  For an ideal I of A with a
membership oracle, the truncated core collects the elements all of whose
images under basis monomials up to the cap stay inside I; it is the kernel
of a stack of exact linear conditions and shrinks as the cap grows.  The map
into the convolution algebra over A/I sends a to (index -> class of the
image of a), and primeness probes on the core quotient run through the
leading-term witnesses of the convolution module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Optional, Sequence

from .convolution import (
    CoefficientRing,
    ConvElement,
    RingFlags,
    leading,
    prime_witness,
    semiprime_witness,
)
from .errors import (
    ForeignGenerator,
    InputFormatError,
    NoWitnessFound,
    TruncationError,
)
from .linalg import (
    Q0,
    QMatrix,
    Subspace,
    Vector,
    complement,
    is_zero_vec,
    rat,
    unit_vec,
    zero_vec,
)
from .monoid import MultiIndex
from .pbw import PBWStructure
from .report import FAIL, INCONCLUSIVE, PASS, SKIP, Report


def _mono_label(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = [
        (n if k == 1 else f"{n}^{k}") for n, k in zip(names, exps) if k
    ]
    return "*".join(parts) if parts else "1"


class DeskAlgebra:
    """A finite-dimensional algebra (total table) or a commutative
    polynomial algebra truncated at a total degree bound (partial table)."""

    def __init__(self, kind, labels, degrees, one_vec, **extra):
        self.kind = kind
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.degrees = tuple(degrees)
        self.one_vec = tuple(one_vec)
        self.__dict__.update(extra)

    @classmethod
    def polynomial(cls, variables: Sequence[str], bound: int) -> "DeskAlgebra":
        names = tuple(str(v) for v in variables)
        if len(set(names)) != len(names):
            raise InputFormatError("duplicate variable names")
        import itertools

        monos = [
            e
            for e in itertools.product(*(range(bound + 1) for _ in names))
            if sum(e) <= bound
        ]
        monos.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        index = {e: t for t, e in enumerate(monos)}
        labels = [_mono_label(names, e) for e in monos]
        one = unit_vec(len(monos), index[(0,) * len(names)])
        return cls(
            "polynomial",
            labels,
            [sum(e) for e in monos],
            one,
            variables=names,
            bound=bound,
            monomials=tuple(monos),
            index=index,
        )

    @classmethod
    def finite(
        cls,
        labels: Sequence[str],
        one_label: str,
        table: Mapping[tuple[int, int], Iterable[tuple[int, Fraction]]],
    ) -> "DeskAlgebra":
        labels = tuple(str(s) for s in labels)
        pos = {s: i for i, s in enumerate(labels)}
        if one_label not in pos:
            raise InputFormatError(f"unit label {one_label!r} not in basis")
        normalized = {
            key: tuple((k, rat(c)) for k, c in val if c) for key, val in table.items()
        }
        return cls(
            "finite",
            labels,
            [0] * len(labels),
            unit_vec(len(labels), pos[one_label]),
            table=normalized,
        )

    def monomial_index(self, exps: Sequence[int]) -> int:
        try:
            return self.index[tuple(int(x) for x in exps)]
        except (AttributeError, KeyError):
            raise InputFormatError(f"monomial {tuple(exps)} outside the algebra")

    def mul(self, u: Vector, v: Vector) -> Vector:
        out = [Q0] * self.dim
        if self.kind == "polynomial":
            for i, a in enumerate(u):
                if not a:
                    continue
                ei = self.monomials[i]
                for j, b in enumerate(v):
                    if not b:
                        continue
                    target = tuple(x + y for x, y in zip(ei, self.monomials[j]))
                    if sum(target) > self.bound:
                        raise TruncationError(
                            f"product degree {sum(target)} exceeds bound {self.bound}"
                        )
                    out[self.index[target]] += a * b
        else:
            for i, a in enumerate(u):
                if not a:
                    continue
                for j, b in enumerate(v):
                    if not b:
                        continue
                    ab = a * b
                    for k, c in self.table.get((i, j), ()):
                        out[k] += ab * c
        return tuple(out)

    def element_str(self, v: Vector) -> str:
        from .linalg import rat_str

        parts = [
            (label if c == 1 else f"{rat_str(c)}*{label}")
            for label, c in zip(self.labels, v)
            if c
        ]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# ideal oracles


class IdealOracle:
    """Membership, normal forms, and quotient coordinates for an ideal."""

    algebra: DeskAlgebra

    def contains(self, v: Vector) -> bool:
        raise NotImplementedError

    def reduce(self, v: Vector) -> Vector:
        raise NotImplementedError

    @property
    def normal_labels(self) -> tuple[str, ...]:
        raise NotImplementedError

    def quotient_coords(self, v: Vector) -> Vector:
        raise NotImplementedError

    def lift(self, coords: Vector) -> Vector:
        raise NotImplementedError

    @property
    def is_unit(self) -> bool:
        return self.contains(self.algebra.one_vec)

    @property
    def is_zero(self) -> bool:
        return self.quotient_dim == self.algebra.dim

    @property
    def quotient_dim(self) -> int:
        return len(self.normal_labels)

    def describe(self) -> str:
        raise NotImplementedError


class MonomialIdeal(IdealOracle):
    """Ideal generated by monomials in a truncated polynomial algebra;
    membership is coefficientwise divisibility."""

    def __init__(self, algebra: DeskAlgebra, generators: Sequence[Sequence[int]]):
        if algebra.kind != "polynomial":
            raise InputFormatError("monomial ideals need a polynomial algebra")
        self.algebra = algebra
        self.generators = tuple(tuple(int(x) for x in g) for g in generators)
        for g in self.generators:
            if len(g) != len(algebra.variables):
                raise InputFormatError("generator arity mismatch")
        self._normal = tuple(
            t
            for t, e in enumerate(algebra.monomials)
            if not self._divisible(e)
        )

    def _divisible(self, exps: Sequence[int]) -> bool:
        return any(
            all(x >= y for x, y in zip(exps, g)) for g in self.generators
        )

    def contains(self, v: Vector) -> bool:
        return all(
            not c or self._divisible(self.algebra.monomials[i])
            for i, c in enumerate(v)
        )

    def reduce(self, v: Vector) -> Vector:
        return tuple(
            c if not self._divisible(self.algebra.monomials[i]) else Q0
            for i, c in enumerate(v)
        )

    @property
    def normal_labels(self) -> tuple[str, ...]:
        return tuple(self.algebra.labels[t] for t in self._normal)

    def quotient_coords(self, v: Vector) -> Vector:
        return tuple(v[t] for t in self._normal)

    def lift(self, coords: Vector) -> Vector:
        out = [Q0] * self.algebra.dim
        for pos, c in enumerate(coords):
            out[self._normal[pos]] = c
        return tuple(out)

    def describe(self) -> str:
        if not self.generators:
            return "(0)"
        names = self.algebra.variables
        return "(" + ", ".join(_mono_label(names, g) for g in self.generators) + ")"


class PrincipalIdeal(IdealOracle):
    """Ideal generated by one polynomial; membership by exact division
    against its degree-lex leading term."""

    def __init__(self, algebra: DeskAlgebra, element: Vector):
        if algebra.kind != "polynomial":
            raise InputFormatError("principal ideals need a polynomial algebra")
        if is_zero_vec(element):
            raise InputFormatError("principal generator must be nonzero")
        self.algebra = algebra
        self.generator = tuple(element)
        lead = max(
            (t for t, c in enumerate(element) if c),
            key=lambda t: (sum(algebra.monomials[t]), algebra.monomials[t]),
        )
        self._lt_index = lead
        self._lt_exps = algebra.monomials[lead]
        self._lt_coeff = element[lead]
        self._normal = tuple(
            t
            for t, e in enumerate(algebra.monomials)
            if not all(x >= y for x, y in zip(e, self._lt_exps))
        )

    def _order_key(self, t: int):
        return (sum(self.algebra.monomials[t]), self.algebra.monomials[t])

    def reduce(self, v: Vector) -> Vector:
        alg = self.algebra
        work = {t: c for t, c in enumerate(v) if c}
        remainder: dict[int, Fraction] = {}
        while work:
            t = max(work, key=self._order_key)
            c = work.pop(t)
            exps = alg.monomials[t]
            if all(x >= y for x, y in zip(exps, self._lt_exps)):
                q = tuple(x - y for x, y in zip(exps, self._lt_exps))
                scale = c / self._lt_coeff
                for s, gc in enumerate(self.generator):
                    if not gc:
                        continue
                    target = tuple(
                        x + y for x, y in zip(q, alg.monomials[s])
                    )
                    tt = alg.index[target]
                    if tt == t:
                        continue
                    val = work.get(tt, Q0) - scale * gc
                    if val:
                        work[tt] = val
                    else:
                        work.pop(tt, None)
            else:
                remainder[t] = c
        out = [Q0] * alg.dim
        for t, c in remainder.items():
            out[t] = c
        return tuple(out)

    def contains(self, v: Vector) -> bool:
        return is_zero_vec(self.reduce(v))

    @property
    def normal_labels(self) -> tuple[str, ...]:
        return tuple(self.algebra.labels[t] for t in self._normal)

    def quotient_coords(self, v: Vector) -> Vector:
        reduced = self.reduce(v)
        return tuple(reduced[t] for t in self._normal)

    def lift(self, coords: Vector) -> Vector:
        out = [Q0] * self.algebra.dim
        for pos, c in enumerate(coords):
            out[self._normal[pos]] = c
        return tuple(out)

    def describe(self) -> str:
        return f"({self.algebra.element_str(self.generator)})"


class SubspaceIdeal(IdealOracle):
    """An ideal of a finite-dimensional algebra given as a subspace;
    two-sidedness is validated on the basis at construction."""

    def __init__(self, algebra: DeskAlgebra, subspace: Subspace):
        if algebra.kind != "finite":
            raise InputFormatError("subspace ideals need a finite-dimensional algebra")
        if subspace.ambient_dim != algebra.dim:
            raise InputFormatError("subspace dimension mismatch")
        self.algebra = algebra
        self.subspace = subspace
        for row in subspace.basis:
            for i in range(algebra.dim):
                e = unit_vec(algebra.dim, i)
                if not subspace.contains(algebra.mul(e, row)) or not subspace.contains(
                    algebra.mul(row, e)
                ):
                    raise InputFormatError("subspace is not a two-sided ideal")
        self._complement = complement(subspace, Subspace.full(algebra.dim))

    def contains(self, v: Vector) -> bool:
        return self.subspace.contains(v)

    def reduce(self, v: Vector) -> Vector:
        return self.subspace.reduce(v)

    @property
    def normal_labels(self) -> tuple[str, ...]:
        return tuple(
            self.algebra.labels[p] for p in self._complement.pivots
        )

    def quotient_coords(self, v: Vector) -> Vector:
        residual = self.subspace.reduce(v)
        return tuple(residual[p] for p in self._complement.pivots)

    def lift(self, coords: Vector) -> Vector:
        out = [Q0] * self.algebra.dim
        for c, row in zip(coords, self._complement.basis):
            if c:
                for j in range(self.algebra.dim):
                    if row[j]:
                        out[j] += c * row[j]
        return tuple(out)

    def describe(self) -> str:
        return f"subspace ideal of dim {self.subspace.dim}"


def quotient_ring(
    ideal: IdealOracle, flags: RingFlags, name: Optional[str] = None
) -> "QuotientRing":
    return QuotientRing(ideal, flags, name)


class QuotientRing(CoefficientRing):
    """A/I on the normal-form basis of the ideal oracle; multiplication may
    raise TruncationError when the ambient product does."""

    def __init__(self, ideal: IdealOracle, flags: RingFlags, name=None):
        self.ideal = ideal
        labels = ideal.normal_labels
        one = ideal.quotient_coords(ideal.algebra.one_vec)
        super().__init__(
            name or f"A/{ideal.describe()}", labels, {}, one, flags
        )

    def mul(self, u: Vector, v: Vector) -> Vector:
        prod = self.ideal.algebra.mul(self.ideal.lift(u), self.ideal.lift(v))
        return self.ideal.quotient_coords(prod)

    def project(self, v: Vector) -> Vector:
        return self.ideal.quotient_coords(v)


# ---------------------------------------------------------------------------
# actions


class ModuleAlgebraAction:
    """Operators for the generator lifts, extended to every basis monomial
    as the increasing-order divided composition."""

    def __init__(
        self,
        host: PBWStructure,
        algebra: DeskAlgebra,
        gen_ops: Mapping[str, QMatrix],
    ):
        ids = set(host.gens.ids)
        for gid in gen_ops:
            if gid not in ids:
                raise ForeignGenerator(f"operator for unknown generator {gid!r}")
        missing = ids - set(gen_ops)
        if missing:
            raise InputFormatError(f"missing operators for {sorted(missing)}")
        for gid, op in gen_ops.items():
            if op.nrows != algebra.dim or op.ncols != algebra.dim:
                raise InputFormatError(f"operator for {gid!r} has the wrong shape")
        self.host = host
        self.algebra = algebra
        self.gen_ops = dict(gen_ops)
        self._matrices: dict[MultiIndex, QMatrix] = {}

    def act_matrix(self, m: MultiIndex) -> QMatrix:
        cached = self._matrices.get(m)
        if cached is not None:
            return cached
        out = QMatrix.identity(self.algebra.dim)
        for gid, _ in self.host.gens.generators:
            k = m.mult(gid)
            if not k:
                continue
            block = self.gen_ops[gid]
            power = block
            for _ in range(k - 1):
                power = power @ block
            out = out @ power.scale(Fraction(1, factorial(k)))
        self._matrices[m] = out
        return out

    def act(self, m: MultiIndex, v: Vector) -> Vector:
        return self.act_matrix(m).apply(v)


def verify_module_algebra(action: ModuleAlgebraAction) -> Report:
    """Unit law, the comultiplication law on products of basis elements, and
    compatibility of the generator operators with the relations among the
    generator lifts."""
    rep = Report("module-algebra")
    host, alg = action.host, action.algebra
    data = host.data

    for gid, _ in host.gens.generators:
        eps = data.counit_of(host.lifts[gid])
        image = action.gen_ops[gid].apply(alg.one_vec)
        expected = tuple(eps * c for c in alg.one_vec)
        rep.add(
            "unit-law",
            gid,
            PASS if image == expected else FAIL,
            "" if image == expected else "operator does not kill 1",
        )

    for gid, _ in host.gens.generators:
        terms = host.expand_comult(host.gens.delta(gid))
        checked = skipped = bad = 0
        witness = ""
        for a in range(alg.dim):
            ea = unit_vec(alg.dim, a)
            for b in range(alg.dim):
                eb = unit_vec(alg.dim, b)
                try:
                    prod = alg.mul(ea, eb)
                    lhs = action.act(host.gens.delta(gid), prod)
                    rhs = zero_vec(alg.dim)
                    for i, j, c in terms:
                        piece = alg.mul(action.act(i, ea), action.act(j, eb))
                        rhs = tuple(
                            x + c * y for x, y in zip(rhs, piece)
                        )
                except TruncationError:
                    skipped += 1
                    continue
                checked += 1
                if lhs != rhs:
                    bad += 1
                    if not witness:
                        witness = f"{alg.labels[a]},{alg.labels[b]}"
        rep.add(
            "product-law",
            gid,
            PASS if not bad else FAIL,
            f"checked {checked}, skipped {skipped}"
            + (f", first failure at {witness}" if witness else ""),
        )

    gens = host.gens
    for gid, dg in gens.generators:
        for hid, dh in gens.generators:
            if dg + dh > data.degree_bound:
                continue
            prod = data.multiply(host.lifts[gid], host.lifts[hid])
            expansion = host.pbw_coords(prod)
            expected = QMatrix.zeros(alg.dim, alg.dim)
            for idx, c in expansion.items():
                expected = expected.add(action.act_matrix(idx).scale(c))
            actual = action.gen_ops[gid] @ action.gen_ops[hid]
            rep.add(
                "relation-compatibility",
                f"{gid},{hid}",
                PASS if actual == expected else FAIL,
            )
    return rep


def conv_map(action: ModuleAlgebraAction, ring: QuotientRing, a: Vector) -> ConvElement:
    """The element (index -> class of the image of a) of the convolution
    algebra over A/I; its kernel over all of A is the stable core."""
    values = {}
    for m in action.host.indices:
        coords = ring.project(action.act(m, a))
        if not is_zero_vec(coords):
            values[m] = coords
    return ConvElement(action.host, ring, values)


@dataclass(frozen=True)
class HCoreResult:
    core: Subspace
    by_cap: tuple[Subspace, ...]
    stabilized: bool

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.by_cap)

    @property
    def stabilized_at(self) -> Optional[int]:
        """Smallest cap at which the core stopped shrinking, if any."""
        for d in range(1, len(self.by_cap)):
            if self.by_cap[d] == self.by_cap[d - 1]:
                return d
        return None


def hcore(
    action: ModuleAlgebraAction,
    ideal: IdealOracle,
    core_cap: int,
    conv_cap: int,
) -> HCoreResult:
    """Truncated stable core: elements of degree <= core_cap whose images
    under every basis monomial of degree <= conv_cap stay in the ideal.
    Computed as a stacked exact kernel; returns the whole chain of cores for
    caps 0..conv_cap together with the stabilization flag (last two equal)."""
    host, alg = action.host, action.algebra
    if conv_cap > host.data.degree_bound:
        raise TruncationError(
            f"conv cap {conv_cap} exceeds the host bound {host.data.degree_bound}"
        )
    cols = [i for i in range(alg.dim) if alg.degrees[i] <= core_cap]
    col_pos = {c: t for t, c in enumerate(cols)}
    rows: list[Vector] = []
    cores: list[Subspace] = []

    def embed(small: Subspace) -> Subspace:
        vectors = []
        for row in small.basis:
            big = [Q0] * alg.dim
            for t, c in enumerate(row):
                big[cols[t]] = c
            vectors.append(big)
        return Subspace.from_vectors(vectors, alg.dim)

    by_degree: dict[int, list[MultiIndex]] = {}
    for m in host.indices:
        by_degree.setdefault(host.gens.degree(m), []).append(m)

    for d in range(conv_cap + 1):
        for m in by_degree.get(d, []):
            mat = action.act_matrix(m)
            images = [ideal.quotient_coords(mat.column(c)) for c in cols]
            for pos in range(ideal.quotient_dim):
                row = tuple(images[t][pos] for t in range(len(cols)))
                if not is_zero_vec(row):
                    rows.append(row)
        cores.append(embed(QMatrix(rows, len(cols)).kernel()))
    stabilized = len(cores) >= 2 and cores[-1] == cores[-2]
    return HCoreResult(cores[-1], tuple(cores), stabilized)


def core_primeness_probe(
    action: ModuleAlgebraAction,
    ideal: IdealOracle,
    ring: QuotientRing,
    core: Subspace,
    mode: str,
    bound: int,
) -> Report:
    """Zero-divisor / witness probes on classes modulo the core.

    domain mode multiplies leading values (nonzero products imply nonzero
    convolution products by the exact leading-term law); prime and semiprime
    modes run the witness scans over A/I.  Outcomes beyond the ambient
    truncation are reported inconclusive."""
    rep = Report(f"probe-{mode}")
    if mode not in ("domain", "prime", "semiprime"):
        raise InputFormatError(f"unknown probe mode {mode!r}")
    if ideal.is_unit:
        rep.add(f"probe-{mode}", ideal.describe(), SKIP, "DegenerateIdeal")
        return rep
    alg = action.algebra
    candidates = [
        i
        for i in range(alg.dim)
        if alg.degrees[i] <= bound and not core.contains(unit_vec(alg.dim, i))
    ]
    images = {i: conv_map(action, ring, unit_vec(alg.dim, i)) for i in candidates}

    if mode == "semiprime":
        for i in candidates:
            try:
                witness = semiprime_witness(images[i])
                rep.add(
                    "semiprime-witness",
                    alg.labels[i],
                    PASS,
                    f"r={ring.format(witness.r)}",
                )
            except TruncationError:
                rep.add("semiprime-witness", alg.labels[i], INCONCLUSIVE, "truncated")
            except NoWitnessFound as exc:
                rep.add("semiprime-witness", alg.labels[i], FAIL, str(exc))
        return rep

    for ti, i in enumerate(candidates):
        for j in candidates[ti:]:
            subject = f"{alg.labels[i]},{alg.labels[j]}"
            if mode == "domain":
                li, lj = leading(images[i]), leading(images[j])
                total = action.host.gens.add(li.index, lj.index)
                if (
                    action.host.gens.degree(total)
                    > action.host.data.degree_bound
                ):
                    rep.add("domain-probe", subject, INCONCLUSIVE, "truncated")
                    continue
                try:
                    # zero divisors need not be two-sided, so probe both
                    # orientations of the leading values
                    zero = any(
                        ring.is_zero(ring.mul(u, v))
                        for u, v in ((li.value, lj.value), (lj.value, li.value))
                    )
                except TruncationError:
                    rep.add("domain-probe", subject, INCONCLUSIVE, "truncated")
                    continue
                rep.add(
                    "domain-probe",
                    subject,
                    FAIL if zero else PASS,
                    "zero divisor pair" if zero else "",
                )
            else:
                try:
                    witness = prime_witness(images[i], images[j])
                    rep.add(
                        "prime-witness",
                        subject,
                        PASS,
                        f"r={ring.format(witness.r)}",
                    )
                except TruncationError:
                    rep.add("prime-witness", subject, INCONCLUSIVE, "truncated")
                except NoWitnessFound as exc:
                    rep.add("prime-witness", subject, FAIL, str(exc))
    return rep
