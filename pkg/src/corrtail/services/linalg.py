"""Exact rational matrices and the finite algebras they span.

Matrices are sparse sympy DomainMatrix objects over QQ. Linear spans of
matrices are kept as an incremental semi-echelon basis of their flattened
entries, which is what the closure iterations below extend.
"""
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import CorrtailError

logger = logging.getLogger(__name__)

Key = Tuple[int, int]
Vector = Dict[Key, Any]

# Matrix helpers
def matrix(size: int, entries: Dict[Key, Any]) -> DomainMatrix:
    dok = {key: QQ(value) if isinstance(value, int) else value for key, value in entries.items() if value}
    return DomainMatrix.from_dok(dok, (size, size), QQ)

def zero(size: int) -> DomainMatrix:
    return DomainMatrix.zeros((size, size), QQ)

def identity(size: int) -> DomainMatrix:
    return DomainMatrix.eye(size, QQ)

def unit(size: int, row: int, col: int) -> DomainMatrix:
    return matrix(size, {(row, col): 1})

def sparse(m: DomainMatrix) -> DomainMatrix:
    return m.to_sparse() if m.rep.fmt != "sparse" else m

def mul(*factors: DomainMatrix) -> DomainMatrix:
    result = sparse(factors[0])
    for factor in factors[1:]:
        result = result.matmul(sparse(factor))
    return result

def add(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return sparse(a).add(sparse(b))

def sub(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return sparse(a).sub(sparse(b))

def total(size: int, terms: Iterable[DomainMatrix]) -> DomainMatrix:
    result = zero(size)
    for term in terms:
        result = add(result, term)
    return result

def adjoint(m: DomainMatrix) -> DomainMatrix:
    # real rational entries: the adjoint is the transpose
    return sparse(m).transpose()

def flatten(m: DomainMatrix) -> Vector:
    return {key: value for key, value in m.to_dok().items() if value}

def is_zero(m: DomainMatrix) -> bool:
    return not flatten(m)

def equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    return a.shape == b.shape and flatten(a) == flatten(b)

def rank(m: DomainMatrix) -> int:
    return 0 if is_zero(m) else m.rank()

def block_diagonal(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    n, m = a.shape[0], b.shape[0]
    entries = dict(flatten(a))
    entries.update({(n + i, n + j): value for (i, j), value in flatten(b).items()})
    return matrix(n + m, entries)

def block(m: DomainMatrix, start: int, size: int) -> DomainMatrix:
    """The diagonal block of m on indices start .. start + size - 1."""
    entries = {
        (i - start, j - start): value
        for (i, j), value in flatten(m).items()
        if start <= i < start + size and start <= j < start + size
    }
    return matrix(size, entries)

def embed(m: DomainMatrix, size: int, offset: int = 0) -> DomainMatrix:
    return matrix(size, {(i + offset, j + offset): value for (i, j), value in flatten(m).items()})

def is_projection(m: DomainMatrix) -> bool:
    return equal(mul(m, m), m) and equal(adjoint(m), m)

def is_partial_isometry(m: DomainMatrix) -> bool:
    return equal(mul(m, adjoint(m), m), m)

def describe(m: DomainMatrix) -> str:
    entries = sorted(flatten(m).items())
    return "{" + ", ".join(f"({i},{j}): {value}" for (i, j), value in entries) + "}"

# Gauge grading
def laurent_coefficients(m: DomainMatrix, degrees: Sequence[int]) -> Dict[int, DomainMatrix]:
    """Coefficients of U_z m U_z* as a Laurent polynomial in z, keyed by exponent."""
    grouped: Dict[int, Vector] = {}
    for (i, j), value in flatten(m).items():
        grouped.setdefault(degrees[i] - degrees[j], {})[(i, j)] = value
    return {exponent: matrix(m.shape[0], entries) for exponent, entries in sorted(grouped.items())}

def is_homogeneous(m: DomainMatrix, degrees: Sequence[int], exponent: int) -> bool:
    return all(k == exponent for k in laurent_coefficients(m, degrees))

# Echelon bases
class EchelonBasis:
    """Semi-echelon basis of flattened matrices; each row is keyed by its leading index."""

    def __init__(self):
        self.rows: Dict[Key, Vector] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vector: Vector) -> Vector:
        remainder = dict(vector)
        while remainder:
            pivot = min(remainder)
            row = self.rows.get(pivot)
            if row is None:
                break
            factor = remainder[pivot]
            for key, value in row.items():
                updated = remainder.get(key, QQ.zero) - factor * value
                if updated:
                    remainder[key] = updated
                else:
                    remainder.pop(key, None)
        return remainder

    def add(self, vector: Vector) -> bool:
        """Insert vector; returns whether the span grew."""
        remainder = self.reduce(vector)
        if not remainder:
            return False
        pivot = min(remainder)
        lead = remainder[pivot]
        self.rows[pivot] = {key: value / lead for key, value in remainder.items()}
        return True

    def contains(self, vector: Vector) -> bool:
        return not self.reduce(vector)

class SpannedAlgebra:
    """Finite-dimensional span of square matrices, usually closed under products."""

    def __init__(self, size: int, generators: List[DomainMatrix], elements: List[DomainMatrix], echelon: EchelonBasis):
        self.size = size
        self.generators = generators
        self.elements = elements
        self._echelon = echelon

    @property
    def dimension(self) -> int:
        return len(self._echelon)

    def contains(self, m: DomainMatrix) -> bool:
        return self._echelon.contains(flatten(m))

    def contains_all(self, other: "SpannedAlgebra") -> bool:
        return all(self.contains(m) for m in other.elements)

    def same_span(self, other: "SpannedAlgebra") -> bool:
        return self.dimension == other.dimension and self.contains_all(other)

    def basis(self) -> List[DomainMatrix]:
        """Canonical basis: reduced row echelon form of the flattened elements."""
        if not self.elements:
            return []
        width = self.size * self.size
        rows = {
            r: {i * self.size + j: value for (i, j), value in flatten(m).items()}
            for r, m in enumerate(self.elements)
        }
        stacked = DomainMatrix.from_dod(rows, (len(self.elements), width), QQ)
        reduced, pivots = stacked.rref()
        result = []
        for r, row in sorted(reduced.to_dod().items())[:len(pivots)]:
            result.append(matrix(self.size, {divmod(c, self.size): value for c, value in row.items()}))
        return result

def _check_sizes(matrices: Sequence[DomainMatrix], size: Optional[int]) -> int:
    if size is None:
        if not matrices:
            raise CorrtailError(status_code=400, detail="Cannot infer the matrix size from an empty generator list")
        size = matrices[0].shape[0]
    for m in matrices:
        if m.shape != (size, size):
            raise CorrtailError(status_code=400, detail=f"Size mismatch: expected {size}x{size}, got {m.shape[0]}x{m.shape[1]}")
    return size

def subspace(elements: Sequence[DomainMatrix], size: Optional[int] = None) -> SpannedAlgebra:
    """Plain linear span, without any product closure."""
    size = _check_sizes(elements, size)
    echelon = EchelonBasis()
    kept = [m for m in elements if echelon.add(flatten(m))]
    return SpannedAlgebra(size, list(elements), kept, echelon)

def _close(size: int, seeds: Sequence[DomainMatrix], left: Sequence[DomainMatrix], right: Sequence[DomainMatrix]) -> SpannedAlgebra:
    echelon = EchelonBasis()
    elements: List[DomainMatrix] = []
    frontier: List[DomainMatrix] = []
    for m in seeds:
        if echelon.add(flatten(m)):
            elements.append(m)
            frontier.append(m)
    while frontier:
        current = frontier.pop()
        products = [mul(g, current) for g in left] + [mul(current, g) for g in right]
        for product in products:
            if echelon.add(flatten(product)):
                elements.append(product)
                frontier.append(product)
    return SpannedAlgebra(size, list(seeds), elements, echelon)

def span_closure(gens: Sequence[DomainMatrix], size: Optional[int] = None) -> SpannedAlgebra:
    """Smallest product- and adjoint-closed span containing gens."""
    size = _check_sizes(gens, size)
    closed = [sparse(g) for g in gens] + [adjoint(g) for g in gens]
    algebra = _close(size, closed, closed, [])
    algebra.generators = closed
    logger.debug(f"Span closure of {len(gens)} generators in size {size}: dimension {algebra.dimension}")
    return algebra

def ideal_closure(algebra: SpannedAlgebra, seeds: Sequence[DomainMatrix]) -> SpannedAlgebra:
    """Two-sided ideal of algebra generated by seeds."""
    _check_sizes(seeds, algebra.size)
    return _close(algebra.size, [sparse(s) for s in seeds], algebra.generators, algebra.generators)

def compress(algebra: SpannedAlgebra, p: DomainMatrix) -> SpannedAlgebra:
    """The span {p x p : x in algebra}."""
    return subspace([mul(p, x, p) for x in algebra.elements], algebra.size)

# Homomorphisms given on generators
class MapKernel:
    def __init__(self, well_defined: bool, domain_dimension: int, image_dimension: int, kernel_dimension: int, witness: Optional[DomainMatrix]):
        self.well_defined = well_defined
        self.domain_dimension = domain_dimension
        self.image_dimension = image_dimension
        self.kernel_dimension = kernel_dimension
        self.witness = witness

def _null_combination(parts: List[DomainMatrix]) -> Optional[List[Any]]:
    """Coefficients c, not all zero, with sum c_k parts[k] = 0, if any."""
    if not parts:
        return None
    size = parts[0].shape[0]
    width = size * size
    rows = {
        r: {i * size + j: value for (i, j), value in flatten(m).items()}
        for r, m in enumerate(parts)
    }
    stacked = DomainMatrix.from_dod(rows, (len(parts), width), QQ)
    null = stacked.transpose().nullspace()
    if null.shape[0] == 0:
        return None
    first = null.to_dod().get(0, {})
    return [first.get(k, QQ.zero) for k in range(len(parts))]

def map_kernel(
    domain_gens: Sequence[DomainMatrix],
    target_gens: Sequence[DomainMatrix],
    domain: Optional[SpannedAlgebra] = None,
    image: Optional[SpannedAlgebra] = None,
) -> MapKernel:
    """Kernel of the map sending domain_gens[k] to target_gens[k], extended multiplicatively.

    The map is well defined exactly when the algebra generated by the pairs
    (x, rho(x)) is no bigger than the domain algebra. Closures the caller already
    holds can be passed as domain and image; a target list made of the very same
    matrix objects is the identity map.
    """
    if len(domain_gens) != len(target_gens):
        raise CorrtailError(status_code=400, detail="Domain and target generator lists differ in length")
    n = _check_sizes(domain_gens, None)
    m = _check_sizes(target_gens, None)

    domain = domain if domain is not None else span_closure(domain_gens)
    if all(x is y for x, y in zip(domain_gens, target_gens)):
        return MapKernel(True, domain.dimension, domain.dimension, 0, None)
    image = image if image is not None else span_closure(target_gens)
    pairs = span_closure([block_diagonal(x, y) for x, y in zip(domain_gens, target_gens)])
    domain_parts = [block(e, 0, n) for e in pairs.elements]
    target_parts = [block(e, n, m) for e in pairs.elements]

    if pairs.dimension != domain.dimension:
        coefficients = _null_combination(domain_parts)
        witness = None
        if coefficients is not None:
            witness = total(m, [p.scalarmul(c) for p, c in zip(target_parts, coefficients) if c])
        return MapKernel(False, domain.dimension, image.dimension, 0, witness)

    kernel_dimension = domain.dimension - image.dimension
    witness = None
    if kernel_dimension:
        coefficients = _null_combination(target_parts)
        if coefficients is not None:
            witness = total(n, [p.scalarmul(c) for p, c in zip(domain_parts, coefficients) if c])
    return MapKernel(True, domain.dimension, image.dimension, kernel_dimension, witness)
