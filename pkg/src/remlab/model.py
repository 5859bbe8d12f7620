"""Model specifications, spin-block partitions, disorder realizations.

A configuration of ``N`` spins is split into ``n`` contiguous blocks.  Each
disorder index names an ordered group of blocks; all configurations agreeing
on those blocks share one sampled value, which is what correlates energies in
the hierarchical and subset-indexed models.  Energies are

    H(sigma) = N * sum_s weight_s * xi(s, sigma(s)) + h * spin_sum(sigma)

with the field term only present in the ExternalField variant (b = 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .disorder import DisorderFamily
from .errors import SpecValidationError

REM = "REM"
GREM = "GREM"
BKM = "BKM"
EXTERNAL_FIELD = "ExternalField"
VARIANTS = (REM, GREM, BKM, EXTERNAL_FIELD)

#: Hard limit on the number of spin blocks; constraint enumeration downstream
#: walks all 2^n - 1 block subsets.
MAX_BLOCKS = 8

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    """One round of the splitmix64 mixer (public-domain constants)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, *labels: int) -> int:
    """Derive an independent 64-bit seed from a master seed and integer labels.

    The master seed is passed through splitmix64, then each label is folded in
    with a further round.  Equal (seed, labels) always give equal results, on
    every platform, which is what makes realizations reproducible and lets
    equivalent specs share disorder streams.
    """
    h = _splitmix64(seed & _MASK64)
    for v in labels:
        h = _splitmix64(h ^ (int(v) & _MASK64))
    return h


def index_stream_key(seed: int, blocks: tuple[int, ...]) -> int:
    """Stream id for the disorder table of one index: mix_seed(seed, *blocks)."""
    return mix_seed(seed, *blocks)


@dataclass(frozen=True, eq=False)
class DisorderIndex:
    """One disorder index: an ordered group of block ids with weight and family."""

    blocks: tuple[int, ...]
    weight: float
    family: DisorderFamily


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Validated description of a random energy model.

    ``indices`` follow the variant's structure: the single group ``(1,)`` for
    REM, the full chain ``(1,), (1,2), ...`` for GREM, increasing subsets for
    BKM, and ordered sequences of distinct blocks for ExternalField (where
    ``(1,2)`` and ``(2,1)`` are distinct indices with independent disorder).
    """

    variant: str
    n: int
    p: tuple[float, ...]
    indices: tuple[DisorderIndex, ...]
    h: float = 0.0
    b: int = 2

    def __post_init__(self):
        _validate_spec(self)


def _validate_spec(spec: ModelSpec) -> None:
    if spec.variant not in VARIANTS:
        raise SpecValidationError(f"unknown variant {spec.variant!r}")
    if not isinstance(spec.n, int) or spec.n < 1:
        raise SpecValidationError("n must be a positive integer")
    if spec.n > MAX_BLOCKS:
        raise SpecValidationError(f"at most {MAX_BLOCKS} blocks are supported")
    if len(spec.p) != spec.n:
        raise SpecValidationError("p must have one entry per block")
    if any(not (pj > 0.0 and math.isfinite(pj)) for pj in spec.p):
        raise SpecValidationError(
            "all proportions must be strictly positive (zero-proportion blocks "
            "are out of scope)"
        )
    if abs(sum(spec.p) - 1.0) > 1e-9:
        raise SpecValidationError("p must sum to 1")
    if not isinstance(spec.b, int) or spec.b < 2:
        raise SpecValidationError("branching factor b must be an integer >= 2")
    if not (math.isfinite(spec.h) and spec.h >= 0.0):
        raise SpecValidationError("field strength h must be finite and >= 0")
    if spec.variant != EXTERNAL_FIELD and spec.h != 0.0:
        raise SpecValidationError("nonzero field requires the ExternalField variant")
    if spec.variant == EXTERNAL_FIELD and spec.b != 2:
        raise SpecValidationError("ExternalField requires b = 2 (spin sums need +-1 spins)")
    if not spec.indices:
        raise SpecValidationError("at least one disorder index is required")

    seen = set()
    for idx in spec.indices:
        if not isinstance(idx, DisorderIndex):
            raise SpecValidationError("indices must be DisorderIndex instances")
        blocks = idx.blocks
        if not blocks:
            raise SpecValidationError("index block groups must be nonempty")
        if any(not (1 <= i <= spec.n) for i in blocks):
            raise SpecValidationError("index blocks must be in 1..n")
        if len(set(blocks)) != len(blocks):
            raise SpecValidationError("index blocks must be distinct")
        if blocks in seen:
            raise SpecValidationError(f"duplicate index {blocks}")
        seen.add(blocks)
        if not (math.isfinite(idx.weight) and idx.weight >= 0.0):
            raise SpecValidationError("index weights must be finite and >= 0")
        if not isinstance(idx.family, DisorderFamily):
            raise SpecValidationError("each index needs a DisorderFamily")

    if spec.variant == REM:
        if spec.n != 1:
            raise SpecValidationError("REM has a single block (n = 1)")
        if len(spec.indices) != 1 or spec.indices[0].blocks != (1,):
            raise SpecValidationError("REM has the single index (1,)")
    elif spec.variant == GREM:
        chain = tuple(tuple(range(1, j + 1)) for j in range(1, spec.n + 1))
        if tuple(idx.blocks for idx in spec.indices) != chain:
            raise SpecValidationError("GREM indices must form the chain")
    elif spec.variant == BKM:
        for idx in spec.indices:
            if tuple(sorted(idx.blocks)) != idx.blocks:
                raise SpecValidationError(
                    "BKM indices are subsets and must be given in increasing order"
                )
    # ExternalField: any distinct ordered sequences, already checked above.


# ---------------------------------------------------------------------------
# Constructors


def make_rem(family: DisorderFamily, weight: float = 1.0, b: int = 2) -> ModelSpec:
    return ModelSpec(
        variant=REM,
        n=1,
        p=(1.0,),
        indices=(DisorderIndex((1,), float(weight), family),),
        b=b,
    )


def make_grem(
    p: Sequence[float],
    weights: Sequence[float],
    families: DisorderFamily | Sequence[DisorderFamily],
    b: int = 2,
) -> ModelSpec:
    n = len(p)
    if len(weights) != n:
        raise SpecValidationError("GREM needs one weight per level")
    if isinstance(families, DisorderFamily):
        families = [families] * n
    if len(families) != n:
        raise SpecValidationError("GREM needs one family per level (or a single shared one)")
    indices = tuple(
        DisorderIndex(tuple(range(1, j + 1)), float(weights[j - 1]), families[j - 1])
        for j in range(1, n + 1)
    )
    return ModelSpec(variant=GREM, n=n, p=tuple(float(x) for x in p), indices=indices, b=b)


def make_bkm(
    p: Sequence[float],
    indices: Sequence[tuple[Sequence[int], float, DisorderFamily]],
    b: int = 2,
) -> ModelSpec:
    built = tuple(
        DisorderIndex(tuple(int(i) for i in blocks), float(w), fam)
        for blocks, w, fam in indices
    )
    return ModelSpec(
        variant=BKM, n=len(p), p=tuple(float(x) for x in p), indices=built, b=b
    )


def make_external_field(
    p: Sequence[float],
    indices: Sequence[tuple[Sequence[int], float, DisorderFamily]],
    h: float,
) -> ModelSpec:
    built = tuple(
        DisorderIndex(tuple(int(i) for i in blocks), float(w), fam)
        for blocks, w, fam in indices
    )
    return ModelSpec(
        variant=EXTERNAL_FIELD,
        n=len(p),
        p=tuple(float(x) for x in p),
        indices=built,
        h=float(h),
        b=2,
    )


# ---------------------------------------------------------------------------
# Block partitions


@dataclass(frozen=True)
class BlockPartition:
    """Integer split of N spins into blocks: sum(k) = N, |k_j - p_j N| <= 1."""

    N: int
    k: tuple[int, ...]

    def spin_start(self, j: int) -> int:
        """First spin position (0-based) of 1-based block j."""
        return sum(self.k[: j - 1])


def block_partition(spec: ModelSpec, N: int) -> BlockPartition:
    """Largest-remainder apportionment of N spins among the proportions.

    Deterministic: remainders are assigned in order of decreasing fractional
    part, ties broken by lowest block index; zero-size blocks then borrow a
    spin from the most over-represented donor so every block is nonempty.
    """
    if N < spec.n:
        raise SpecValidationError(
            f"N={N} is too small: every one of the {spec.n} blocks needs a spin"
        )
    quotas = [pj * N for pj in spec.p]
    k = [int(math.floor(q)) for q in quotas]
    order = sorted(range(spec.n), key=lambda j: (-(quotas[j] - k[j]), j))
    for j in order[: N - sum(k)]:
        k[j] += 1
    while any(kj == 0 for kj in k):
        receiver = min(j for j in range(spec.n) if k[j] == 0)
        donors = [j for j in range(spec.n) if k[j] >= 2]
        donor = max(donors, key=lambda j: (k[j] - quotas[j], -j))
        k[donor] -= 1
        k[receiver] += 1
    part = BlockPartition(N=N, k=tuple(k))
    if sum(part.k) != N or any(abs(kj - q) > 1.0 + 1e-9 for kj, q in zip(part.k, quotas)):
        raise SpecValidationError(f"no valid block split of N={N} for p={spec.p}")
    return part


def index_size(partition: BlockPartition, blocks: tuple[int, ...]) -> int:
    """Total number of spins covered by an index: k(s, N)."""
    return sum(partition.k[i - 1] for i in blocks)


# ---------------------------------------------------------------------------
# Realizations


@dataclass(frozen=True, eq=False)
class Realization:
    """Sampled disorder for one N: one read-only table per index.

    Table ``s`` has exactly ``b ** k(s, N)`` entries; entry ``key`` is the
    value shared by all configurations whose projection onto the index's
    blocks equals ``key`` (see :func:`projection_key`).
    """

    spec: ModelSpec
    N: int
    seed: int
    partition: BlockPartition
    tables: tuple[np.ndarray, ...]


def sample_disorder(spec: ModelSpec, N: int, seed: int) -> Realization:
    """Draw one independent realization of all disorder variables.

    Each index gets its own counter-based stream keyed by
    ``index_stream_key(seed, blocks)``; entry ``key`` of a table is the
    ``key``-th draw of that stream.  Same (seed, blocks) always reproduces the
    same table, so specs sharing an index tuple share its disorder exactly.
    """
    part = block_partition(spec, N)
    tables = []
    for idx in spec.indices:
        count = spec.b ** index_size(part, idx.blocks)
        rng = np.random.Generator(np.random.Philox(key=index_stream_key(seed, idx.blocks)))
        t = np.ascontiguousarray(idx.family.sampler(N, count, rng), dtype=np.float64)
        if t.shape != (count,):
            raise SpecValidationError(
                f"sampler for index {idx.blocks} returned shape {t.shape}, expected ({count},)"
            )
        t.flags.writeable = False
        tables.append(t)
    return Realization(spec=spec, N=N, seed=int(seed), partition=part, tables=tuple(tables))


# ---------------------------------------------------------------------------
# Configurations and energies


@dataclass(frozen=True)
class Configuration:
    """One configuration as base-b digits, block-major, most significant first.

    For b = 2, digit 0 is spin +1 and digit 1 is spin -1.
    """

    digits: tuple[int, ...]


def config_from_int(code: int, N: int, b: int = 2) -> Configuration:
    digits = []
    for t in range(N):
        digits.append((code // b ** (N - 1 - t)) % b)
    return Configuration(tuple(digits))


def config_to_int(config: Configuration, b: int = 2) -> int:
    code = 0
    for d in config.digits:
        code = code * b + d
    return code


def config_from_spins(spins: Sequence[int]) -> Configuration:
    if any(s not in (1, -1) for s in spins):
        raise SpecValidationError("spins must be +1 or -1")
    return Configuration(tuple(0 if s == 1 else 1 for s in spins))


def block_values(partition: BlockPartition, config: Configuration, b: int = 2) -> tuple[int, ...]:
    """Per-block integer values of a configuration's digit groups."""
    if len(config.digits) != partition.N:
        raise SpecValidationError("configuration length does not match partition")
    vals = []
    pos = 0
    for kj in partition.k:
        v = 0
        for d in config.digits[pos : pos + kj]:
            v = v * b + d
        vals.append(v)
        pos += kj
    return tuple(vals)


def projection_key(
    partition: BlockPartition, blocks: tuple[int, ...], values: Sequence[int], b: int = 2
) -> int:
    """Table key of the projection onto ``blocks``: their values concatenated
    in the index's own block order."""
    key = 0
    for i in blocks:
        key = key * b ** partition.k[i - 1] + values[i - 1]
    return key


def block_spin_sums(partition: BlockPartition, config: Configuration) -> tuple[int, ...]:
    """Per-block sums of +-1 spins (b = 2 only)."""
    if any(d > 1 for d in config.digits):
        raise SpecValidationError("spin sums are only defined for b = 2")
    sums = []
    pos = 0
    for kj in partition.k:
        ones = sum(config.digits[pos : pos + kj])
        sums.append(kj - 2 * ones)
        pos += kj
    return tuple(sums)


def hamiltonian(spec: ModelSpec, realization: Realization, config: Configuration) -> float:
    """Exact energy of one configuration under one realization."""
    if realization.spec is not spec:
        raise SpecValidationError("realization was sampled for a different spec")
    if len(config.digits) != realization.N:
        raise SpecValidationError("configuration size does not match realization")
    if any(not 0 <= d < spec.b for d in config.digits):
        raise SpecValidationError("configuration digits out of range for base b")
    vals = block_values(realization.partition, config, spec.b)
    total = 0.0
    for idx, table in zip(spec.indices, realization.tables):
        key = projection_key(realization.partition, idx.blocks, vals, spec.b)
        total += idx.weight * float(table[key])
    energy = realization.N * total
    if spec.h != 0.0:
        energy += spec.h * sum(block_spin_sums(realization.partition, config))
    return energy


# ---------------------------------------------------------------------------
# Structure reductions


def reduce_to_chain(spec: ModelSpec) -> Optional[ModelSpec]:
    """Rewrite a subset-indexed spec as an equivalent chain spec, if possible.

    Succeeds when every positively-weighted subset is a prefix {1..j}; the
    result carries the full chain with zero weight on missing prefixes, so its
    energies (and sampled tables for the shared indices) match the input
    exactly.  Returns None when some positive weight sits off the chain,
    which is a normal outcome, not an error.
    """
    if spec.variant != BKM:
        raise SpecValidationError("reduce_to_chain expects a BKM spec")
    by_blocks = {idx.blocks: idx for idx in spec.indices}
    for idx in spec.indices:
        if idx.weight > 0.0 and idx.blocks != tuple(range(1, len(idx.blocks) + 1)):
            return None
    fallback_family = spec.indices[0].family
    weights, families = [], []
    for j in range(1, spec.n + 1):
        prefix = tuple(range(1, j + 1))
        if prefix in by_blocks:
            weights.append(by_blocks[prefix].weight)
            families.append(by_blocks[prefix].family)
        else:
            weights.append(0.0)
            families.append(fallback_family)
    return make_grem(spec.p, weights, families, b=spec.b)


def coordinate_count(spec: ModelSpec) -> int:
    """Dimension of the empirical-measure coordinate space.

    One coordinate per disorder index, plus one normalized spin-sum
    coordinate per block for the ExternalField variant.
    """
    extra = spec.n if spec.variant == EXTERNAL_FIELD else 0
    return len(spec.indices) + extra


def coordinate_labels(spec: ModelSpec) -> list[str]:
    labels = ["x" + "".join(str(i) for i in idx.blocks) for idx in spec.indices]
    if spec.variant == EXTERNAL_FIELD:
        labels += [f"y{i}" for i in range(1, spec.n + 1)]
    return labels
