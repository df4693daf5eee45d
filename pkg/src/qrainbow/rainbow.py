import hashlib
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from os import PathLike
from typing import Callable, NamedTuple, Sequence

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from . import buckets as bkt
from .dictgen import SmartDictionary
from .errors import ConfigurationError, TableMismatchError
from .globalvars import HASH_ALGORITHMS, INDEX_BYTES

logger = logging.getLogger(__name__)

TABLE_MAGIC = "RTBL1"

# An engine decides whether `lookup` is occupied in a bucket's membership vector.
Engine = Callable[[np.ndarray, int], bool]


def full_hash(plaintext: str, algorithm: str = "sha1") -> bytes:
    """Digest of the UTF-8 encoded plaintext under the configured full hash."""
    return hashlib.new(algorithm, plaintext.encode("utf-8")).digest()


def digest_size(algorithm: str) -> int:
    return hashlib.new(algorithm).digest_size


def check_digest(H: bytes, algorithm: str) -> None:
    """A target digest must be as long as the configured hash produces."""
    if len(H) != digest_size(algorithm):
        raise TableMismatchError(f"target digest has {len(H)} bytes, {algorithm} digests have {digest_size(algorithm)}")


def hash_to_index(H: bytes, N: int, step: int = 0) -> int:
    """
    Reduce a digest to an index of the plaintext space.

    The first 16 digest bytes are read big-endian and the column number `step`
    is added before reducing modulo N, so every column reduces differently.
    """
    return (int.from_bytes(H[:INDEX_BYTES], "big") + step) % N


def truncate(H: bytes, kappa: int) -> int:
    """Leading `kappa` bits of a digest, big-endian."""
    return int.from_bytes(H, "big") >> (8 * len(H) - kappa)


def k_bit_hash(plaintext: str, kappa: int, algorithm: str = "sha1") -> int:
    """Truncated endpoint hash used for bucketing."""
    return truncate(full_hash(plaintext, algorithm), kappa)


@dataclass(frozen=True)
class TableParams:
    """
    Generation parameters of a smart-dictionary rainbow table.

    Parameters
    ----------
    dictionary : SmartDictionary
    t : int
        Chain length, i.e. number of hash/reduction steps per chain.
    m : int
        Number of chains.
    k : int
        Bucket modulus, a power of two >= 4. Also the quantum search-space size.
    kappa : int
        Bit width of the truncated endpoint hash, 2^kappa = k * number of buckets.
    hash_algorithm : str
        "sha1" or "sha256".
    seed : int
        Seed for start-index sampling.
    """
    dictionary: SmartDictionary
    t: int
    m: int
    k: int = 16
    kappa: int = 12
    hash_algorithm: str = "sha1"
    seed: int = 0

    def __post_init__(self):
        if self.t < 1:
            raise ConfigurationError("chain length t must be >= 1")
        if self.m < 1:
            raise ConfigurationError("chain count m must be >= 1")
        if self.hash_algorithm not in HASH_ALGORITHMS:
            raise ConfigurationError(f"unsupported hash algorithm {self.hash_algorithm!r}")
        if self.k < 4 or self.k & (self.k - 1):
            raise ConfigurationError(f"bucket modulus k = {self.k} must be a power of two >= 4")
        if self.k > self.space_size:
            raise ConfigurationError(f"bucket modulus k = {self.k} exceeds the plaintext space N = {self.space_size}")
        if not self.k.bit_length() - 1 <= self.kappa <= 8 * digest_size(self.hash_algorithm):
            raise ConfigurationError(f"kappa = {self.kappa} must lie between log2(k) and the digest width")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit value")

    @property
    def space_size(self) -> int:
        return self.dictionary.size

    @property
    def bucket_count(self) -> int:
        return (1 << self.kappa) // self.k

    def reduce(self, H: bytes, step: int) -> str:
        return self.dictionary.plain(hash_to_index(H, self.space_size, step))

    def hash(self, plaintext: str) -> bytes:
        return full_hash(plaintext, self.hash_algorithm)

    def k_bit_hash(self, plaintext: str) -> int:
        return k_bit_hash(plaintext, self.kappa, self.hash_algorithm)


class ChainRow(NamedTuple):
    start_index: int
    end_plaintext: str
    end_hashed: int


@dataclass
class RainbowTable:
    params: TableParams
    rows: list[ChainRow]
    hash_evals: int = 0

    @property
    def collisions(self) -> set[int]:
        """Indices of rows whose end_hashed is shared with another row."""
        counts = Counter(row.end_hashed for row in self.rows)
        return {idx for idx, row in enumerate(self.rows) if counts[row.end_hashed] > 1}


@dataclass
class SearchOutcome:
    """
    Result of a lookup together with its cost counters.

    `replay_hashes` counts the intermediate hashes of the reduction replay,
    `final_hashes` the endpoint k-bit hashes (one per assumed chain position) and
    `rebuild_hashes` the hashes spent regenerating chains after endpoint matches.
    """
    result: str | None = None
    replay_hashes: int = 0
    final_hashes: int = 0
    rebuild_hashes: int = 0
    oracle_calls: int = 0
    chains_examined: int = 0
    false_alarms: int = 0

    @property
    def found(self) -> bool:
        return self.result is not None

    @property
    def hash_evals(self) -> int:
        return self.replay_hashes + self.final_hashes + self.rebuild_hashes


def generate_chain(start: int, params: TableParams) -> tuple[str, int, int]:
    """
    Build one chain from a start index.

    Each of the t iterations decodes the current index, hashes the plaintext and
    reduces the digest with the iteration number as column salt. The endpoint is
    the plaintext of the last reduced index.

    Returns
    -------
    end_plaintext : str
    end_hashed : int
        k-bit hash of the endpoint.
    hash_evals : int
        Always t.
    """
    dictionary = params.dictionary
    S = start
    for step in range(1, params.t + 1):
        H = params.hash(dictionary.plain(S))
        S = hash_to_index(H, dictionary.size, step)
    end = dictionary.plain(S)
    return end, params.k_bit_hash(end), params.t


def walk_chain(start: int, column: int, params: TableParams) -> tuple[str, int]:
    """Plaintext at `column` of the chain starting at `start`, and the hashes spent."""
    P = params.dictionary.plain(start)
    for step in range(1, column + 1):
        P = params.reduce(params.hash(P), step)
    return P, column


def chain_columns(start: int, params: TableParams) -> list[str]:
    """The t hashed plaintexts T_0 .. T_{t-1} of a chain."""
    columns = [params.dictionary.plain(start)]
    for step in range(1, params.t):
        columns.append(params.reduce(params.hash(columns[-1]), step))
    return columns


def sample_starts(N: int, m: int, seed: int) -> list[int]:
    """Draw m distinct start indices uniformly from {0..N-1}."""
    if m > N:
        raise ConfigurationError(f"cannot sample {m} distinct starts from a space of {N}")
    rng = np.random.default_rng(seed)
    if 2 * m >= N:
        return [int(s) for s in rng.permutation(N)[:m]]

    starts: dict[int, None] = {}
    while len(starts) < m:
        for s in rng.integers(0, N, size=m - len(starts), dtype=np.uint64):
            starts.setdefault(int(s))
    return list(starts)[:m]


def generate_table(params: TableParams, n_jobs: int = 1, verbose: bool = False) -> RainbowTable:
    """
    Generate m chains from seeded, distinct start indices.

    Chains are independent, so they are distributed over `n_jobs` worker threads.
    Rows are sorted by end_hashed (ties by start index); rows sharing an end_hashed
    are kept and reported by `RainbowTable.collisions`.
    """
    starts = sample_starts(params.space_size, params.m, params.seed)
    chains = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(generate_chain)(start, params)
        for start in tqdm(starts, desc="Generating chains", disable=not verbose)
    )

    rows = sorted((ChainRow(start, end, end_hashed) for start, (end, end_hashed, _) in zip(starts, chains)),
                  key=lambda row: (row.end_hashed, row.start_index))
    table = RainbowTable(params, rows, hash_evals=sum(c[2] for c in chains))

    n_collisions = len(table.collisions)
    if n_collisions:
        logger.warning("%d of %d rows share their end_hashed with another row", n_collisions, params.m)
    logger.info("generated %d chains of length %d, %d hash evaluations", params.m, params.t, table.hash_evals)
    return table


def verify_rows(table: RainbowTable) -> list[int]:
    """Indices of rows that do not replay to their stored endpoint."""
    bad = []
    for idx, row in enumerate(table.rows):
        end, end_hashed, _ = generate_chain(row.start_index, table.params)
        if (end, end_hashed) != (row.end_plaintext, row.end_hashed):
            bad.append(idx)
    return bad


def coverage(table: RainbowTable) -> float:
    """Fraction of the plaintext space hashed in some chain column of the table."""
    seen = set()
    for row in table.rows:
        seen.update(chain_columns(row.start_index, table.params))
    return len(seen) / table.params.space_size


def classical_search_bucket(membership: np.ndarray, lookup: int) -> bool:
    return bool(membership[lookup])


def get_engine(name: str) -> Engine:
    if name == "classical":
        return classical_search_bucket
    if name == "dega":
        from .grover import search_bucket
        return search_bucket
    raise ConfigurationError(f"unknown search engine {name!r}")


def search(H_target: bytes,
           table: RainbowTable,
           buckets: bkt.BucketMap,
           engine: Engine = classical_search_bucket) -> SearchOutcome:
    """
    Recover a plaintext whose full hash equals `H_target`.

    For every assumed chain position i = 1..t the target is reduced i times (hashing
    between reductions) to a candidate endpoint P. Its k-bit hash gives the bucket key
    and lookup offset; absent buckets are skipped classically, otherwise `engine`
    searches the bucket. On a hit every row stored under (bucket_key, offset) whose
    endpoint equals P is rebuilt from its start up to the assumed column and the
    plaintext there is returned if it hashes to the target.

    Parameters
    ----------
    H_target : bytes
    table : RainbowTable
    buckets : BucketMap
        Built from `table`.
    engine : callable
        `engine(membership, lookup) -> bool`, e.g. `grover.search_bucket`.

    Returns
    -------
    SearchOutcome

    Raises
    ------
    TableMismatchError
        If `H_target` is not a digest of the table's hash algorithm.
    """
    params = table.params
    check_digest(H_target, params.hash_algorithm)
    t, k = params.t, params.k
    outcome = SearchOutcome()

    for i in range(1, t + 1):
        column = t - i  # Assumed column of the target's plaintext
        h = H_target
        for j in range(i):
            P = params.reduce(h, column + 1 + j)
            if j < i - 1:
                h = params.hash(P)
                outcome.replay_hashes += 1
        h_k = params.k_bit_hash(P)
        outcome.final_hashes += 1

        bucket_key, lookup = divmod(h_k, k)
        membership = bkt.query_bucket(buckets, bucket_key)
        if membership is None:
            continue
        outcome.oracle_calls += 1
        if not engine(membership, lookup):
            continue

        for row_idx in buckets.provenance.get((bucket_key, lookup), []):
            row = table.rows[row_idx]
            if P != row.end_plaintext:
                outcome.false_alarms += 1
                continue
            outcome.chains_examined += 1
            candidate, spent = walk_chain(row.start_index, column, params)
            outcome.rebuild_hashes += spent + 1
            if params.hash(candidate) == H_target:
                outcome.result = candidate
                return outcome
            outcome.false_alarms += 1

    return outcome


def reduce_into(H: bytes, step: int, space: Sequence[str]) -> str:
    """Reduction R_step over an explicit plaintext list."""
    return space[hash_to_index(H, len(space), step)]


@dataclass
class OrdinaryTable:
    """Baseline rainbow table over a fixed plaintext list."""
    pairs: list[tuple[str, str]]
    t: int
    space: Sequence[str]
    hash_algorithm: str = "sha1"
    hash_evals: int = 0
    endpoints: dict[str, list[str]] = field(init=False, repr=False)

    def __post_init__(self):
        self.endpoints = defaultdict(list)
        for start, end in self.pairs:
            self.endpoints[end].append(start)

    def reduce(self, H: bytes, step: int) -> str:
        return reduce_into(H, step, self.space)


def generate_ordinary_table(starts: Sequence[str], t: int,
                            space: Sequence[str] | None = None,
                            hash_algorithm: str = "sha1") -> OrdinaryTable:
    """
    Ordinary rainbow chains: t rounds of hash then reduction R_i, i = 1..t.

    Parameters
    ----------
    starts : sequence of str
        Start plaintexts, one chain each.
    t : int
        Chain length; t = 0 stores (start, start).
    space : sequence of str | None
        Plaintext list the reductions map into. Defaults to `starts`.
    hash_algorithm : str
    """
    if not starts:
        raise ConfigurationError("ordinary table needs at least one start")
    space = list(starts) if space is None else list(space)
    pairs = []
    for start in starts:
        S = start
        for i in range(1, t + 1):
            S = reduce_into(full_hash(S, hash_algorithm), i, space)
        pairs.append((start, S))
    return OrdinaryTable(pairs, t, space, hash_algorithm, hash_evals=len(starts) * t)


def search_ordinary(H_target: bytes, table: OrdinaryTable) -> SearchOutcome:
    """Classical lookup against an ordinary table's endpoint dictionary."""
    t, algorithm = table.t, table.hash_algorithm
    check_digest(H_target, algorithm)
    outcome = SearchOutcome()

    for i in range(1, t + 1):
        column = t - i
        h = H_target
        for j in range(i):
            P = table.reduce(h, column + 1 + j)
            if j < i - 1:
                h = full_hash(P, algorithm)
                outcome.replay_hashes += 1

        for start in table.endpoints.get(P, []):
            outcome.chains_examined += 1
            candidate = start
            for step in range(1, column + 1):
                candidate = table.reduce(full_hash(candidate, algorithm), step)
            outcome.rebuild_hashes += column + 1
            if full_hash(candidate, algorithm) == H_target:
                outcome.result = candidate
                return outcome
            outcome.false_alarms += 1

    return outcome


def save_table(table: RainbowTable, path: str | PathLike) -> None:
    """Write the RTBL1 text format: a header line, then one `start,hex,end_hashed` record per row."""
    p = table.params
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{TABLE_MAGIC} {p.hash_algorithm} {p.t} {p.m} {p.k} {p.kappa} {p.seed} {p.space_size}\n")
        for row in table.rows:
            f.write(f"{row.start_index},{row.end_plaintext.encode('utf-8').hex()},{row.end_hashed}\n")


def load_table(path: str | PathLike, dictionary: SmartDictionary) -> RainbowTable:
    """
    Read an RTBL1 table generated over `dictionary`.

    Raises
    ------
    TableMismatchError
        If the file is malformed, its N differs from the dictionary's, or a stored
        end_hashed does not match its end plaintext.
    """
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise TableMismatchError(f"{path} is empty")

    header = lines[0].split()
    if len(header) != 8 or header[0] != TABLE_MAGIC:
        raise TableMismatchError(f"{path} does not start with an {TABLE_MAGIC} header")
    try:
        t, m, k, kappa, seed, N = (int(x) for x in header[2:])
    except ValueError as e:
        raise TableMismatchError(f"malformed header in {path}") from e
    if N != dictionary.size:
        raise TableMismatchError(f"table was built over N = {N}, dictionary has N = {dictionary.size}")

    try:
        params = TableParams(dictionary, t, m, k, kappa, header[1], seed)
    except ConfigurationError as e:
        raise TableMismatchError(f"invalid table parameters: {e}") from e

    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            start, end_hex, end_hashed = line.split(",")
            row = ChainRow(int(start), bytes.fromhex(end_hex).decode("utf-8"), int(end_hashed))
        except ValueError as e:
            raise TableMismatchError(f"{path}, line {line_no}: malformed record") from e
        if row.end_hashed != params.k_bit_hash(row.end_plaintext):
            raise TableMismatchError(f"{path}, line {line_no}: end_hashed does not match end plaintext")
        rows.append(row)
    if len(rows) != m:
        raise TableMismatchError(f"{path} declares {m} chains but holds {len(rows)}")

    return RainbowTable(params, rows)
