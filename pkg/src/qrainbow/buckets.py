import logging
from dataclasses import dataclass, field
from os import PathLike
from os.path import exists
from typing import TYPE_CHECKING

import numpy as np

from .errors import IndexRangeError, TableMismatchError

if TYPE_CHECKING:
    from .rainbow import RainbowTable

logger = logging.getLogger(__name__)

BUCKET_MAGIC = "BKT1"


@dataclass
class BucketMap:
    """
    Bucket index over k-bit endpoint hashes.

    Parameters
    ----------
    k : int
        Bucket modulus; offsets lie in {0..k-1}.
    kappa : int
        Bit width of the endpoint hashes; keys lie in {0..ceil(2^kappa / k) - 1}.
    buckets : dict[int, list[int]]
        Bucket key to its distinct offsets, in insertion order.
    provenance : dict[tuple[int, int], list[int]]
        (bucket key, offset) to every table row stored under it.
    """
    k: int
    kappa: int
    buckets: dict[int, list[int]] = field(default_factory=dict)
    provenance: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    @property
    def key_bound(self) -> int:
        return -(-(1 << self.kappa) // self.k)


def insert_end(bmap: BucketMap, end_hashed: int, row: int) -> BucketMap:
    """
    Store one endpoint: bucket key = end_hashed // k, offset = end_hashed mod k.

    Offsets are kept once per bucket, provenance keeps every row.
    """
    if not 0 <= end_hashed < 1 << bmap.kappa:
        raise IndexRangeError(f"end_hashed {end_hashed} outside the {bmap.kappa}-bit range")
    bucket_key, offset = divmod(end_hashed, bmap.k)
    if bucket_key not in bmap.buckets:
        bmap.buckets[bucket_key] = []
    rows = bmap.provenance.setdefault((bucket_key, offset), [])
    if not rows:
        bmap.buckets[bucket_key].append(offset)
    rows.append(row)
    return bmap


def build(table: "RainbowTable") -> BucketMap:
    bmap = BucketMap(table.params.k, table.params.kappa)
    for idx, row in enumerate(table.rows):
        insert_end(bmap, row.end_hashed, idx)
    logger.info("built %d buckets over %d endpoints", len(bmap.buckets), len(table.rows))
    return bmap


def query_bucket(bmap: BucketMap, bucket_key: int) -> np.ndarray | None:
    """
    Membership vector of a bucket, or None when the key is absent.

    Slot j of the k-slot boolean vector is set iff offset j is stored in the bucket.
    """
    offsets = bmap.buckets.get(bucket_key)
    if offsets is None:
        return None
    membership = np.zeros(bmap.k, dtype=bool)
    membership[offsets] = True
    return membership


def save(bmap: BucketMap, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{BUCKET_MAGIC} {bmap.k} {bmap.kappa}\n")
        for bucket_key in sorted(bmap.buckets):
            f.write(f"{bucket_key}:{','.join(str(o) for o in bmap.buckets[bucket_key])}\n")


def load(path: str | PathLike) -> BucketMap:
    """Read a BKT1 sidecar. Provenance is not stored and comes back empty."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 3 or header[0] != BUCKET_MAGIC:
        raise TableMismatchError(f"{path} does not start with a {BUCKET_MAGIC} header")
    try:
        bmap = BucketMap(int(header[1]), int(header[2]))
        for line in lines[1:]:
            key, offsets = line.split(":")
            bmap.buckets[int(key)] = [int(o) for o in offsets.split(",")]
    except ValueError as e:
        raise TableMismatchError(f"malformed bucket file {path}") from e
    return bmap


def _agrees(cached: BucketMap, bmap: BucketMap) -> bool:
    return ((cached.k, cached.kappa) == (bmap.k, bmap.kappa)
            and {key: sorted(o) for key, o in cached.buckets.items()}
            == {key: sorted(o) for key, o in bmap.buckets.items()})


def load_or_build(table: "RainbowTable", path: str | PathLike) -> BucketMap:
    """
    Return the bucket map of `table`, keeping the sidecar at `path` in step with it.

    The map is always built from the table, since provenance is not stored on disk.
    A missing, malformed or stale sidecar (other k, kappa or offsets) is rewritten.
    """
    bmap = build(table)
    if exists(path):
        try:
            if _agrees(load(path), bmap):
                logger.info("bucket sidecar at %s matches the table", path)
                return bmap
        except TableMismatchError as e:
            logger.warning("unreadable bucket sidecar: %s", e)
        logger.warning("bucket sidecar at %s is stale, rewriting it", path)
    save(bmap, path)
    logger.info("bucket sidecar saved at %s", path)
    return bmap
