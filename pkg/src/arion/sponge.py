"""ArionHash: the unkeyed permutation in sponge mode, plus a Merkle tree on top.

Layout of the state is ``rate | capacity``; digests are read from the front of
the rate part. A message whose length is not a multiple of the rate is padded
with zeros, and in that case the capacity is initialised with
``(len(m), IV')`` instead of the plain IV. The empty message is padded to one
zero block under the same rule, so its capacity starts with 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .core import arion_pi
from .params import ArionParameters, ParameterError, SpongeParameters, default_sponge, derive_vector, validate_sponge

BYTES_ADAPTER_VERSION = 1


class SpongeError(ValueError):
    pass


def pad(m: Sequence[int], rate: int) -> tuple[list[int], int | None]:
    """Return ``(padded, length_for_iv)``; the second item is None when nothing was appended."""
    if rate < 1:
        raise SpongeError("rate must be positive")
    m = list(m)
    extra = -len(m) % rate
    if not m:
        extra = rate
    if extra == 0:
        return m, None
    return m + [0] * extra, len(m)


def _sponge(params: ArionParameters, sponge: SpongeParameters | None) -> SpongeParameters:
    sponge = sponge or default_sponge(params)
    if sponge.width != params.n:
        raise ParameterError(f"sponge width {sponge.width} does not match n = {params.n}")
    return sponge


def initial_state(length: int | None, params: ArionParameters, sponge: SpongeParameters) -> list[int]:
    if length is None:
        cap = list(sponge.initial_value())
    else:
        cap = [length % params.p] + list(sponge.padded_tail())
    return [0] * sponge.rate + cap


def arion_hash(m: Sequence, params: ArionParameters, sponge: SpongeParameters | None = None):
    """Hash a sequence of field elements; one element is returned unless ``output_len > 1``."""
    sponge = _sponge(params, sponge)
    p = params.p
    if len(m) >= p:
        raise SpongeError("message longer than p elements")
    blocks, length = pad([int(v) % p for v in m], sponge.rate)
    state = initial_state(length, params, sponge)
    for off in range(0, len(blocks), sponge.rate):
        for j in range(sponge.rate):
            state[j] = (state[j] + blocks[off + j]) % p
        state = arion_pi(state, params)
    out = []
    while True:
        out.extend(state[:min(sponge.rate, sponge.output_len - len(out))])
        if len(out) >= sponge.output_len:
            break
        state = arion_pi(state, params)
    return out[0] if sponge.output_len == 1 else out


def bytes_to_elements(data: bytes, p: int) -> list[int]:
    """Byte adapter, version 1: ``[len(data)]`` followed by big-endian chunks.

    Chunks are floor(bitlen(p - 1) / 8) bytes, so every chunk is below p.
    The leading length keeps messages that differ only in leading zero bytes apart.
    """
    width = (p - 1).bit_length() // 8
    if width < 1:
        raise SpongeError("prime too small for the byte adapter")
    chunks = [int.from_bytes(data[i:i + width], "big") for i in range(0, len(data), width)]
    return [len(data) % p] + chunks


def hash_bytes(data: bytes, params: ArionParameters, sponge: SpongeParameters | None = None):
    return arion_hash(bytes_to_elements(data, params.p), params, sponge)


# --- Merkle tree ---------------------------------------------------------------

NODE_IV_LABEL = "merkle-node"


def node_sponge(params: ArionParameters, sponge: SpongeParameters | None = None) -> SpongeParameters:
    """Sponge used for internal nodes: same shape, IV drawn under a separate label."""
    sponge = _sponge(params, sponge)
    iv = derive_vector(params.p, params.n, params.r, params.seed, NODE_IV_LABEL, sponge.capacity)
    return SpongeParameters(sponge.rate, sponge.capacity, 1, iv, sponge.iv_prime, sponge.kappa)


def hash_leaf(leaf: int, params: ArionParameters, sponge: SpongeParameters | None = None) -> int:
    return arion_hash([leaf], params, replace(_sponge(params, sponge), output_len=1))


def hash_node(children: Sequence[int], params: ArionParameters, sponge: SpongeParameters | None = None) -> int:
    ns = node_sponge(params, sponge)
    if len(children) != ns.rate:
        raise SpongeError(f"a node has exactly {ns.rate} children")
    return arion_hash(children, params, ns)


@dataclass
class MerkleTree:
    leaves: list[int]
    params: ArionParameters
    sponge: SpongeParameters | None = None
    levels: list[list[int]] = field(init=False)

    def __post_init__(self):
        self.sponge = _sponge(self.params, self.sponge)
        a = self.arity
        count = len(self.leaves)
        if count < 1:
            raise SpongeError("a tree needs at least one leaf")
        while count > 1 and a > 1 and count % a == 0:
            count //= a
        if count != 1:
            raise SpongeError(f"leaf count {len(self.leaves)} is not a power of the arity {a}")
        self.leaves = [int(v) % self.params.p for v in self.leaves]
        level = [hash_leaf(v, self.params, self.sponge) for v in self.leaves]
        self.levels = [level]
        while len(level) > 1:
            level = [hash_node(level[i:i + a], self.params, self.sponge) for i in range(0, len(level), a)]
            self.levels.append(level)

    @property
    def arity(self) -> int:
        return self.sponge.rate

    @property
    def root(self) -> int:
        return self.levels[-1][0]

    def path(self, index: int) -> list[list[int]]:
        """Co-path of leaf ``index``: the ``arity - 1`` siblings at every level, bottom up."""
        if not 0 <= index < len(self.leaves):
            raise IndexError(index)
        out = []
        for level in self.levels[:-1]:
            start = index - index % self.arity
            out.append([v for j, v in enumerate(level[start:start + self.arity]) if start + j != index])
            index //= self.arity
        return out


def merkle_root(leaves: Sequence[int], params: ArionParameters, sponge: SpongeParameters | None = None) -> int:
    return MerkleTree(list(leaves), params, sponge).root


def merkle_path(leaves: Sequence[int], index: int, params: ArionParameters,
                sponge: SpongeParameters | None = None) -> list[list[int]]:
    return MerkleTree(list(leaves), params, sponge).path(index)


def merkle_verify(leaf: int, index: int, path: Sequence[Sequence[int]], root: int, params: ArionParameters,
                  sponge: SpongeParameters | None = None) -> bool:
    sponge = _sponge(params, sponge)
    a = sponge.rate
    if index < 0 or (path and index >= a ** len(path)) or (not path and index != 0):
        return False
    cur = hash_leaf(leaf, params, sponge)
    for siblings in path:
        if len(siblings) != a - 1:
            return False
        group = list(siblings)
        group.insert(index % a, cur)
        cur = hash_node(group, params, sponge)
        index //= a
    return cur == root % params.p


def check_sponge(params: ArionParameters, sponge: SpongeParameters) -> list[str]:
    return validate_sponge(params.p, sponge, params.n)
