"""Arion block cipher, ArionHash sponge, arithmetization and analysis tools."""

from .core import (
    CHAINS, Direction, InternalInvariant, affine_layer, affine_layer_inverse, arion_permute, arion_pi,
    chain_for, chain_pow, circulant, gtds_ccz, gtds_forward, gtds_inverse, permute_batch,
)
from .field import BLS12, BN254, FieldElement, FieldError, PrimeField, inv_mod
from .params import PROFILES, ArionParameters, Mode, ParameterError, SpongeParameters, as_field, profile
from .sponge import MerkleTree, arion_hash, hash_bytes, merkle_root, merkle_verify

__version__ = "0.1.0"

__all__ = [
    "CHAINS", "Direction", "InternalInvariant", "affine_layer", "affine_layer_inverse", "arion_permute",
    "arion_pi", "chain_for", "chain_pow", "circulant", "gtds_ccz", "gtds_forward", "gtds_inverse",
    "permute_batch", "BLS12", "BN254", "FieldElement", "FieldError", "PrimeField", "as_field", "inv_mod",
    "PROFILES", "ArionParameters", "Mode", "ParameterError", "SpongeParameters", "profile", "MerkleTree",
    "arion_hash", "hash_bytes", "merkle_root", "merkle_verify",
]
