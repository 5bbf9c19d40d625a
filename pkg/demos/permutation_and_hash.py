"""Walk through the permutation, the sponge and a small Merkle tree on BN254."""

from arion import MerkleTree, arion_hash, hash_bytes, merkle_verify, profile
from arion.core import Direction, arion_permute

params = profile("bn254_n3_d1-5_d2-257")
print(f"n={params.n} r={params.r} d1={params.d1} d2={params.d2} params_id={params.params_id}")

x, key = [1, 2, 3], [4, 5, 6]
y = arion_permute(x, params, key)
print("permute:", [hex(v) for v in y])
print("inverse recovers input:", arion_permute(y, params, key, Direction.INVERSE) == x)

print("hash([1, 2]):    ", hex(arion_hash([1, 2], params)))
print("hash([1, 2, 0]): ", hex(arion_hash([1, 2, 0], params)))
print("hash(b'arion'):  ", hex(hash_bytes(b"arion", params)))

leaves = list(range(10, 18))
tree = MerkleTree(leaves, params)
path = tree.path(5)
print("merkle root:", hex(tree.root))
print("leaf 5 verifies:", merkle_verify(leaves[5], 5, path, tree.root, params))
print("wrong leaf rejected:", not merkle_verify(leaves[5] + 1, 5, path, tree.root, params))
