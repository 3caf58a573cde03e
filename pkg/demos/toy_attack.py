"""Run the chosen-plaintext attack where it works — toy block lengths —
and watch its cost climb until it stops working.

Run:  python3 demos/toy_attack.py --seed 3
"""
import argparse

import numpy as np

from polarsec.attacks import (
    AttackInfeasibleError,
    attack_cost_curve,
    attack_decrypt,
    build_toy_instance,
    rn_attack,
)
from polarsec.keys import reference_params
from polarsec.rng import derive_rng


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    toy = build_toy_instance(3, 4, seed=args.seed)  # N = 8, K = 4
    oracle = toy.oracle(mode="lfsr")
    result = rn_attack(oracle, rng=derive_rng(args.seed, "verify"))
    print(f"toy instance N = 8, K = 4: verified = {result.verified}, "
          f"{result.queries_used} oracle queries, "
          f"{result.candidates_examined} candidates examined")
    assert result.recovered_gprime == toy.true_matrix
    print("recovered encryption matrix matches the hidden one exactly")

    # decrypt a ciphertext from a later session the attack never saw
    session = toy.context(start_block=23)
    secret = derive_rng(args.seed, "traffic").integers(0, 2, size=4,
                                                       dtype=np.uint8)
    found = attack_decrypt(result.recovered_gprime,
                           result.candidate_error_space,
                           session.encrypt(secret).bits)
    print(f"intercepted block decrypts to {found[0].tolist()} "
          f"(sent {secret.tolist()})")
    print()

    print("measured cost as the syndrome width N - K grows (N = 16):")
    print(f"  {'N-K':>4}  {'queries':>8}  {'examined':>9}  {'seconds':>8}  recovered")
    for pt in attack_cost_curve(gaps=(2, 3, 4, 5, 6, 7, 8)):
        print(f"  {pt.gap:>4}  {pt.queries:>8}  {pt.candidates_examined:>9}"
              f"  {pt.seconds:>8.3f}  {pt.recovered}")
    print("each extra syndrome bit roughly doubles the queries: the attack")
    print("is exponential in N - K, fine at 8, hopeless at 256.")
    print()

    ref = reference_params()
    try:
        rn_attack(build_toy_instance(4, 3, seed=args.seed).oracle())
    except AttackInfeasibleError as exc:
        print(f"already at N - K = 13 the harness refuses: {exc}")
    gap = ref.block_length - ref.num_info
    print(f"at reference parameters N - K = {gap}, K = {ref.num_info}: "
          f"work factor 2^{gap * ref.num_info}")


if __name__ == "__main__":
    main()
