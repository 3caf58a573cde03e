"""Tally the keyspace and attack-cost exponents that make brute force
pointless, and the per-block work that keeps legitimate use cheap.

Run:  python3 demos/security_margins.py
"""
import argparse

from polarsec.analysis import (
    complexity_report,
    reproduce_tables,
    security_report,
)
from polarsec.keys import reference_params


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.parse_args()

    params = reference_params()
    sec = security_report(params)
    print(f"reference parameters: N = {params.block_length}, "
          f"K = {params.num_info}, pool = {params.pool}")
    print()
    print("what an attacker must enumerate (log2 counts):")
    print(f"  information sets within the pool  {sec.log2_n_c:10.2f}")
    print(f"  syndrome-register states          {sec.log2_n_e:10.2f}")
    print(f"  scramblers (lower bound)          {sec.log2_n_s_lower:10.1f}")
    print(f"  permutations                      {sec.log2_n_p:10.2f}")
    print()
    print("chosen-plaintext matrix recovery:")
    print(f"  error-space work factor           {sec.log2_wf_rn:10.1f}")
    print(f"  ciphertexts for a set-covering    {sec.log2_st_ciphertexts:10.2f}")
    print(f"  operations for a set-covering     {sec.log2_st_operations:10.2f}")
    print()
    comp = complexity_report(params)
    print("meanwhile one legitimate block costs (GF(2) bit ops):")
    print(f"  message x encryption matrix       {comp.mul_message_gprime:>10}")
    print(f"  apply/undo the permutation        {comp.mul_perturb_perm + comp.mul_receive_perm:>10}")
    print(f"  successive-cancellation decode    {comp.sc_decode:>10}")
    print(f"  undo the scrambler                {comp.mul_unscramble:>10}")
    print()
    print("caveats carried in every report:")
    for note in reproduce_tables().notes:
        print(f"  - {note}")


if __name__ == "__main__":
    main()
