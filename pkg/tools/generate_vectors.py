"""Regenerate tests/data/interop_vectors.json from an independent round-3 implementation.

Run once, outside the package environment:

    pip install --target /tmp/oracle dilithium-py==1.5.1
    PYTHONPATH=/tmp/oracle python3 tools/generate_vectors.py

The output is checked in; the tests never import the oracle.
"""

import hashlib
import json
from pathlib import Path

from dilithium_py.dilithium import Dilithium2, Dilithium3, Dilithium5

SCHEMES = {2: Dilithium2, 3: Dilithium3, 5: Dilithium5}
ZETAS = [bytes(32), bytes(range(1, 33)), hashlib.sha256(b"interop zeta").digest()]
MESSAGES = [b"", b"abc", b"\xa3" * 200, hashlib.shake_256(b"interop message").digest(1000)]


def sampler_vectors() -> dict:
    ring = Dilithium2.R
    rho, rho_prime = bytes(32), bytes(range(64))
    return {
        "expand_a": [{"rho": rho.hex(), "i": i, "j": j,
                      "coeffs": ring.rejection_sample_ntt_poly(rho, i, j).coeffs}
                     for i, j in ((0, 0), (1, 2), (7, 6))],
        "expand_s": [{"rho_prime": rho_prime.hex(), "nonce": n, "eta": eta,
                      "coeffs": ring.rejection_bounded_poly(rho_prime, n, eta).coeffs}
                     for n, eta in ((0, 2), (5, 2), (3, 4))],
        "expand_mask": [{"rho_prime": rho_prime.hex(), "nonce": n, "gamma1": g1,
                         "coeffs": ring.sample_mask_polynomial(rho_prime, 0, n, g1).coeffs}
                        for n, g1 in ((0, 1 << 17), (9, 1 << 17), (4, 1 << 19))],
        "sample_in_ball": [{"c_tilde": c.hex(), "tau": tau,
                            "coeffs": ring.sample_in_ball(c, tau).coeffs}
                           for c, tau in ((bytes(32), 39), (bytes(range(32)), 49),
                                          (b"\xff" * 32, 60))],
    }


def main() -> None:
    out = {"oracle": "dilithium-py 1.5.1 (round 3, deterministic)", "levels": {}}
    for level, scheme in SCHEMES.items():
        cases = []
        for zeta in ZETAS:
            scheme.random_bytes = lambda n, z=zeta: z
            pk, sk = scheme.keygen()
            sigs = [scheme.sign(sk, m).hex() for m in MESSAGES]
            cases.append({"zeta": zeta.hex(), "pk": pk.hex(), "sk": sk.hex(),
                          "messages": [m.hex() for m in MESSAGES], "signatures": sigs})
        out["levels"][str(level)] = cases
    out["samplers"] = sampler_vectors()
    path = Path(__file__).resolve().parent.parent / "tests" / "data" / "interop_vectors.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
