"""Dilithium (round 3) signatures with a speculative-nonce batch signer."""

from .params import PARAMS, Params, get_params
from .scheme import SignPrecomp, keygen, sign, sign_attempt, sign_loop, verify

__version__ = "0.1.0"

__all__ = ["PARAMS", "Params", "SignPrecomp", "get_params", "keygen", "sign",
           "sign_attempt", "sign_loop", "verify", "__version__"]
