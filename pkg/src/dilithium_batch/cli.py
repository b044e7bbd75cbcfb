"""dilithium-batch command line.

Key, signature and message files are raw bytes. With ``--out-format hex``
keys and signatures are written as hex text; readers accept either form
(the two have different lengths, so detection is unambiguous).

verify exits 0 on accept, 1 on reject and 2 on malformed or unreadable input.
"""

from __future__ import annotations

import argparse
import binascii
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .batch.engine import batch_sign, batch_verify, multi_stream_sign, write_trace
from .bench import bench, sweep, write_rows
from .codec import DecodeError
from .params import SEEDBYTES, get_params
from .scheme import SignPrecomp, keygen, sign, verify

EXIT_OK, EXIT_REJECT, EXIT_MALFORMED = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input file."""


@dataclass
class CliConfig:
    command: str
    level: int
    phi: int | None = None
    psi: int | None = None
    workers: int = 1
    streams: int = 1
    seed: bytes | None = None
    out_format: str = "binary"
    trace: str | None = None
    paths: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        get_params(self.level)
        if self.psi is not None and self.phi is not None and self.psi > self.phi:
            raise ValueError(f"psi ({self.psi}) must not exceed phi ({self.phi})")
        if self.workers < 1 or self.streams < 1:
            raise ValueError("workers and streams must be positive")


def _read(path: str | Path, size: int | None = None) -> bytes:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if size is None or len(data) == size:
        return data
    text = data.strip()
    if len(text) == 2 * size:
        try:
            return binascii.unhexlify(text)
        except binascii.Error:
            pass
    raise InputError(f"{path}: expected {size} bytes, found {len(data)}")


def _write(path: str | Path, data: bytes, fmt: str) -> None:
    if fmt == "hex":
        Path(path).write_text(data.hex() + "\n")
    else:
        Path(path).write_bytes(data)


def _zeta(cfg: CliConfig) -> bytes | None:
    if cfg.seed is None:
        return None
    print("warning: deterministic key generation from --seed; test use only",
          file=sys.stderr)
    return cfg.seed


def cmd_keygen(cfg: CliConfig) -> int:
    pk, sk = keygen(_zeta(cfg), cfg.level)
    _write(cfg.paths["pk"], pk, cfg.out_format)
    _write(cfg.paths["sk"], sk, cfg.out_format)
    return EXIT_OK


def cmd_sign(cfg: CliConfig) -> int:
    p = get_params(cfg.level)
    sk = _read(cfg.paths["sk"], p.sk_bytes)
    msg = _read(cfg.paths["msg"])
    _write(cfg.paths["out"], sign(sk, msg, p), cfg.out_format)
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    p = get_params(cfg.level)
    pk = _read(cfg.paths["pk"], p.pk_bytes)
    msg = _read(cfg.paths["msg"])
    sig = _read(cfg.paths["sig"], p.sig_bytes)
    return EXIT_OK if verify(pk, msg, sig, p) else EXIT_REJECT


def _sig_path(out_dir: Path, msg_path: str) -> Path:
    return out_dir / (Path(msg_path).name + ".sig")


def cmd_batch_sign(cfg: CliConfig) -> int:
    p = get_params(cfg.level)
    sk = _read(cfg.paths["sk"], p.sk_bytes)
    pre = SignPrecomp.from_secret_key(sk, p)
    msg_paths = cfg.paths["msgs"]
    tasks = [(pre, _read(m)) for m in msg_paths]
    out_dir = Path(cfg.paths["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.streams > 1:
        results = multi_stream_sign(tasks, cfg.streams, cfg.psi, cfg.workers)
    else:
        results = [batch_sign(tasks, cfg.psi, cfg.workers)]
    sigs = [s for r in results for s in r.signatures]
    if cfg.trace:
        with open(cfg.trace, "w", newline="") as fh:
            write_trace([h for r in results for h in r.history], fh)
    status = EXIT_OK
    for path, sig in zip(msg_paths, sigs):
        if sig is None:
            print(f"{path}: signing failed", file=sys.stderr)
            status = EXIT_MALFORMED
            continue
        _write(_sig_path(out_dir, path), sig, cfg.out_format)
    return status


def cmd_batch_verify(cfg: CliConfig) -> int:
    p = get_params(cfg.level)
    pk = _read(cfg.paths["pk"], p.pk_bytes)
    msg_paths, sig_paths = cfg.paths["msgs"], cfg.paths["sigs"]
    if len(msg_paths) != len(sig_paths):
        raise InputError("need one signature file per message file")
    items = []
    for m, s in zip(msg_paths, sig_paths):
        try:
            sig = _read(s, p.sig_bytes)
        except InputError as exc:
            print(exc, file=sys.stderr)
            sig = b""  # rejects in verify
        items.append((pk, _read(m), sig))
    flags = batch_verify(items, p, cfg.workers)
    print("message,signature,accepted")
    for m, s, ok in zip(msg_paths, sig_paths, flags):
        print(f"{m},{s},{int(ok)}")
    return EXIT_OK if all(flags) else EXIT_REJECT


def cmd_bench(cfg: CliConfig) -> int:
    trace_rows = []
    rows = bench(cfg.level, cfg.phi or 1, cfg.psi, cfg.workers, cfg.streams,
                 cfg.paths.get("reps", 3), cfg.paths.get("bench_seed", 0),
                 trace=trace_rows.append if cfg.trace else None)
    write_rows(rows, sys.stdout)
    if cfg.trace:
        with open(cfg.trace, "w", newline="") as fh:
            write_trace(trace_rows, fh)
    return EXIT_OK


def cmd_sweep(cfg: CliConfig) -> int:
    rows = sweep(cfg.level, cfg.paths["phis"], cfg.paths.get("psis"), cfg.workers,
                 cfg.paths.get("stream_list") or [cfg.streams], cfg.paths.get("reps", 3),
                 cfg.paths.get("bench_seed", 0), cfg.paths.get("check", False))
    write_rows(rows, sys.stdout)
    return EXIT_OK if all(r.equivalent != "no" for r in rows) else EXIT_REJECT


COMMANDS = {
    "keygen": cmd_keygen,
    "sign": cmd_sign,
    "verify": cmd_verify,
    "batch-sign": cmd_batch_sign,
    "batch-verify": cmd_batch_verify,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
}


def _int_list(text: str) -> list[int]:
    """'1,2,8' or 'start:stop:step' (stop inclusive)."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",") if x]


def _seed(text: str) -> bytes:
    try:
        seed = bytes.fromhex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("seed must be hex") from exc
    if len(seed) != SEEDBYTES:
        raise argparse.ArgumentTypeError(f"seed must be {SEEDBYTES} bytes ({2 * SEEDBYTES} hex digits)")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", type=int, choices=(2, 3, 5), required=True)
    common.add_argument("--out-format", choices=("binary", "hex"), default="binary")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--psi", type=int)
    common.add_argument("--streams", type=int, default=1)
    common.add_argument("--trace", help="write the per-round scheduler CSV here")

    parser = argparse.ArgumentParser(prog="dilithium-batch",
                                     description="Dilithium signatures and batch signing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common])
    p.add_argument("--pk", required=True)
    p.add_argument("--sk", required=True)
    p.add_argument("--seed", type=_seed, help="hex zeta; deterministic test mode")

    p = sub.add_parser("sign", parents=[common])
    p.add_argument("--sk", required=True)
    p.add_argument("--msg", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--pk", required=True)
    p.add_argument("--msg", required=True)
    p.add_argument("--sig", required=True)

    p = sub.add_parser("batch-sign", parents=[common])
    p.add_argument("--sk", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("msgs", nargs="+")

    p = sub.add_parser("batch-verify", parents=[common])
    p.add_argument("--pk", required=True)
    p.add_argument("--msgs", nargs="+", required=True)
    p.add_argument("--sigs", nargs="+", required=True)

    p = sub.add_parser("bench", parents=[common])
    p.add_argument("--phi", type=int, default=1)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0, help="workload seed")

    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--phi", type=_int_list, required=True, help="batch sizes, e.g. 64,256 or 64:1024:64")
    p.add_argument("--psi-range", type=_int_list, help="psi values; default min(phi, 4 * workers)")
    p.add_argument("--stream-range", type=_int_list)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0, help="workload seed")
    p.add_argument("--check", action="store_true", help="compare against sequential signing")
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    paths: dict[str, object] = {}
    for name in ("pk", "sk", "msg", "sig", "out", "out_dir", "msgs", "sigs"):
        if getattr(args, name, None) is not None:
            paths[name] = getattr(args, name)
    phi = None
    if args.command == "bench":
        phi = args.phi
        paths.update(reps=args.reps, bench_seed=args.seed)
    elif args.command == "sweep":
        paths.update(phis=args.phi, psis=args.psi_range, stream_list=args.stream_range,
                     reps=args.reps, bench_seed=args.seed, check=args.check)
    elif args.command == "batch-sign":
        phi = len(args.msgs)
    seed = args.seed if args.command == "keygen" else None
    return CliConfig(args.command, args.level, phi, args.psi, args.workers, args.streams,
                     seed, args.out_format, args.trace, paths)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return COMMANDS[cfg.command](cfg)
    except (InputError, DecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
