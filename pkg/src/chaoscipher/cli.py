"""Command-line interface: ``chaoscipher <command> ...``.

Exit codes: 0 success, 1 statistical test failure, 2 usage or malformed
input, 3 I/O error, 4 authentication failure.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources

from chaoscipher import aead, ent, julia, nist
from chaoscipher.keystream import PROFILES, WARM_UP, ExtractionMode, ParameterDisc, keystream
from chaoscipher.primitives import secure_bytes

EXIT_OK = 0
EXIT_TEST_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_AUTH = 4

PROFILE_ENV = "CHAOSCIPHER_PROFILE"
KEY_SIZE = 32
KEY_HELP = "key as hex, or @FILE holding the hex (keygen output)"


def load_schema(name: str) -> dict:
    """One of the shipped JSON schemas: nist_report, ent_report, stability, julia_grid."""
    return json.loads(resources.files("chaoscipher").joinpath("schemas", f"{name}.json").read_text())


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    disc: ParameterDisc
    warm_up: int = WARM_UP
    extraction: ExtractionMode = ExtractionMode()

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        profile = args.profile or os.environ.get(PROFILE_ENV) or "chaotic"
        if profile not in PROFILES:
            raise UsageError(f"unknown profile {profile!r}")
        if args.delta is not None and profile != "custom":
            raise UsageError("--delta requires --profile custom")
        if args.warm_up < 0:
            raise UsageError("--warm-up must be non-negative")
        try:
            disc = ParameterDisc.from_profile(profile, args.delta)
            mode = ExtractionMode.parse(args.extraction)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return cls(disc, args.warm_up, mode)


def parse_hex(text, name, size=None) -> bytes:
    try:
        value = bytes.fromhex(text)
    except (TypeError, ValueError):
        raise UsageError(f"{name}: not valid hex") from None
    if size is not None and len(value) != size:
        raise UsageError(f"{name}: expected {size} bytes ({2 * size} hex chars), got {len(value)}")
    return value


def parse_key(text) -> bytes:
    """Hex key, or ``@path`` naming a file that holds one (as written by keygen)."""
    if text.startswith("@"):
        text = read_file(text[1:]).decode("ascii", "replace").strip()
    key = parse_hex(text, "--key")
    if not key:
        raise UsageError("--key must not be empty")
    return key


def parse_resolution(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--res: expected WxH, got {text!r}") from None
    if w < 2 or h < 2:
        raise UsageError("--res must be at least 2x2")
    return w, h


def parse_window(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--window: expected x0,y0,x1,y1, got {text!r}") from None
    if len(vals) != 4 or not (vals[2] > vals[0] and vals[3] > vals[1]):
        raise UsageError("--window must be x0,y0,x1,y1 with x1>x0 and y1>y0")
    return vals


def read_file(path) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def write_file(path, data: bytes, mode=0o666):
    """Write ``data`` to ``path`` (``-`` is stdout); a failed write leaves no file."""
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, mode)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
    except OSError:
        try:
            os.unlink(path)
        except OSError:
            pass
        raise


def bound_ad(ad: bytes, cfg: CliConfig) -> bytes:
    """Associated data with the cipher parameters appended.

    ``ad || text || len(text) (2 bytes BE)`` is injective in (ad, params), so
    decrypting with different parameters fails authentication instead of
    silently producing garbage.
    """
    text = f"chaoscipher;delta={cfg.disc.delta!r};mode={cfg.extraction};warm={cfg.warm_up}".encode()
    return ad + text + len(text).to_bytes(2, "big")


def cipher_keystream(key, iv, ad, n, cfg: CliConfig) -> bytes:
    """The bytes ``encrypt`` XORs onto a plaintext under (key, iv, ad) and ``cfg``."""
    ad = bound_ad(ad, cfg)
    km = aead.KeyMaterial.derive(key, iv, ad)
    return keystream(km.stream_key, iv, ad, n, cfg.disc, cfg.extraction, cfg.warm_up)


def cmd_keygen(args):
    key = secure_bytes(KEY_SIZE).hex() + "\n"
    if args.out:
        write_file(args.out, key.encode(), mode=0o600)
        try:
            os.chmod(args.out, 0o600)
        except OSError:
            pass
    else:
        sys.stdout.write(key)
    return EXIT_OK


def cmd_encrypt(args):
    cfg = CliConfig.from_args(args)
    key = parse_key(args.key)
    ad = parse_hex(args.ad, "--ad")
    iv = parse_hex(args.iv, "--iv", aead.IV_SIZE) if args.iv else None
    data = read_file(args.inp)
    sealed = aead.encrypt(data, key, bound_ad(ad, cfg), iv, cfg.disc, cfg.extraction, cfg.warm_up)
    write_file(args.out, sealed)
    return EXIT_OK


def cmd_decrypt(args):
    cfg = CliConfig.from_args(args)
    key = parse_key(args.key)
    ad = parse_hex(args.ad, "--ad")
    sealed = read_file(args.inp)
    plaintext = aead.decrypt(sealed, key, bound_ad(ad, cfg), cfg.disc, cfg.extraction, cfg.warm_up)
    write_file(args.out, plaintext)
    return EXIT_OK


def cmd_keystream(args):
    cfg = CliConfig.from_args(args)
    key = parse_key(args.key)
    iv = parse_hex(args.iv, "--iv", aead.IV_SIZE)
    ad = parse_hex(args.ad, "--ad")
    if args.len < 0:
        raise UsageError("--len must be non-negative")
    write_file(args.out, cipher_keystream(key, iv, ad, args.len, cfg))
    return EXIT_OK


def _test_input(args, default_len) -> bytes:
    if args.from_keystream:
        if args.inp:
            raise UsageError("use either --in or --from-keystream, not both")
        if not args.key or not args.iv:
            raise UsageError("--from-keystream needs --key and --iv")
        cfg = CliConfig.from_args(args)
        n = args.len if args.len is not None else default_len
        if n < 1:
            raise UsageError("--len must be positive")
        return cipher_keystream(parse_key(args.key), parse_hex(args.iv, "--iv", aead.IV_SIZE),
                                parse_hex(args.ad, "--ad"), n, cfg)
    if not args.inp:
        raise UsageError("need --in PATH or --from-keystream")
    data = read_file(args.inp)
    if not data:
        raise UsageError("input is empty")
    return data


def cmd_test(args):
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must be in (0, 1)")
    if args.suite == "nist":
        data = _test_input(args, 810)
        bits = nist.BitSequence.from_bytes(data)
        results = nist.run_battery(bits, alpha=args.alpha, threads=args.threads)
        ok = all(r.passed for r in results if r.applicable)
        if args.json:
            print(json.dumps([r.to_dict() for r in results], indent=2))
        else:
            print(nist.format_table(results, n=bits.n, alpha=args.alpha))
            if args.histograms:
                for name, h in nist.histograms(results).items():
                    obs = " ".join(str(v) for v in h["observed"])
                    exp = " ".join(f"{v:.2f}" for v in h["expected"])
                    print(f"\n{nist.LABELS.get(name, name)}\n  observed: {obs}\n  expected: {exp}")
        return EXIT_OK if ok else EXIT_TEST_FAILED
    data = _test_input(args, 1 << 20)
    report = ent.analyze(data)
    band = _parse_band(args.chi_band)
    if args.json:
        print(report.to_json())
    else:
        print(report.format_table())
    return EXIT_OK if report.chi_square_ok(band) else EXIT_TEST_FAILED


def _parse_band(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--chi-band: expected LO,HI, got {text!r}") from None
    if not 0 <= lo < hi <= 100:
        raise UsageError("--chi-band must satisfy 0 <= LO < HI <= 100")
    return lo, hi


def cmd_julia(args):
    if args.delta < 0:
        raise UsageError("--delta must be non-negative")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be positive")
    seed = parse_hex(args.seed, "--seed")
    if not seed:
        raise UsageError("--seed must not be empty")
    img = julia.render(julia.OmegaSpec(seed, args.delta, args.max_iter),
                       parse_window(args.window), parse_resolution(args.res),
                       args.max_iter, args.family, threads=args.threads)
    write_file(args.out, img.to_pgm())
    if args.grid:
        write_file(args.grid, img.to_json().encode())
    return EXIT_OK


def cmd_stability(args):
    if args.trials < 2:
        raise UsageError("--trials must be at least 2")
    if args.delta < 0:
        raise UsageError("--delta must be non-negative")
    report = julia.stability_probe(
        args.delta, args.trials, seed=parse_hex(args.seed, "--seed"),
        window=parse_window(args.window), resolution=parse_resolution(args.res),
        max_iter=args.max_iter, family=args.family, threads=args.threads)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _add_config(p):
    g = p.add_argument_group(
        "cipher parameters",
        "Not stored in the sealed file. They are authenticated with the associated data, "
        "so decrypting with different values fails with 'authentication failed'.")
    g.add_argument("--profile", choices=PROFILES, default=None,
                   help=f"parameter regime (default: ${PROFILE_ENV} or chaotic)")
    g.add_argument("--delta", type=float, default=None, help="disc radius; only with --profile custom")
    g.add_argument("--warm-up", type=int, default=WARM_UP, help="discarded initial steps")
    g.add_argument("--extraction", default="per3", help="per3 | accumulate:K | running")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaoscipher", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="print a fresh 32-byte key as hex")
    p.add_argument("--out", help="write the key here (mode 0600) instead of stdout")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="seal a file")
    p.add_argument("--key", required=True, help=KEY_HELP)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ad", default="", help="associated data, hex")
    p.add_argument("--iv", default=None, help="16-byte IV, hex (default: random)")
    _add_config(p)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="verify and open a sealed file")
    p.add_argument("--key", required=True, help=KEY_HELP)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ad", default="", help="associated data, hex")
    _add_config(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("keystream", help="dump raw keystream bytes")
    p.add_argument("--key", required=True, help=KEY_HELP)
    p.add_argument("--iv", required=True)
    p.add_argument("--ad", default="")
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--out", default=None, help="default: stdout")
    _add_config(p)
    p.set_defaults(func=cmd_keystream)

    p = sub.add_parser("test", help="run the NIST or ENT battery")
    p.add_argument("suite", choices=("nist", "ent"))
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--from-keystream", action="store_true",
                   help="test fresh keystream from --key/--iv/--len instead of a file")
    p.add_argument("--key", help=KEY_HELP)
    p.add_argument("--iv")
    p.add_argument("--ad", default="")
    p.add_argument("--len", type=int, default=None,
                   help="keystream bytes (default 810 for nist, 1 MiB for ent)")
    p.add_argument("--alpha", type=float, default=nist.ALPHA)
    p.add_argument("--json", action="store_true")
    p.add_argument("--histograms", action="store_true", help="nist: show category counts")
    p.add_argument("--chi-band", default="1,99", help="ent: passing chi-square percentile band")
    p.add_argument("--threads", type=int, default=1)
    _add_config(p)
    p.set_defaults(func=cmd_test)

    def julia_opts(p, res):
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--res", default=res, help="WxH")
        p.add_argument("--window", default=",".join(str(v) for v in julia.DEFAULT_WINDOW),
                       help="x0,y0,x1,y1 (use --window=-1,... for negative values)")
        p.add_argument("--family", choices=julia.FAMILIES, default="cubic")
        p.add_argument("--max-iter", type=int, default=julia.DEFAULT_MAX_ITER)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("julia", help="render a random Julia set to PGM")
    julia_opts(p, "256x256")
    p.add_argument("--seed", default="00", help="omega seed, hex")
    p.add_argument("--out", required=True)
    p.add_argument("--grid", default=None, help="also dump the escape-time grid as JSON")
    p.set_defaults(func=cmd_julia)

    p = sub.add_parser("stability", help="member-set distance between independent omegas")
    julia_opts(p, "128x128")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", default=b"stability".hex(), help="base seed, hex")
    p.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chaoscipher: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except aead.AuthenticationFailed:
        print("chaoscipher: authentication failed", file=sys.stderr)
        return EXIT_AUTH
    except aead.MalformedMessage:
        print("chaoscipher: malformed message", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"chaoscipher: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"chaoscipher: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
