"""``mscr`` command-line front end.

Exit codes: 0 success, 2 invalid input or parameters, 3 field unsuitable
for the requested code, 4 file or format errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import analyzer, flowgraph, report, sim
from .blockfile import BlockFile, block_name, bytes_to_symbols, symbols_to_bytes
from .code import Code, DeviceBlock, build_code, decode, encode
from .config import RunConfig, load_config
from .errors import BlockFileError, FieldUnsuitable, MSCRError, ParameterError
from .repair import format_transcript, naive_transfers, repair

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FIELD = 3
EXIT_IO = 4


def _config(args, code_args: bool = True) -> RunConfig:
    cfg = load_config(args.config)
    if code_args:
        cfg = cfg.with_overrides(n=args.n, d=args.d)
    cfg = cfg.with_overrides(field=args.field, omega=args.omega, seed=args.seed, helper_policy=getattr(args, "helper_policy", None))
    if args.out_dir is not None:
        cfg = cfg.with_overrides(output_dir=args.out_dir)
    return cfg.validate()


def _out(cfg: RunConfig) -> Path:
    p = cfg.output_path()
    p.mkdir(parents=True, exist_ok=True)
    return p


def _parse_indices(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError(f"--failed expects comma-separated device indices, got {text!r}") from None
    if not vals or len(set(vals)) != len(vals):
        raise ParameterError(f"--failed needs distinct device indices, got {text!r}")
    return vals


# -- encode / decode ------------------------------------------------------------------


def cmd_encode(args) -> int:
    cfg = _config(args)
    data = Path(args.input).read_bytes()
    if not data:
        raise ParameterError("input file is empty")
    code = build_code(cfg.params(), cfg.field_spec())
    M = code.params.M
    syms = bytes_to_symbols(data, code.field)
    syms += [0] * (-len(syms) % M)
    stripes = [encode(code, syms[i : i + M]) for i in range(0, len(syms), M)]
    out = _out(cfg)
    for dev in code.devices:
        bf = BlockFile(code.field, code.params, dev.index, dev.role, len(data), tuple(s[dev.index].symbols for s in stripes))
        bf.write(out / block_name(dev.index))
    print(f"encoded {len(data)} bytes into {len(stripes)} stripes x {code.n} devices ({code.alpha} symbols per stripe) in {out}")
    return EXIT_OK


def _load_blocks(paths: Sequence) -> list[BlockFile]:
    blocks = [BlockFile.read(p) for p in paths]
    for b in blocks[1:]:
        if not b.compatible(blocks[0]):
            raise ParameterError(f"block for device {b.device} has a header that does not match device {blocks[0].device}")
    return blocks


def cmd_decode(args) -> int:
    blocks = _load_blocks(args.blocks)
    by_dev = {}
    for b in blocks:
        by_dev.setdefault(b.device, b)
    if len(by_dev) < 2:
        raise ParameterError("decode needs blocks from two distinct devices")
    first, second = list(by_dev.values())[:2]
    code = build_code(first.params, first.field, validate="none")
    syms = []
    for s0, s1 in zip(first.stripes, second.stripes):
        syms += decode(code, [DeviceBlock(first.device, s0), DeviceBlock(second.device, s1)])
    Path(args.output).write_bytes(symbols_to_bytes(syms, code.field, first.length))
    print(f"decoded {first.length} bytes from devices {first.device} and {second.device} to {args.output}")
    return EXIT_OK


# -- repair ---------------------------------------------------------------------------


def _choose_helpers(code: Code, live: list[int], failed: list[int], cfg: RunConfig) -> Optional[tuple[int, ...]]:
    if cfg.helper_policy == "lowest":
        return None
    need = code.params.d if len(failed) == 2 else code.alpha + 1
    return tuple(random.Random(cfg.seed).sample(live, need))


def cmd_repair(args) -> int:
    cfg = _config(args)
    failed = _parse_indices(args.failed)
    if len(failed) > 2:
        raise ParameterError(f"at most 2 simultaneous failures can be repaired, got {len(failed)}")
    src = Path(args.directory)
    files = sorted(src.glob("device_*.blk"))
    if not files:
        raise BlockFileError(f"no block files in {src}")
    blocks = _load_blocks(files)
    ref = blocks[0]
    code = build_code(ref.params, ref.field)
    for i in failed:
        if not 0 <= i < code.n:
            raise ParameterError(f"no device {i} in an n={code.n} code")
    originals = {b.device: b for b in blocks if b.device in failed}
    live_blocks = {b.device: b for b in blocks if b.device not in failed}
    live = sorted(live_blocks)
    need = code.params.d if len(failed) == 2 else code.alpha + 1
    if len(live) < need:
        raise ParameterError(f"repair needs {need} live helper blocks, found {len(live)}")
    helpers = _choose_helpers(code, live, failed, cfg)
    kw = {} if helpers is None else {"helpers": helpers}

    out = _out(cfg)
    recovered = {i: [] for i in failed}
    transcript_parts = []
    total = 0
    for s in range(len(ref.stripes)):
        stripe_blocks = {d: live_blocks[d].stripes[s] for d in live}
        tr = repair(code, stripe_blocks, failed, **kw)
        total += tr.transfer_count
        transcript_parts.append(f"# stripe {s}\n" + format_transcript(tr))
        for i in failed:
            recovered[i].append(tr.recovered[i])
    per_stripe = total // len(ref.stripes)
    naive = naive_transfers(code, len(failed))

    for i in failed:
        dev = code.device(i)
        BlockFile(code.field, code.params, i, dev.role, ref.length, tuple(recovered[i])).write(out / block_name(i))
    report.write_text(out / "transcript.txt", "".join(transcript_parts))
    rows = [(",".join(map(str, failed)), per_stripe, naive, len(ref.stripes), total, naive * len(ref.stripes))]
    report.write_text(out / "bandwidth.csv", report.csv_text(["failed", "transfers_per_stripe", "naive_per_stripe", "stripes", "total_transfers", "total_naive"], rows))
    report.bandwidth_figure([(",".join(map(str, failed)), per_stripe, naive)], out / "bandwidth.png")

    verdict = []
    for i, orig in originals.items():
        same = orig.stripes == tuple(recovered[i])
        verdict.append(f"device {i}: {'identical to' if same else 'DIFFERS from'} the original block")
    summary = [
        f"repaired devices {','.join(map(str, failed))} over {len(ref.stripes)} stripes",
        f"transfers per stripe: {per_stripe} (naive {naive}, ratio {per_stripe / naive:.4f})",
        *verdict,
    ]
    report.write_text(out / "bandwidth.txt", "\n".join(summary) + "\n")
    print("\n".join(summary))
    return EXIT_OK


# -- analyze ---------------------------------------------------------------------------


def _impossibility_instances(k: int, d: int, t: int, q: str, count: int, seed: int, kind: str):
    from .field import FieldSpec

    field = FieldSpec.parse(q)
    if k == 2 and t == 2:
        from .code import CodeParams

        try:
            code = build_code(CodeParams(n=d + 2, d=d), field)
            return [analyzer.instance_from_code(code)]
        except (FieldUnsuitable, ParameterError):
            pass
    return [analyzer.random_instance(k, d, t, field, seed=seed + i, kind=kind) for i in range(count)]


def cmd_analyze(args) -> int:
    # --d here is the analyzed helper count, not the stored code's
    cfg = _config(args, code_args=False)
    out = _out(cfg)
    if args.impossibility:
        k, d, t, q = args.impossibility
        insts = _impossibility_instances(int(k), int(d), int(t), q, args.instances, cfg.seed, args.kind)
        texts, rows, counts, summary = [], [], [], []
        for inst in insts:
            cert = analyzer.exhaustive_search(inst)
            texts.append(cert.to_text())
            summary.append(cert.summary())
            counts.append((inst.label or "instance", cert.search_space, cert.feasible_count))
            for c in cert.candidates:
                rows.append([inst.label, cert.verdict] + list(c.record().values()))
        report.write_text(out / "certificate.txt", "\n".join(texts))
        header = ["instance", "verdict"] + list(analyzer.CandidateResult(0, (), False, "", "", 0, {}).record())
        report.write_text(out / "certificate.csv", report.csv_text(header, rows))
        if any(c[1] for c in counts):
            report.certificate_figure(counts, out / "certificate.png")
        print("\n".join(summary))
        if len(insts) == 1 and insts[0].k == 2 and cert.witness is not None:
            print(texts[0].split("\n", 2)[2].rstrip())
        return EXIT_OK

    g = flowgraph.build_flow_graph(args.k, args.d, args.t, aligned=args.aligned)
    other = flowgraph.build_flow_graph(args.k, args.d, args.t, aligned=not args.aligned)
    cut, cut_other = flowgraph.min_cut(g), flowgraph.min_cut(other)
    M = g.file_size
    label = "aligned" if args.aligned else "unconstrained"
    rel = "<" if cut.value < M else ">="
    lines = [
        f"{label} graph k={args.k} d={args.d} t={args.t} alpha={g.alpha} beta={g.beta}",
        f"min cut {cut.value} {rel} M {M}",
        f"collector: {' '.join(cut.collector)}",
        "cut edges: " + ", ".join(f"{u}->{v}({'inf' if c is None else c})" for u, v, c in cut.cut_edges(g)),
        f"{'unconstrained' if args.aligned else 'aligned'} graph min cut {cut_other.value}",
    ]
    report.write_text(out / "flowcut.txt", "\n".join(lines) + "\n")
    report.write_text(out / "flowcut.csv", report.csv_text(["collector", "max_flow"], [(" ".join(c), v) for c, v in cut.per_collector.items()]))
    report.write_text(out / "flowgraph.dot", g.to_dot(cut.collector))
    report.flowcut_figure({label: cut.per_collector, ("unconstrained" if args.aligned else "aligned"): cut_other.per_collector}, M, out / "flowcut.png")
    print("\n".join(lines[:2]))
    return EXIT_OK


# -- churn -------------------------------------------------------------------------------


def cmd_churn(args) -> int:
    cfg = _config(args)
    if args.rounds < 0:
        raise ParameterError("--rounds must be nonnegative")
    code = build_code(cfg.params(), cfg.field_spec())
    rng = random.Random(cfg.seed)
    data = [rng.randrange(code.field.order) for _ in range(code.params.M)]
    state = sim.cluster_create(code.params, code.field, data, code=code)
    summary = sim.churn_test(state, args.rounds, cfg.seed)
    out = _out(cfg)
    report.write_text(out / "churn.txt", summary.to_text())
    report.write_text(out / "churn.csv", summary.to_csv())
    report.write_text(out / "events.jsonl", sim.format_events(state))
    report.write_text(out / "churn.json", json.dumps(summary.to_dict(), indent=2) + "\n")
    report.churn_figure(summary.per_round, out / "churn.png")
    print(summary.to_text(), end="")
    return EXIT_OK if summary.ok else EXIT_VALIDATION


# -- parser --------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--field", help="field, e.g. 2^8, 7, 2^4:0x13 (default GF(2^8))")
    p.add_argument("--omega", type=int, help="generator override")
    p.add_argument("--n", type=int, help="number of devices")
    p.add_argument("--d", type=int, help="number of helpers")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out-dir", help="output directory (beats MSCR_OUTPUT_DIR and the config file)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mscr", description="Exact MSCR codes for k=2: encode, decode, repair, analyze.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="split a file into n block files")
    p.add_argument("input")
    _common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="rebuild a file from two or more block files")
    p.add_argument("blocks", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("repair", help="regenerate one or two lost blocks")
    p.add_argument("directory", help="directory holding device_NN.blk files")
    p.add_argument("--failed", required=True, help="failed device indices, e.g. 0,1")
    p.add_argument("--helper-policy", choices=("lowest", "random"))
    _common(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("analyze", help="alignment impossibility search or flow-graph cut")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--impossibility", nargs=4, metavar=("K", "D", "T", "Q"))
    mode.add_argument("--flowcut", action="store_true")
    p.add_argument("--aligned", action="store_true", help="flowcut: share systematic helper transfers")
    p.add_argument("--instances", type=int, default=10, help="random instances per search")
    p.add_argument("--kind", choices=("dense", "monomial", "tensor"), default="dense")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--t", type=int, default=2)
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("churn", help="random fail/repair rounds on a simulated cluster")
    p.add_argument("--rounds", type=int, default=100)
    _common(p)
    p.set_defaults(func=cmd_churn)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze" and args.d is None:
        args.d = 4
    try:
        return args.func(args)
    except FieldUnsuitable as exc:
        print(f"mscr: field unsuitable: {exc}", file=sys.stderr)
        return EXIT_FIELD
    except (BlockFileError, OSError) as exc:
        print(f"mscr: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MSCRError, ValueError) as exc:
        print(f"mscr: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
