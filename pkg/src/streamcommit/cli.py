"""Command-line front end: gen-trace, run, compare, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .config import EngineConfig, load_config
from .errors import StreamCommitError
from .events import read_events, write_events
from .harness import DEFAULT_CHUNK_S, SYSTEMS, replay
from .metrics import CostModel, build_report
from .traces import TraceParams, generate_trace, read_trace, read_wav, write_trace

log = logging.getLogger("streamcommit")


def _dump_json(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out is None or out == "-":
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _cost(args) -> CostModel:
    return CostModel(args.c0, args.c1, args.seconds_per_unit)


def cmd_gen_trace(args) -> int:
    langs = tuple(x for x in (args.languages or "").split(",") if x)
    params = TraceParams(
        duration_s=args.duration, seed=args.seed, speech_rate=args.speech_rate,
        noise=args.noise, never_stabilize=args.never_stabilize,
        annotation_rate=args.annotation_rate, languages=langs,
        switch_every_s=args.switch_every,
    )
    trace = generate_trace(params)
    if args.out in (None, "-"):
        write_trace(trace, sys.stdout)
    else:
        write_trace(trace, args.out)
    return 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    trace = read_trace(args.trace)
    audio = read_wav(args.wav) if args.wav else None
    session = replay(trace, args.system, cfg, chunk_s=args.chunk_s, audio=audio)
    if args.out in (None, "-"):
        write_events(session.events, sys.stdout)
    else:
        write_events(session.events, args.out)
    if args.report:
        rep = build_report(session.events, system=args.system, duration_s=session.duration_s,
                           reference=trace.reference, cost=_cost(args),
                           sample_rate=cfg.sample_rate)
        _dump_json(rep.to_dict(), args.report)
    return 0


def _compare_one(trace_path: str, cfg: EngineConfig, chunk_s: float, cost: CostModel,
                 events_dir: Optional[str]) -> dict:
    trace = read_trace(trace_path)
    out = {"trace": trace_path}
    for system in SYSTEMS:
        session = replay(trace, system, cfg, chunk_s=chunk_s)
        if events_dir:
            name = f"{Path(trace_path).stem}.{system}.jsonl"
            write_events(session.events, Path(events_dir) / name)
        out[system] = build_report(session.events, system=system, duration_s=session.duration_s,
                                   reference=trace.reference, cost=cost,
                                   sample_rate=cfg.sample_rate).to_dict()
    return out


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    cost = _cost(args)
    for t in args.trace:
        read_trace(t)  # fail fast on malformed input
    if args.events_dir:
        Path(args.events_dir).mkdir(parents=True, exist_ok=True)
    work = [(t, cfg, args.chunk_s, cost, args.events_dir) for t in args.trace]
    if args.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_one, *zip(*work)))
    else:
        results = [_compare_one(*w) for w in work]
    _dump_json(results[0] if len(results) == 1 else results, args.out)
    return 0


def cmd_report(args) -> int:
    events = read_events(args.events)
    reference = read_trace(args.trace).reference if args.trace else None
    rep = build_report(events, system=args.system, reference=reference, cost=_cost(args))
    _dump_json(rep.to_dict(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamcommit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def cost_flags(sp):
        sp.add_argument("--c0", type=float, default=0.05, help="fixed cost per decode")
        sp.add_argument("--c1", type=float, default=0.1, help="cost per window second")
        sp.add_argument("--seconds-per-unit", type=float, default=1.0,
                        help="simulated decode seconds per cost unit")

    g = sub.add_parser("gen-trace", help="synthesize a trace")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--duration", type=float, default=600.0)
    g.add_argument("--speech-rate", type=float, default=2.5)
    g.add_argument("--noise", type=float, default=1.0)
    g.add_argument("--never-stabilize", action="store_true")
    g.add_argument("--annotation-rate", type=float, default=0.0)
    g.add_argument("--languages", help="comma-separated tags cycled every --switch-every s")
    g.add_argument("--switch-every", type=float, default=60.0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_trace)

    r = sub.add_parser("run", help="replay one system over a trace")
    r.add_argument("--config")
    r.add_argument("--trace", required=True)
    r.add_argument("--wav", help="16-bit mono 16 kHz audio to stream instead of synthesized audio")
    r.add_argument("--system", choices=SYSTEMS, default="engine")
    r.add_argument("--chunk-s", type=float, default=DEFAULT_CHUNK_S)
    r.add_argument("--out")
    r.add_argument("--report", help="also write a session report JSON here")
    cost_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="engine vs baseline on the same trace(s)")
    c.add_argument("--config")
    c.add_argument("--trace", required=True, nargs="+")
    c.add_argument("--chunk-s", type=float, default=DEFAULT_CHUNK_S)
    c.add_argument("--events-dir")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out")
    cost_flags(c)
    c.set_defaults(func=cmd_compare)

    rp = sub.add_parser("report", help="aggregate an event log into a session report")
    rp.add_argument("--events", required=True)
    rp.add_argument("--trace", help="trace providing the reference transcript for WER")
    rp.add_argument("--system", default="engine")
    rp.add_argument("--out")
    cost_flags(rp)
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (StreamCommitError, OSError) as exc:
        print(f"streamcommit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
