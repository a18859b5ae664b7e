"""Command line entry points: batch runs, replay, the streaming service,
and the scenario listing.

Usage summary::

    softbody run --scenario ring2d --integrator rk4 --dt 0.005 --steps 1000
                 [--dump PATH] [--snapshot-out PATH]
    softbody replay --from SNAPSHOT --steps N [--dump PATH]
    softbody serve --port 8765 --scenario jellyfish2d [--fps 30]
                   [--tcp-port P] [--steps N] [--dump PATH]
    softbody scenarios

``SOFTBODY_LOG`` selects the log level (debug, info, warning, error).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
from dataclasses import dataclass

from . import scenarios
from .errors import SoftbodyError
from .model import INTEGRATOR_IDS, SimParams
from .session import DumpWriter, Session, dump_frame, restore, snapshot_json

log = logging.getLogger(__name__)


@dataclass
class RunPlan:
    command: str
    scenario: str | None = None
    integrator: str | None = None
    dt: float | None = None
    steps: int | None = None
    dump: str | None = None
    snapshot_out: str | None = None
    snapshot_in: str | None = None
    port: int = 8765
    tcp_port: int | None = None
    fps: float = 30.0


def _add_common(sub, with_scenario=True):
    if with_scenario:
        sub.add_argument("--scenario", required=True,
                         help=f"builtin ({', '.join(scenarios.scenario_names())}) "
                              "or a scenario .json file")
    sub.add_argument("--integrator", choices=INTEGRATOR_IDS, default=None)
    sub.add_argument("--dt", type=float, default=None)


def parse_cli(argv) -> RunPlan:
    parser = argparse.ArgumentParser(prog="softbody",
                                     description="layered softbody simulation engine")
    subs = parser.add_subparsers(dest="command", required=True)

    run_p = subs.add_parser("run", help="headless batch run")
    _add_common(run_p)
    run_p.add_argument("--steps", type=int, required=True)
    run_p.add_argument("--dump", default=None, help="CSV dump base path")
    run_p.add_argument("--snapshot-out", default=None, help="write final state JSON here")

    replay_p = subs.add_parser("replay", help="continue from a snapshot")
    replay_p.add_argument("--from", dest="snapshot_in", required=True)
    replay_p.add_argument("--steps", type=int, required=True)
    replay_p.add_argument("--dump", default=None)
    replay_p.add_argument("--snapshot-out", default=None)

    serve_p = subs.add_parser("serve", help="interactive streaming service")
    _add_common(serve_p)
    serve_p.add_argument("--port", type=int, default=8765, help="websocket port")
    serve_p.add_argument("--tcp-port", type=int, default=None,
                         help="newline-delimited TCP port (default: port+1)")
    serve_p.add_argument("--fps", type=float, default=30.0)
    serve_p.add_argument("--steps", type=int, default=None,
                         help="step budget: run flat out, then exit (testing)")
    serve_p.add_argument("--dump", default=None)

    subs.add_parser("scenarios", help="list builtin scenarios")

    args = parser.parse_args(argv)
    plan = RunPlan(command=args.command)
    for field in ("scenario", "integrator", "dt", "steps", "dump",
                  "snapshot_out", "snapshot_in", "port", "tcp_port", "fps"):
        if hasattr(args, field):
            setattr(plan, field, getattr(args, field))
    if plan.scenario is not None and plan.scenario not in scenarios.scenario_names() \
            and not plan.scenario.endswith(".json"):
        parser.error(f"unknown scenario {plan.scenario!r} "
                     f"(valid: {', '.join(scenarios.scenario_names())})")
    return plan


def session_from_plan(plan: RunPlan) -> Session:
    """One construction path shared by run and serve, for bit parity."""
    params = SimParams()
    session = scenarios.build(plan.scenario, params)
    if plan.integrator is not None:
        session.set_integrator(plan.integrator)
    if plan.dt is not None:
        params.set_param("dt", plan.dt)
    return session


def _run_batch(session: Session, steps: int, dump: str | None,
               snapshot_out: str | None) -> None:
    sink = DumpWriter(dump) if dump else None
    try:
        for _ in range(steps):
            session.step()
            if sink is not None:
                dump_frame(session, sink)
    finally:
        if sink is not None:
            sink.close()
    if snapshot_out:
        with open(snapshot_out, "w", encoding="utf-8") as fh:
            fh.write(snapshot_json(session))
    stats = session.stats
    print(f"completed {session.clock.step_index} steps, t={session.clock.t:.6g} s, "
          f"{stats.steps_per_s:.0f} steps/s")


def main(argv=None) -> int:
    level = os.environ.get("SOFTBODY_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    plan = parse_cli(argv if argv is not None else sys.argv[1:])
    try:
        if plan.command == "scenarios":
            for name in scenarios.scenario_names():
                print(name)
            return 0
        if plan.command == "run":
            session = session_from_plan(plan)
            _run_batch(session, plan.steps, plan.dump, plan.snapshot_out)
            return 0
        if plan.command == "replay":
            with open(plan.snapshot_in, encoding="utf-8") as fh:
                session = restore(json.load(fh))
            _run_batch(session, plan.steps, plan.dump, plan.snapshot_out)
            return 0
        if plan.command == "serve":
            from . import server
            session = session_from_plan(plan)
            try:
                asyncio.run(server.serve(session, port=plan.port, fps=plan.fps,
                                         tcp_port=plan.tcp_port,
                                         max_steps=plan.steps, dump_path=plan.dump))
            except KeyboardInterrupt:
                pass
            return 0
    except SoftbodyError as e:
        if e.code in ("unknown-scenario", "unknown-integrator"):
            print(f"error: {e}", file=sys.stderr)
            return 2
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
