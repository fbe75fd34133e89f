"""Command-line client for the solver service.

Every subcommand talks to the HTTP API: against a remote server when
``--server`` is given, otherwise against the in-process application over an
ASGI transport, so no server needs to be running for local use.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .bench import CSV_HEADER


def _post(path: str, payload: dict, server: str | None) -> dict:
    if server:
        response = httpx.post(server.rstrip("/") + path, json=payload, timeout=600.0)
    else:
        response = asyncio.run(_post_asgi(path, payload))
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise RuntimeError(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


async def _post_asgi(path: str, payload: dict) -> httpx.Response:
    from .service.app import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://stairsolve") as client:
        return await client.post(path, json=payload, timeout=600.0)


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _records_csv(records: list[dict]) -> str:
    columns = CSV_HEADER.split(",")
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return str(v)
    lines = [CSV_HEADER]
    lines += [",".join(fmt(rec[col]) for col in columns) for rec in records]
    return "\n".join(lines) + "\n"


def _spectra_csv(records: list[dict], spectra: dict) -> str:
    lines = ["problem,preconditioner,index,eigenvalue"]
    for rec in records:
        values = spectra.get(rec["preconditioner"])
        if values is None:
            continue
        lines += [
            f"{rec['problem']},{rec['preconditioner']},{i},{float(v)!r}"
            for i, v in enumerate(values)
        ]
    return "\n".join(lines) + "\n"


def _cmd_bench(args: argparse.Namespace) -> int:
    payload = {
        "problem": args.problem,
        "N": args.N,
        "h": args.h,
        "preconditioners": [k.strip() for k in args.precond.split(",") if k.strip()],
        "tol": args.tol,
        "max_iter": args.max_iter,
        "state_weight": args.state_weight,
        "control_weight": args.control_weight,
        "terminal_weight": args.terminal_weight,
        "include_spectrum": args.spectrum is not None,
        "spectrum_only": args.spectrum_only,
    }
    result = _post("/bench", payload, args.server)
    records = result["records"]
    if args.format == "csv":
        _write_output(_records_csv(records), args.out)
    else:
        _write_output(json.dumps({"records": records}, indent=2) + "\n", args.out)
    if args.spectrum is not None:
        _write_output(_spectra_csv(records, result.get("spectra") or {}), args.spectrum)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    with open(args.linearization) as fh:
        lin = json.load(fh)
    payload = {
        "linearization": lin,
        "preconditioner": args.precond,
        "tol": args.tol,
        "max_iter": args.max_iter,
    }
    result = _post("/trajopt/solve", payload, args.server)
    _write_output(json.dumps(result, indent=2) + "\n", args.out)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("stairsolve.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stairsolve",
        description="Preconditioned block-tridiagonal solver client",
    )
    parser.add_argument("--server", default=None, help="base URL of a running service; "
                        "defaults to calling the bundled application in process")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run the preconditioner comparison experiment")
    bench.add_argument("--problem", required=True, choices=["pendulum", "cartpole"])
    bench.add_argument("--N", type=int, default=16, help="number of knot points")
    bench.add_argument("--h", type=float, default=0.1, help="timestep in seconds")
    bench.add_argument(
        "--precond",
        default="jacobi,block-jacobi,additive-stair,symmetric-stair",
        help="comma-separated kinds: jacobi, block-jacobi, additive-stair, "
        "symmetric-stair, poly:<k>",
    )
    bench.add_argument("--tol", type=float, default=1e-8)
    bench.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
    bench.add_argument("--state-weight", type=float, default=1.0, dest="state_weight")
    bench.add_argument("--control-weight", type=float, default=0.1, dest="control_weight")
    bench.add_argument("--terminal-weight", type=float, default=10.0, dest="terminal_weight")
    bench.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    bench.add_argument("--format", choices=["csv", "json"], default="csv")
    bench.add_argument("--spectrum", default=None,
                       help="also write per-preconditioner eigenvalues to this CSV path")
    bench.add_argument("--spectrum-only", action="store_true", dest="spectrum_only",
                       help="skip the PCG solves; required for poly:<k> kinds")
    bench.set_defaults(fn=_cmd_bench)

    solve = sub.add_parser("solve", help="solve one trajectory QP linearization")
    solve.add_argument("--linearization", required=True, help="path to a linearization JSON file")
    solve.add_argument("--precond", default="symmetric-stair")
    solve.add_argument("--tol", type=float, default=1e-8)
    solve.add_argument("--max-iter", type=int, default=1000, dest="max_iter")
    solve.add_argument("--out", default=None)
    solve.set_defaults(fn=_cmd_solve)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(fn=_cmd_serve)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - single diagnostic line, nonzero exit
        print(f"stairsolve: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
