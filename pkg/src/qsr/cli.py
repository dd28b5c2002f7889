"""Thin command-line client for the qsr service.

Every subcommand builds a JSON request and posts it to the service:
to `--server URL` when given, otherwise to an in-process instance of
the app (no socket needed).  Config files are flat `key = value` text
whose keys mirror the request fields; `--seed` and `--out` override
the config.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from . import __version__
from .experiments import parse_config_file

DEFAULT_TIMEOUT = None  # training runs take minutes; never time out


class CliError(Exception):
    pass


def _format_detail(detail) -> str:
    if isinstance(detail, str):
        return detail
    if isinstance(detail, list):  # pydantic validation errors
        parts = []
        for err in detail:
            loc = ".".join(str(p) for p in err.get("loc", []) if p != "body")
            parts.append(f"{loc}: {err.get('msg', 'invalid')}" if loc else err.get("msg", ""))
        return "; ".join(parts)
    return json.dumps(detail)


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        if server:
            with httpx.Client(base_url=server, timeout=DEFAULT_TIMEOUT) as client:
                response = client.post(path, json=payload)
        else:
            from .service.app import create_app

            async def call() -> httpx.Response:
                transport = httpx.ASGITransport(app=create_app())
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://qsr", timeout=DEFAULT_TIMEOUT
                ) as client:
                    return await client.post(path, json=payload)

            response = asyncio.run(call())
    except httpx.HTTPError as exc:
        raise CliError(f"request to {path} failed: {exc}") from exc
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CliError(_format_detail(detail))
    return response.json()


def _split_ints(text: str) -> list[int]:
    parts = [p.strip() for p in text.replace("&", ",").split(",") if p.strip()]
    if not parts:
        raise CliError(f"expected a comma-separated integer list, got {text!r}")
    return [int(p) for p in parts]


def _cmd_train(args) -> int:
    mapping = parse_config_file(args.config)
    if "labels" in mapping:
        mapping["labels"] = _split_ints(mapping["labels"])
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.out is not None:
        mapping["output_dir"] = args.out
    if "output_dir" not in mapping:
        raise CliError("no output directory: set output_dir in the config or pass --out")
    result = _post(args.server, "/train", mapping)
    print(result["summary"])
    return 0


def _cmd_eval(args) -> int:
    payload = {
        "checkpoint": args.checkpoint,
        "labels": _split_ints(args.labels),
        "dataset": args.dataset,
        "seed": args.seed if args.seed is not None else 0,
        "n_train": args.n_train,
        "n_test": args.n_test,
        "framework": args.framework,
    }
    result = _post(args.server, "/eval", payload)
    print(
        f"{result['family']},{result['framework']},{result['avg_l2']:.6g},"
        f"{result['avg_fidelity']:.6g},{result['param_count']}"
    )
    return 0


def _cmd_reconstruct(args) -> int:
    payload = {
        "checkpoint": args.checkpoint,
        "indices": _split_ints(args.indices),
        "output_dir": args.out,
        "dataset": args.dataset,
        "framework": args.framework,
    }
    result = _post(args.server, "/reconstruct", payload)
    count = sum(len(s["files"]) for s in result["samples"])
    print(f"wrote {count} files for {len(result['samples'])} sample(s) to {result['output_dir']}")
    return 0


def _cmd_grid(args) -> int:
    mapping = parse_config_file(args.config)
    cells = mapping.pop("cell", [])
    payload: dict = {}
    for key, value in mapping.items():
        payload[key] = value
    payload["cells"] = []
    for cell in cells:
        if ":" not in cell:
            raise CliError(f"grid cell {cell!r} must look like 'family:labels'")
        family, labels = cell.split(":", 1)
        payload["cells"].append({"family": family.strip(), "labels": _split_ints(labels)})
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.out is not None:
        payload["output_dir"] = args.out
    if "output_dir" not in payload:
        raise CliError("no output directory: set output_dir in the config or pass --out")
    if args.parallel:
        payload["parallel"] = True
    result = _post(args.server, "/grid", payload)
    for row in result["rows"]:
        fid = "" if row["avg_fidelity"] is None else f"{row['avg_fidelity']:.6g}"
        print(f"{row['family']},{row['labels']},{fid},{row['status']}")
    print(f"results: {result['results_csv']}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qsr.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsr", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qsr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p) -> None:
        p.add_argument("--server", default=None, help="service URL; in-process when omitted")

    p_train = sub.add_parser("train", help="train one configuration and emit artifacts")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p_train.add_argument("--out", default=None, help="overrides the config output_dir")
    add_server(p_train)
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a seeded test split")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--labels", required=True, help="e.g. 0 or 0,1")
    p_eval.add_argument("--dataset", default="builtin")
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--n-train", type=int, default=50)
    p_eval.add_argument("--n-test", type=int, default=30)
    p_eval.add_argument("--framework", default="", choices=["", "qnn", "qae"])
    add_server(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_rec = sub.add_parser("reconstruct", help="write input/reconstruction/reference images")
    p_rec.add_argument("--checkpoint", required=True)
    p_rec.add_argument("--indices", required=True, help="dataset row indices, e.g. 0,1,2")
    p_rec.add_argument("--out", required=True)
    p_rec.add_argument("--dataset", default="builtin")
    p_rec.add_argument("--framework", default="", choices=["", "qnn", "qae"])
    add_server(p_rec)
    p_rec.set_defaults(func=_cmd_reconstruct)

    p_grid = sub.add_parser("grid", help="run a (family x labels) grid of training cells")
    p_grid.add_argument("--config", required=True)
    p_grid.add_argument("--seed", type=int, default=None)
    p_grid.add_argument("--out", default=None)
    p_grid.add_argument("--parallel", action="store_true")
    add_server(p_grid)
    p_grid.set_defaults(func=_cmd_grid)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
