"""Command-line client for the experiment service.

The CLI only parses arguments, talks HTTP and writes the returned artifact
bytes; all physics runs behind the service API.  Without ``--server`` the
service app is driven in-process, so no network or running server is needed.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import render_manifest


class InProcessClient:
    """HTTP client driving the service ASGI app directly, no server needed."""

    def _request(self, method: str, path: str, json=None):
        import asyncio

        import httpx

        from .service import app

        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport, base_url="http://service.local") as client:
                return await client.request(method, path, json=json)

        return asyncio.run(go())

    def post(self, path, json=None):
        return self._request("POST", path, json=json)

    def get(self, path):
        return self._request("GET", path)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server.rstrip("/"), timeout=3600.0)
    return InProcessClient()


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _cmd_run(args) -> int:
    from . import presets

    path = Path(args.config)
    if path.is_file():
        config_text = path.read_text(encoding="utf-8")
    elif args.config in presets.list_presets():
        config_text = presets.preset_text(args.config)
    else:
        return _fail(f"config file {args.config!r} not found (and it is not a preset name)", 1)

    overrides = {}
    for item in args.override or []:
        if "=" not in item:
            return _fail(f"--override expects key=value, got {item!r}", 1)
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()

    payload = {"config_text": config_text, "overrides": overrides, "seed": args.seed}
    with _make_client(args.server) as client:
        response = client.post("/run", json=payload)
        if response.status_code != 200:
            detail = _detail(response)
            if response.status_code == 422:
                return _fail(f"invalid configuration: {detail}", 1)
            return _fail(f"run failed: {detail}", 2)
        body = response.json()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for artifact in body["artifacts"]:
        (out_dir / artifact["filename"]).write_text(artifact["content"], encoding="utf-8")
    (out_dir / "manifest.txt").write_text(render_manifest(body["manifest"]), encoding="utf-8")
    for artifact in body["artifacts"]:
        print(out_dir / artifact["filename"])
    print(out_dir / "manifest.txt")
    return 0


def _detail(response) -> str:
    try:
        detail = response.json().get("detail", "")
    except ValueError:
        return response.text
    if isinstance(detail, dict):
        return str(detail.get("message", detail))
    return str(detail)


def _cmd_presets(args) -> int:
    with _make_client(args.server) as client:
        if args.presets_command == "list":
            response = client.get("/presets")
            if response.status_code != 200:
                return _fail(_detail(response), 2)
            for preset in response.json()["presets"]:
                print(f"{preset['name']:20s} {preset['description']}")
            return 0
        response = client.get(f"/presets/{args.name}")
        if response.status_code == 404:
            return _fail(_detail(response), 1)
        if response.status_code != 200:
            return _fail(_detail(response), 2)
        print(response.json()["config_text"], end="")
        return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochrel",
        description="Experiments on relativistic particles driven by a proper-time random force",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config (file path or preset name)")
    run_p.add_argument("config", help="path to a config document, or a preset name")
    run_p.add_argument("--seed", type=int, default=None, help="replace the seed list with one seed")
    run_p.add_argument("--out", default=".", help="output directory (default: current directory)")
    run_p.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    run_p.add_argument("--server", default=None, help="base URL of a remote service")
    run_p.set_defaults(func=_cmd_run)

    presets_p = sub.add_parser("presets", help="list or show bundled presets")
    presets_sub = presets_p.add_subparsers(dest="presets_command", required=True)
    list_p = presets_sub.add_parser("list", help="list available presets")
    list_p.add_argument("--server", default=None)
    list_p.set_defaults(func=_cmd_presets)
    show_p = presets_sub.add_parser("show", help="print a preset config document")
    show_p.add_argument("name")
    show_p.add_argument("--server", default=None)
    show_p.set_defaults(func=_cmd_presets)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
