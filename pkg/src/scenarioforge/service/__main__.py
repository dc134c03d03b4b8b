"""Run the workshop service: ``python -m scenarioforge.service``."""

from __future__ import annotations

import argparse
import os


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="scenarioforge-server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("SCENARIOFORGE_DATA", "./scenarioforge-data"),
        help="directory holding one event log per workshop",
    )
    parser.add_argument("--ui-dir", default=None, help="static directory served at /ui")
    parser.add_argument("--no-fsync", action="store_true", help="skip fsync per event append")
    args = parser.parse_args(argv)

    import uvicorn

    from .app import create_app

    app = create_app(args.data_dir, fsync=not args.no_fsync, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
