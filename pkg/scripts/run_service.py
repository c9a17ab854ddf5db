#!/usr/bin/env python3
"""Start the HTTP session service.

Provider selection:
  --mode deterministic   local stubs, no credentials needed (default)
  --mode live            chat/image providers from DIMPALETTE_API_KEY etc.
  --mode record          live providers, responses recorded to --fixtures
  --mode replay          serve entirely from --fixtures, no network

Example:
  python3 scripts/run_service.py --mode deterministic --port 8000 --storage ./sessions
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

import uvicorn  # noqa: E402

from dimpalette.gateway import FixtureStore, Gateway, GatewayConfig  # noqa: E402
from dimpalette.service import DiskStorage, SessionService, create_app  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--mode", choices=["deterministic", "live", "record", "replay"], default="deterministic")
    parser.add_argument("--fixtures", default="./fixtures", help="fixture store directory for record/replay")
    parser.add_argument("--storage", default=None, help="session storage root (in-memory when omitted)")
    parser.add_argument("--ui", default=str(REPO / "frontend"), help="static UI directory to mount at /ui")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args()

    if args.mode == "deterministic":
        gateway = Gateway(mode="deterministic")
    elif args.mode == "live":
        gateway = Gateway.live_mode()
    elif args.mode == "record":
        gateway = Gateway(mode="record", store=FixtureStore(args.fixtures), config=GatewayConfig.from_env())
    else:
        gateway = Gateway.replay_mode(FixtureStore(args.fixtures))

    storage = DiskStorage(args.storage) if args.storage else None
    service = SessionService(gateway=gateway, storage=storage)
    app = create_app(service, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
