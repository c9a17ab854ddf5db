#!/usr/bin/env python3
"""Regenerate the bundled replay fixtures for the end-to-end demo flow.

Runs the canonical brief-to-reveal session once against the deterministic
backend in record mode and stores the responses under
src/dimpalette/data/fixtures/, plus a flow manifest (replay_flow.json) that
pins the exact command sequence consumers must replay.

Rerun after changing any pipeline prompt text, the deterministic backend, or
the bundled brief; fixture hashes shift with any of them.
"""

import json
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from dimpalette.data import sample_brief  # noqa: E402
from dimpalette.gateway import FixtureStore, Gateway  # noqa: E402
from dimpalette.model import SessionConfig  # noqa: E402
from dimpalette.service import SessionService  # noqa: E402

# (dimension ordinal, tag position) toggles; the e2e test replays exactly these
TOGGLE_POSITIONS = [[0, 0], [1, 0], [2, 0], [0, 1]]
REVEAL_IMAGE_INDEX = 0


def main() -> None:
    fixtures_dir = REPO / "src" / "dimpalette" / "data" / "fixtures"
    if fixtures_dir.exists():
        shutil.rmtree(fixtures_dir)
    fixtures_dir.mkdir(parents=True)

    store = FixtureStore(fixtures_dir)
    gateway = Gateway.record_mode(store)
    service = SessionService(gateway=gateway)
    session = service.create_session(
        sample_brief(),
        SessionConfig(condition="scaffolded", provider_mode="live"),
        session_id="brief-demo",
    )
    for dim_pos, tag_pos in TOGGLE_POSITIONS:
        tag = session.palette.ordered()[dim_pos].tags[tag_pos]
        service.toggle_tag_and_update(session.id, tag.id)
    iteration = service.submit_prompt(session.id)
    service.reveal_info(session.id, iteration.images[REVEAL_IMAGE_INDEX].id)

    flow = {
        "sessionId": session.id,
        "togglePositions": TOGGLE_POSITIONS,
        "revealImageIndex": REVEAL_IMAGE_INDEX,
        "seedDimensions": [d.name for d in session.palette.ordered()[:3]],
        "finalPrompt": session.prompt.text,
    }
    (REPO / "src" / "dimpalette" / "data" / "replay_flow.json").write_text(
        json.dumps(flow, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"recorded {len(store)} fixtures into {fixtures_dir}")
    print(f"final prompt: {session.prompt.text[:100]}...")


if __name__ == "__main__":
    main()
