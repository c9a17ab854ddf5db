import random

import pytest

from dimpalette.data import sample_brief
from dimpalette.gateway import Gateway
from dimpalette.model import DocumentDigest, SessionConfig
from dimpalette.palette import init_palette
from dimpalette.service import SessionService


@pytest.fixture
def digest():
    return DocumentDigest(
        dimensions=(
            ("Aesthetic", ("minimalist", "contemporary", "neutral tones")),
            ("Sustainability", ("eco-friendly", "natural wood", "recycled materials")),
            ("Functionality", ("lightweight", "sturdy", "scratch-resistant", "stackable")),
        )
    )


@pytest.fixture
def palette(digest):
    return init_palette(digest)


@pytest.fixture
def brief():
    return sample_brief()


@pytest.fixture
def service():
    return SessionService(gateway=Gateway(mode="deterministic"))


def make_session(service, condition="scaffolded", provider_mode="deterministic", **kwargs):
    config = SessionConfig(condition=condition, provider_mode=provider_mode)
    return service.create_session(sample_brief(), config, **kwargs)


class CommandDriver:
    """Random but reproducible command sequences against a live session.

    Used by the service property tests and the acceptance palette suite: after
    every command the caller can check fold equality, palette validity, and the
    deterministic prompt contract.
    """

    MUTATORS = (
        "toggle",
        "add_tag",
        "remove_tag",
        "add_dimension",
        "remove_dimension",
        "reorder",
        "edit_prompt",
        "submit",
        "like",
        "unlike",
        "reveal",
        "clear_highlights",
    )

    def __init__(self, service, session, rng: random.Random):
        self.service = service
        self.session = session
        self.rng = rng
        self._counter = 0

    def _tag_ids(self):
        return [t.id for d in self.session.palette.dimensions for t in d.tags]

    def _image_ids(self):
        return [img.id for it in self.session.iterations for img in it.images]

    def step(self) -> str | None:
        """Run one random applicable command; returns the command name."""
        session = self.session
        candidates = ["edit_prompt", "add_dimension"]
        if self._tag_ids():
            candidates += ["toggle", "toggle", "toggle", "remove_tag"]
        if session.palette.dimensions:
            candidates += ["add_tag", "reorder", "clear_highlights"]
            if len(session.palette.dimensions) > 1:
                candidates.append("remove_dimension")
        if session.prompt.text.strip():
            candidates.append("submit")
        if self._image_ids():
            candidates += ["like", "unlike", "reveal"]
        command = self.rng.choice(candidates)
        self._counter += 1
        svc, sid = self.service, session.id
        if command == "toggle":
            svc.toggle_tag_and_update(sid, self.rng.choice(self._tag_ids()))
        elif command == "add_tag":
            dim = self.rng.choice(session.palette.dimensions)
            svc.add_tag(sid, dim.id, f"tag{self._counter}x")
        elif command == "remove_tag":
            svc.remove_tag(sid, self.rng.choice(self._tag_ids()))
        elif command == "add_dimension":
            svc.add_dimension(sid, f"Dim{self._counter}x", [f"seed{self._counter}a"])
        elif command == "remove_dimension":
            svc.remove_dimension(sid, self.rng.choice(session.palette.dimensions).id)
        elif command == "reorder":
            order = [d.id for d in session.palette.dimensions]
            self.rng.shuffle(order)
            svc.reorder_dimensions(sid, order)
        elif command == "edit_prompt":
            svc.edit_prompt(sid, f"a dining chair sketch {self._counter}")
        elif command == "submit":
            svc.submit_prompt(sid)
        elif command == "like":
            svc.like_image(sid, self.rng.choice(self._image_ids()))
        elif command == "unlike":
            svc.unlike_image(sid, self.rng.choice(self._image_ids()))
        elif command == "reveal":
            svc.reveal_info(sid, self.rng.choice(self._image_ids()))
        elif command == "clear_highlights":
            svc.clear_highlights(sid)
        return command
