"""HTTP/JSON API over the session service.

Bodies are the canonical JSON forms from the core model. Errors come back as
``{"error": {"code", "message", "details"}}`` with stable machine codes.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .sessions import SessionService
from ..data import resolve_document
from ..errors import PaletteError
from ..model import DesignDocument, SessionConfig

STATUS_BY_CODE = {
    "unknown-session": 404,
    "unknown-tag": 404,
    "unknown-dimension": 404,
    "unknown-image": 404,
    "duplicate-tag": 409,
    "duplicate-dimension": 409,
    "already-finalized": 409,
    "baseline-condition-violation": 409,
    "invalid-digest": 400,
    "invalid-permutation": 400,
    "invalid-document": 400,
    "empty-prompt": 400,
    "corrupt-archive": 400,
    "content-policy-rejection": 422,
    "malformed-response": 502,
    "provider-error": 502,
    "fixture-miss": 503,
}


def error_body(exc: PaletteError) -> dict:
    return {
        "error": {
            "code": exc.code,
            "message": exc.message,
            "details": {k: v for k, v in exc.details.items() if v is not None},
        }
    }


def create_app(service: SessionService | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    service = service or SessionService()
    app = FastAPI(title="dimpalette session service")
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(PaletteError)
    async def palette_error_handler(_request: Request, exc: PaletteError):
        status = STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=error_body(exc))

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        if "document" in body and body["document"]:
            document = DesignDocument.from_json(body["document"])
        elif "documentId" in body:
            try:
                document = resolve_document(body["documentId"])
            except KeyError:
                raise PaletteError(f"no bundled document {body['documentId']!r}")
        else:
            raise PaletteError("request needs document or documentId")
        config = SessionConfig(
            condition=body.get("condition", "scaffolded"),
            images_per_iteration=int(body.get("imagesPerIteration", 3)),
            provider_mode=body.get("providerMode", "deterministic"),
            base_preamble=body.get("basePreamble", ""),
        )
        session = service.create_session(document, config)
        return session.summary_json()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.get_session(session_id).to_json()

    @app.post("/sessions/{session_id}/prompt")
    def edit_prompt(session_id: str, body: dict):
        prompt = service.edit_prompt(session_id, body.get("text", ""))
        return prompt.to_json()

    @app.post("/sessions/{session_id}/prompt/submit")
    def submit_prompt(session_id: str):
        iteration = service.submit_prompt(session_id)
        return iteration.to_json()

    @app.post("/sessions/{session_id}/palette/dimensions")
    def add_dimension(session_id: str, body: dict):
        palette = service.add_dimension(
            session_id,
            body.get("name", ""),
            body.get("tags", []),
            body.get("origin", "user"),
        )
        return palette.to_json()

    @app.delete("/sessions/{session_id}/palette/dimensions/{dimension_id}")
    def remove_dimension(session_id: str, dimension_id: str):
        return service.remove_dimension(session_id, dimension_id).to_json()

    @app.post("/sessions/{session_id}/palette/dimensions/{dimension_id}/tags")
    def add_tag(session_id: str, dimension_id: str, body: dict):
        palette = service.add_tag(
            session_id, dimension_id, body.get("label", ""), body.get("origin", "user")
        )
        return palette.to_json()

    @app.delete("/sessions/{session_id}/palette/tags/{tag_id}")
    def remove_tag(session_id: str, tag_id: str):
        return service.remove_tag(session_id, tag_id).to_json()

    @app.post("/sessions/{session_id}/palette/tags/{tag_id}/toggle")
    def toggle_tag(session_id: str, tag_id: str):
        palette, prompt = service.toggle_tag_and_update(session_id, tag_id)
        return {"palette": palette.to_json(), "prompt": prompt.to_json()}

    @app.post("/sessions/{session_id}/palette/reorder")
    def reorder(session_id: str, body: dict):
        return service.reorder_dimensions(session_id, body.get("order", [])).to_json()

    @app.post("/sessions/{session_id}/palette/highlights/clear")
    def clear_highlights(session_id: str):
        return service.clear_highlights(session_id).to_json()

    @app.post("/sessions/{session_id}/images/{image_id}/like")
    def like(session_id: str, image_id: str):
        return {"favorites": service.like_image(session_id, image_id)}

    @app.delete("/sessions/{session_id}/images/{image_id}/like")
    def unlike(session_id: str, image_id: str):
        return {"favorites": service.unlike_image(session_id, image_id)}

    @app.post("/sessions/{session_id}/images/{image_id}/reveal")
    def reveal(session_id: str, image_id: str):
        proposal = service.reveal_info(session_id, image_id)
        return {
            "proposal": proposal.to_json(),
            "palette": service.get_session(session_id).palette.to_json(),
        }

    @app.post("/sessions/{session_id}/recommendations/tags")
    def recommend_tags(session_id: str, body: dict):
        return {"labels": service.recommend_tags(session_id, body.get("dimensionId", ""))}

    @app.post("/sessions/{session_id}/recommendations/dimensions")
    def recommend_dimensions(session_id: str):
        return {"names": service.recommend_dimensions(session_id)}

    @app.post("/sessions/{session_id}/final")
    def select_final(session_id: str, body: dict):
        session = service.select_final(session_id, body.get("imageId", ""))
        return session.to_json()

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str):
        data = service.export_session(session_id)
        return Response(
            content=data,
            media_type="application/zip",
            headers={"Content-Disposition": f'attachment; filename="{session_id}.zip"'},
        )

    @app.get("/images/{image_id}")
    def image_bytes(image_id: str):
        return Response(content=service.image_bytes(image_id), media_type="image/png")

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
