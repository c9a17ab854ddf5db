"""Request builders for the six provider pipelines.

Each builder returns (payload, canonical) where payload is the wire-shaped
chat/image request and canonical is the hashable canonical form. The prompt
wording is part of the product contract; change it and recorded fixtures no
longer match.
"""

from __future__ import annotations

import json

from .calls import bytes_digest, canonical_json
from ..model import PaletteState
from ..prompting import PromptUpdateRequest

DIGEST_INSTRUCTION = (
    "Get the three most important design dimensions from the requirement doc. "
    "For each dimension, generate 3-5 tags. Be concise."
)

PROMPT_UPDATE_SYSTEM = (
    "You are a design generalist that converts design tags and weights into "
    "descriptive prompts. Your task is to update the prompt according to the "
    "given old and new tags comparison and their corresponding weights, making "
    "sure to remove any references to tags that have been removed or "
    "neutralized (weight = 0). Preserve as much of the original prompt as "
    "possible, but reflect all tag changes accurately."
)

TAG_EXTRACT_SYSTEM = (
    "You are a creative and helpful designer who assists in identifying and "
    "categorizing aesthetic dimensions of product designs. The response should "
    "be format like: {newtags:[{'name':'Dimension Name', 'tags':['tag1', "
    "'tag2', 'tag3' ... }]}"
)

TAG_EXTRACT_TEXT = (
    "What relevant aesthetic dimensions and design element tags are in this "
    "image? Reference the existing tags, think outside the box, and include "
    "all relevant dimensions. On top of the old tags, generate 1-5 new tags "
    "that either append to existing design dimensions or create new dimensions "
    "while avoiding creating similar dimensions to the old ones. Provide the "
    "output in a JSON format."
)

TAG_RECOMMEND_SYSTEM = (
    "You are a helpful assistant that provides concise five distinct design "
    "recommendations based on existing design tags for dining room chair design."
)

DIMENSION_RECOMMEND_SYSTEM = (
    "You are a helpful assistant that provides concise design recommendations "
    "based on existing design dimensions for dining room chair design."
)

AUTOCOMPLETE_SYSTEM = (
    "You are a design assistant that completes partially written product "
    "description prompts. Continue the text into a complete description and "
    "return the full prompt."
)

RETRY_SUFFIX = " Return valid JSON only."

DEFAULT_MODELS = {
    "digest": "gpt-4o",
    "promptUpdate": "gpt-4o",
    "imageGen": "dall-e-3",
    "tagExtract": "gpt-4o-mini",
    "tagRecommend": "gpt-4o-mini",
    "dimensionRecommend": "gpt-4o-mini",
    "autocomplete": "gpt-4o",
}


def _chat_payload(model: str, messages: list[dict], **options) -> dict:
    payload = {"model": model, "messages": messages}
    payload.update(options)
    return payload


def build_digest_request(model: str, title: str, body: str) -> tuple[dict, str]:
    content = f"{DIGEST_INSTRUCTION}\n\nRequirement doc ({title}):\n{body}"
    payload = _chat_payload(model, [{"role": "user", "content": content}])
    return payload, canonical_json(payload)


def tags_wire_form(tags) -> list[dict]:
    """(label, dimensionName, weight) triplets in the JSON shape sent upstream."""
    return [{"name": label, "dimension": dim, "weight": weight} for label, dim, weight in tags]


def build_prompt_update_request(model: str, request: PromptUpdateRequest) -> tuple[dict, str]:
    user = (
        f"{request.base_preamble} Update the old prompt by comparing the old and "
        "new tags and weights pairs. Any tags with a weight of 0 should be "
        "removed from the prompt. Any tags with a weight of 1 should be included "
        "in the prompt.\n"
        f"New Tags: {json.dumps(tags_wire_form(request.new_tags), ensure_ascii=False)}\n"
        f"Old Tags: {json.dumps(tags_wire_form(request.old_tags), ensure_ascii=False)}\n"
        f'Old Prompt: "{request.old_prompt}"\n'
        "Just return the prompt itself. Use complete sentences to describe the design."
    )
    payload = _chat_payload(
        model,
        [
            {"role": "system", "content": PROMPT_UPDATE_SYSTEM},
            {"role": "user", "content": user},
        ],
    )
    return payload, canonical_json(payload)


def build_image_request(
    model: str, prompt: str, n: int, size: str, quality: str
) -> tuple[dict, str]:
    payload = {"model": model, "prompt": prompt, "n": n, "size": size, "quality": quality}
    return payload, canonical_json(payload)


def palette_wire_form(palette: PaletteState) -> list[dict]:
    return [
        {"name": dim.name, "tags": [t.label for t in dim.tags]} for dim in palette.ordered()
    ]


def build_tag_extract_request(
    model: str, image_bytes: bytes, palette: PaletteState
) -> tuple[dict, str]:
    current = {"dimensions": palette_wire_form(palette)}
    text = TAG_EXTRACT_TEXT + json.dumps(current, ensure_ascii=False)
    payload = _chat_payload(
        model,
        [
            {"role": "system", "content": TAG_EXTRACT_SYSTEM},
            {
                "role": "user",
                "content": [
                    {"type": "text", "text": text},
                    {
                        "type": "image_url",
                        "image_url": {"url": f"sha256:{bytes_digest(image_bytes)}", "detail": "low"},
                    },
                ],
            },
        ],
        response_format={"type": "json_object"},
    )
    return payload, canonical_json(payload)


def build_tag_recommend_request(
    model: str, dimension_name: str, existing_labels: list[str]
) -> tuple[dict, str]:
    user = (
        f"Based on the current design tags in the category '{dimension_name}', "
        "suggest five new distinct design options. Please provide a simple list "
        "of options separated by commas and nothing else. Don't add numbers or "
        "bullet points."
        f"\nCurrent tags: {json.dumps(existing_labels, ensure_ascii=False)}"
    )
    payload = _chat_payload(
        model,
        [
            {"role": "system", "content": TAG_RECOMMEND_SYSTEM},
            {"role": "user", "content": user},
        ],
    )
    return payload, canonical_json(payload)


def build_dimension_recommend_request(model: str, dimension_names: list[str]) -> tuple[dict, str]:
    user = (
        f"Based on the current design dimensions: [{', '.join(dimension_names)}], "
        "suggest 5 new distinct dimensions. Please provide a simple list of "
        "dimensions separated by commas and nothing else. Don't add numbers or "
        "bullet points."
    )
    payload = _chat_payload(
        model,
        [
            {"role": "system", "content": DIMENSION_RECOMMEND_SYSTEM},
            {"role": "user", "content": user},
        ],
    )
    return payload, canonical_json(payload)


def build_autocomplete_request(model: str, partial: str) -> tuple[dict, str]:
    payload = _chat_payload(
        model,
        [
            {"role": "system", "content": AUTOCOMPLETE_SYSTEM},
            {"role": "user", "content": partial},
        ],
    )
    return payload, canonical_json(payload)


def with_retry_suffix(payload: dict) -> tuple[dict, str]:
    """Clone a chat payload with the JSON-only reminder appended to the user turn."""
    messages = [dict(m) for m in payload["messages"]]
    for message in reversed(messages):
        if message["role"] == "user":
            content = message["content"]
            if isinstance(content, str):
                message["content"] = content + RETRY_SUFFIX
            else:
                parts = [dict(p) for p in content]
                for part in parts:
                    if part.get("type") == "text":
                        part["text"] = part["text"] + RETRY_SUFFIX
                        break
                message["content"] = parts
            break
    retry = dict(payload)
    retry["messages"] = messages
    return retry, canonical_json(retry)
