import { ApiClient, SessionState } from "../src/api.js";

export function makeSession(overrides: Partial<SessionState> = {}): SessionState {
  return {
    id: "session-test",
    config: { condition: "scaffolded", imagesPerIteration: 3, providerMode: "deterministic" },
    palette: {
      revision: 1,
      dimensions: [
        {
          id: "dim-4",
          name: "Aesthetic",
          ordinal: 0,
          origin: "seed",
          tags: [
            { id: "tag-1", label: "minimalist", weight: 0, origin: "seed", highlight: "none" },
            { id: "tag-2", label: "contemporary", weight: 1, origin: "seed", highlight: "none" },
            { id: "tag-3", label: "sculptural", weight: 0, origin: "extracted", highlight: "new-suggested" },
          ],
        },
        {
          id: "dim-8",
          name: "Sustainability",
          ordinal: 1,
          origin: "seed",
          tags: [
            { id: "tag-5", label: "eco-friendly", weight: 0, origin: "seed", highlight: "existing-match" },
            { id: "tag-6", label: "natural wood", weight: 0, origin: "seed", highlight: "none" },
            { id: "tag-7", label: "recycled", weight: 0, origin: "seed", highlight: "none" },
          ],
        },
      ],
    },
    prompt: { text: "Server prompt text.", manuallyEdited: false, revision: 2 },
    iterations: [
      {
        index: 1,
        latencyMs: 12,
        images: [
          { id: "img-1", contentRef: "images/img-1.png", prompt: "p", liked: true, createdAt: 1 },
          { id: "img-2", contentRef: "images/img-2.png", prompt: "p", liked: false, createdAt: 1 },
          { id: "img-3", contentRef: "images/img-3.png", prompt: "p", liked: false, createdAt: 1 },
        ],
      },
    ],
    favorites: ["img-1"],
    finalSelection: null,
    ...overrides,
  };
}

/** Duck-typed ApiClient stub: every method resolves from the queues below. */
export class FakeApi {
  session: SessionState;
  calls: string[] = [];

  constructor(session: SessionState) {
    this.session = session;
  }

  imageUrl(imageId: string): string {
    return `/images/${imageId}`;
  }

  async getSession(): Promise<SessionState> {
    this.calls.push("getSession");
    return structuredClone(this.session);
  }

  async toggleTag(_sessionId: string, tagId: string) {
    this.calls.push(`toggleTag:${tagId}`);
    const palette = this.session.palette;
    for (const dim of palette.dimensions) {
      for (const tag of dim.tags) {
        if (tag.id === tagId) {
          tag.weight = 1 - tag.weight;
          this.session.prompt = {
            ...this.session.prompt,
            text: `Server prompt after ${tag.label}=${tag.weight}.`,
            revision: this.session.prompt.revision + 1,
          };
        }
      }
    }
    return { palette, prompt: this.session.prompt };
  }

  async likeImage(_sessionId: string, imageId: string) {
    this.calls.push(`like:${imageId}`);
    if (!this.session.favorites.includes(imageId)) this.session.favorites.push(imageId);
    return { favorites: [...this.session.favorites] };
  }

  async unlikeImage(_sessionId: string, imageId: string) {
    this.calls.push(`unlike:${imageId}`);
    this.session.favorites = this.session.favorites.filter((id) => id !== imageId);
    return { favorites: [...this.session.favorites] };
  }

  async submitPrompt() {
    this.calls.push("submit");
    return this.session.iterations[0];
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}
