// Typed client for the session service HTTP/JSON API. All bodies are the
// server's canonical JSON forms; errors arrive as {error: {code, message}}.

export interface StyleTag {
  id: string;
  label: string;
  weight: number;
  origin: string;
  highlight: "none" | "existing-match" | "new-suggested";
}

export interface Dimension {
  id: string;
  name: string;
  ordinal: number;
  origin: string;
  tags: StyleTag[];
}

export interface Palette {
  dimensions: Dimension[];
  revision: number;
}

export interface PromptState {
  text: string;
  manuallyEdited: boolean;
  revision: number;
}

export interface ImageRef {
  id: string;
  contentRef: string;
  prompt: string;
  liked: boolean;
  createdAt: number;
}

export interface Iteration {
  index: number;
  images: ImageRef[];
  latencyMs: number;
}

export interface SessionConfig {
  condition: "baseline" | "scaffolded";
  imagesPerIteration: number;
  providerMode: string;
}

export interface SessionState {
  id: string;
  config: SessionConfig;
  palette: Palette;
  prompt: PromptState;
  iterations: Iteration[];
  favorites: string[];
  finalSelection: string | null;
}

export interface ApiError {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}

export class ApiRequestError extends Error {
  constructor(public readonly error: ApiError, public readonly status: number) {
    super(`${error.code}: ${error.message}`);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  imageUrl(imageId: string): string {
    return `${this.baseUrl}/images/${encodeURIComponent(imageId)}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let error: ApiError = { code: "unknown-error", message: `HTTP ${response.status}` };
      try {
        const parsed = (await response.json()) as { error?: ApiError };
        if (parsed.error) error = parsed.error;
      } catch {
        // non-JSON error body; keep the fallback
      }
      throw new ApiRequestError(error, response.status);
    }
    return (await response.json()) as T;
  }

  createSession(body: {
    documentId?: string;
    document?: unknown;
    condition: string;
    providerMode?: string;
  }): Promise<{ id: string }> {
    return this.request("POST", "/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  editPrompt(sessionId: string, text: string): Promise<PromptState> {
    return this.request("POST", `/sessions/${sessionId}/prompt`, { text });
  }

  submitPrompt(sessionId: string): Promise<Iteration> {
    return this.request("POST", `/sessions/${sessionId}/prompt/submit`);
  }

  toggleTag(sessionId: string, tagId: string): Promise<{ palette: Palette; prompt: PromptState }> {
    return this.request("POST", `/sessions/${sessionId}/palette/tags/${tagId}/toggle`);
  }

  addDimension(sessionId: string, name: string, tags: string[]): Promise<Palette> {
    return this.request("POST", `/sessions/${sessionId}/palette/dimensions`, { name, tags });
  }

  removeDimension(sessionId: string, dimensionId: string): Promise<Palette> {
    return this.request("DELETE", `/sessions/${sessionId}/palette/dimensions/${dimensionId}`);
  }

  addTag(sessionId: string, dimensionId: string, label: string): Promise<Palette> {
    return this.request("POST", `/sessions/${sessionId}/palette/dimensions/${dimensionId}/tags`, {
      label,
    });
  }

  removeTag(sessionId: string, tagId: string): Promise<Palette> {
    return this.request("DELETE", `/sessions/${sessionId}/palette/tags/${tagId}`);
  }

  reorderDimensions(sessionId: string, order: string[]): Promise<Palette> {
    return this.request("POST", `/sessions/${sessionId}/palette/reorder`, { order });
  }

  clearHighlights(sessionId: string): Promise<Palette> {
    return this.request("POST", `/sessions/${sessionId}/palette/highlights/clear`);
  }

  likeImage(sessionId: string, imageId: string): Promise<{ favorites: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/images/${imageId}/like`);
  }

  unlikeImage(sessionId: string, imageId: string): Promise<{ favorites: string[] }> {
    return this.request("DELETE", `/sessions/${sessionId}/images/${imageId}/like`);
  }

  revealInfo(sessionId: string, imageId: string): Promise<{ palette: Palette }> {
    return this.request("POST", `/sessions/${sessionId}/images/${imageId}/reveal`);
  }

  recommendTags(sessionId: string, dimensionId: string): Promise<{ labels: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/recommendations/tags`, { dimensionId });
  }

  recommendDimensions(sessionId: string): Promise<{ names: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/recommendations/dimensions`);
  }

  selectFinal(sessionId: string, imageId: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${sessionId}/final`, { imageId });
  }
}
