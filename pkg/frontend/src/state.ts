// View state and the single command loop. The server is the only source of
// truth: every mutating command refetches the full session afterwards, and at
// most one command is in flight per view (pendingCommand mirrors the server's
// single-writer contract).

import { ApiClient, ApiError, ApiRequestError, ImageRef, SessionState } from "./api.js";

export type GalleryFilter = "all" | "favorites";

export interface ViewState {
  session: SessionState | null;
  pendingCommand: boolean;
  filter: GalleryFilter;
  zoomedImageId: string | null;
  error: ApiError | null;
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    session: null,
    pendingCommand: false,
    filter: "all",
    zoomedImageId: null,
    error: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  get current(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  async load(sessionId: string): Promise<void> {
    const session = await this.api.getSession(sessionId);
    this.set({ session, error: null });
  }

  /** Run one mutating command, then adopt the refetched server state. */
  async run(command: () => Promise<unknown>): Promise<boolean> {
    const session = this.state.session;
    if (!session || this.state.pendingCommand) return false;
    this.set({ pendingCommand: true, error: null });
    let failed: ApiError | null = null;
    try {
      await command();
    } catch (err) {
      failed = err instanceof ApiRequestError ? err.error : { code: "network-error", message: String(err) };
    }
    try {
      const fresh = await this.api.getSession(session.id);
      this.set({ session: fresh, pendingCommand: false, error: failed });
    } catch (err) {
      const refetchError =
        err instanceof ApiRequestError ? err.error : { code: "network-error", message: String(err) };
      this.set({ pendingCommand: false, error: failed ?? refetchError });
    }
    return failed === null;
  }

  sessionId(): string {
    const session = this.state.session;
    if (!session) throw new Error("no session loaded");
    return session.id;
  }

  toggleTag(tagId: string): Promise<boolean> {
    return this.run(() => this.api.toggleTag(this.sessionId(), tagId));
  }

  editPrompt(text: string): Promise<boolean> {
    return this.run(() => this.api.editPrompt(this.sessionId(), text));
  }

  submitPrompt(): Promise<boolean> {
    return this.run(() => this.api.submitPrompt(this.sessionId()));
  }

  addDimension(name: string, tags: string[]): Promise<boolean> {
    return this.run(() => this.api.addDimension(this.sessionId(), name, tags));
  }

  removeDimension(dimensionId: string): Promise<boolean> {
    return this.run(() => this.api.removeDimension(this.sessionId(), dimensionId));
  }

  addTag(dimensionId: string, label: string): Promise<boolean> {
    return this.run(() => this.api.addTag(this.sessionId(), dimensionId, label));
  }

  removeTag(tagId: string): Promise<boolean> {
    return this.run(() => this.api.removeTag(this.sessionId(), tagId));
  }

  likeImage(imageId: string, liked: boolean): Promise<boolean> {
    return this.run(() =>
      liked
        ? this.api.unlikeImage(this.sessionId(), imageId)
        : this.api.likeImage(this.sessionId(), imageId),
    );
  }

  revealInfo(imageId: string): Promise<boolean> {
    return this.run(() => this.api.revealInfo(this.sessionId(), imageId));
  }

  clearHighlights(): Promise<boolean> {
    return this.run(() => this.api.clearHighlights(this.sessionId()));
  }

  selectFinal(imageId: string): Promise<boolean> {
    return this.run(() => this.api.selectFinal(this.sessionId(), imageId));
  }

  setFilter(filter: GalleryFilter): void {
    this.set({ filter });
  }

  setZoom(imageId: string | null): void {
    this.set({ zoomedImageId: imageId });
  }

  dismissError(): void {
    this.set({ error: null });
  }

  /** Images the gallery should show under the active filter, newest last. */
  visibleImages(): ImageRef[] {
    const session = this.state.session;
    if (!session) return [];
    const all = session.iterations.flatMap((iteration) => iteration.images);
    if (this.state.filter === "favorites") {
      const liked = new Set(session.favorites);
      return all.filter((image) => liked.has(image.id));
    }
    return all;
  }
}
