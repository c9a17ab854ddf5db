import { describe, expect, it } from "vitest";

import { ApiRequestError } from "../src/api.js";
import { Store } from "../src/state.js";
import { FakeApi, makeSession } from "./helpers.js";

describe("store command loop", () => {
  it("adopts the server's exact prompt text after a toggle cycle", async () => {
    const api = new FakeApi(makeSession());
    const store = new Store(api.asClient());
    await store.load("session-test");

    const ok = await store.toggleTag("tag-1");
    expect(ok).toBe(true);
    // no client-side synthesis: text comes from the refetched session verbatim
    expect(store.current.session?.prompt.text).toBe("Server prompt after minimalist=1.");
    expect(api.calls).toEqual(["getSession", "toggleTag:tag-1", "getSession"]);
  });

  it("sets pendingCommand for the duration of a command", async () => {
    const api = new FakeApi(makeSession());
    const store = new Store(api.asClient());
    await store.load("session-test");

    const observed: boolean[] = [];
    store.subscribe((state) => observed.push(state.pendingCommand));
    await store.toggleTag("tag-2");
    expect(observed[0]).toBe(true); // flagged before the request resolves
    expect(observed[observed.length - 1]).toBe(false);
    expect(store.current.pendingCommand).toBe(false);
  });

  it("rejects overlapping commands while one is in flight", async () => {
    const api = new FakeApi(makeSession());
    const store = new Store(api.asClient());
    await store.load("session-test");

    const first = store.toggleTag("tag-1");
    const second = await store.toggleTag("tag-2");
    expect(second).toBe(false); // dropped: one in-flight mutation per view
    await first;
    expect(api.calls.filter((c) => c.startsWith("toggleTag"))).toEqual(["toggleTag:tag-1"]);
  });

  it("captures typed API errors and still refetches server truth", async () => {
    const api = new FakeApi(makeSession());
    const failing = api.asClient() as unknown as Record<string, unknown>;
    failing["toggleTag"] = async () => {
      throw new ApiRequestError({ code: "baseline-condition-violation", message: "nope" }, 409);
    };
    const store = new Store(api.asClient());
    await store.load("session-test");

    const ok = await store.toggleTag("tag-1");
    expect(ok).toBe(false);
    expect(store.current.error?.code).toBe("baseline-condition-violation");
    expect(store.current.pendingCommand).toBe(false);
    // the session was refetched after the failure
    expect(api.calls.filter((c) => c === "getSession").length).toBe(2);
  });

  it("filters visible images to exactly the liked set", async () => {
    const api = new FakeApi(makeSession());
    const store = new Store(api.asClient());
    await store.load("session-test");

    expect(store.visibleImages().map((i) => i.id)).toEqual(["img-1", "img-2", "img-3"]);
    store.setFilter("favorites");
    expect(store.visibleImages().map((i) => i.id)).toEqual(["img-1"]);

    await store.likeImage("img-3", false);
    expect(store.visibleImages().map((i) => i.id)).toEqual(["img-1", "img-3"]);
    await store.likeImage("img-1", true);
    expect(store.visibleImages().map((i) => i.id)).toEqual(["img-3"]);
  });
});
