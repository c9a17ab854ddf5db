// DOM rendering for the two panels. Rendering is a pure function of ViewState:
// the prompt box always shows the server's text verbatim (no client-side
// prompt synthesis), and every mutating control disables while a command is
// in flight.

import { ApiClient, Dimension, SessionState, StyleTag } from "./api.js";
import { ViewState } from "./state.js";

export interface Actions {
  toggleTag(tagId: string): void;
  removeTag(tagId: string): void;
  addTag(dimensionId: string, label: string): void;
  removeDimension(dimensionId: string): void;
  addDimension(name: string): void;
  editPrompt(text: string): void;
  submitPrompt(): void;
  likeImage(imageId: string, liked: boolean): void;
  revealInfo(imageId: string): void;
  clearHighlights(): void;
  setFilter(filter: "all" | "favorites"): void;
  setZoom(imageId: string | null): void;
  selectFinal(imageId: string): void;
  requestTagIdeas(dimensionId: string): void;
  requestDimensionIdeas(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function tagChipClass(tag: StyleTag): string {
  const classes = ["tag-chip"];
  if (tag.weight === 1) classes.push("active");
  if (tag.highlight === "existing-match") classes.push("match");
  if (tag.highlight === "new-suggested") classes.push("suggested");
  return classes.join(" ");
}

function renderTag(tag: StyleTag, actions: Actions, disabled: boolean): HTMLElement {
  const chip = el("span", tagChipClass(tag));
  chip.dataset.tagId = tag.id;
  const toggle = el("button", "tag-toggle", tag.label);
  toggle.disabled = disabled;
  toggle.addEventListener("click", () => actions.toggleTag(tag.id));
  const remove = el("button", "tag-remove", "×");
  remove.title = "delete tag";
  remove.disabled = disabled;
  remove.addEventListener("click", () => actions.removeTag(tag.id));
  chip.append(toggle, remove);
  return chip;
}

function renderDimensionRow(
  dimension: Dimension,
  actions: Actions,
  disabled: boolean,
): HTMLElement {
  const row = el("div", "dimension-row");
  row.dataset.dimensionId = dimension.id;
  const header = el("div", "dimension-header");
  header.append(el("span", "dimension-name", dimension.name));
  const removeButton = el("button", "dimension-remove", "remove row");
  removeButton.disabled = disabled;
  removeButton.addEventListener("click", () => actions.removeDimension(dimension.id));
  header.append(removeButton);
  row.append(header);

  const tags = el("div", "tag-list");
  for (const tag of dimension.tags) tags.append(renderTag(tag, actions, disabled));

  const addForm = el("span", "add-tag");
  const input = el("input", "add-tag-input") as HTMLInputElement;
  input.placeholder = "new tag";
  input.disabled = disabled;
  const addButton = el("button", "add-tag-button", "+ tag");
  addButton.disabled = disabled;
  addButton.addEventListener("click", () => {
    if (input.value.trim()) actions.addTag(dimension.id, input.value.trim());
  });
  const ideas = el("button", "tag-ideas-button", "ideas");
  ideas.title = "suggest five options";
  ideas.disabled = disabled;
  ideas.addEventListener("click", () => actions.requestTagIdeas(dimension.id));
  addForm.append(input, addButton, ideas);
  tags.append(addForm);
  row.append(tags);
  return row;
}

export function renderDesignPanel(root: HTMLElement, state: ViewState, actions: Actions): void {
  root.textContent = "";
  const session = state.session;
  if (!session) return;
  const disabled = state.pendingCommand || session.finalSelection !== null;

  const promptBox = el("div", "prompt-box");
  const textarea = el("textarea", "prompt-input") as HTMLTextAreaElement;
  textarea.value = session.prompt.text; // server text, verbatim
  textarea.disabled = disabled;
  promptBox.append(textarea);

  const controls = el("div", "prompt-controls");
  const save = el("button", "prompt-save", "Save edit");
  save.disabled = disabled;
  save.addEventListener("click", () => actions.editPrompt(textarea.value));
  const send = el("button", "prompt-send", "Send");
  send.disabled = disabled || session.prompt.text.trim() === "";
  send.addEventListener("click", () => actions.submitPrompt());
  controls.append(save, send);
  promptBox.append(controls);
  root.append(promptBox);

  if (session.config.condition === "baseline") {
    return; // baseline keeps only the prompt box: no palette, no info affordances
  }

  const palette = el("div", "dimension-palette");
  const ordered = [...session.palette.dimensions].sort((a, b) => a.ordinal - b.ordinal);
  for (const dimension of ordered) palette.append(renderDimensionRow(dimension, actions, disabled));

  const footer = el("div", "palette-footer");
  const nameInput = el("input", "add-dimension-input") as HTMLInputElement;
  nameInput.placeholder = "new dimension";
  nameInput.disabled = disabled;
  const addDim = el("button", "add-dimension-button", "+ dimension");
  addDim.disabled = disabled;
  addDim.addEventListener("click", () => {
    if (nameInput.value.trim()) actions.addDimension(nameInput.value.trim());
  });
  const dimIdeas = el("button", "dimension-ideas-button", "dimension ideas");
  dimIdeas.disabled = disabled;
  dimIdeas.addEventListener("click", () => actions.requestDimensionIdeas());
  const clear = el("button", "clear-highlights-button", "hide revealed tags");
  clear.disabled = disabled;
  clear.addEventListener("click", () => actions.clearHighlights());
  footer.append(nameInput, addDim, dimIdeas, clear);
  palette.append(footer);
  root.append(palette);
}

function renderImageCard(
  state: ViewState,
  session: SessionState,
  image: { id: string; liked: boolean },
  api: ApiClient,
  actions: Actions,
): HTMLElement {
  const disabled = state.pendingCommand || session.finalSelection !== null;
  const card = el("figure", "image-card");
  card.dataset.imageId = image.id;
  if (session.finalSelection === image.id) card.classList.add("final");

  const img = el("img", "thumbnail") as HTMLImageElement;
  img.src = api.imageUrl(image.id);
  img.alt = image.id;
  img.addEventListener("click", () => actions.setZoom(image.id));
  card.append(img);

  const bar = el("figcaption", "image-actions");
  const liked = session.favorites.includes(image.id);
  const heart = el("button", liked ? "like-button liked" : "like-button", liked ? "♥" : "♡");
  heart.title = liked ? "remove from favorites" : "add to favorites";
  heart.disabled = disabled;
  heart.addEventListener("click", () => actions.likeImage(image.id, liked));
  bar.append(heart);

  if (session.config.condition !== "baseline") {
    const info = el("button", "info-button", "i");
    info.title = "reveal tags on the palette";
    info.disabled = disabled;
    info.addEventListener("click", () => actions.revealInfo(image.id));
    bar.append(info);
  }

  if (state.filter === "favorites" && session.finalSelection === null) {
    const pick = el("button", "final-button", "select as final");
    pick.disabled = disabled;
    pick.addEventListener("click", () => actions.selectFinal(image.id));
    bar.append(pick);
  }
  card.append(bar);
  return card;
}

export function renderImagePanel(
  root: HTMLElement,
  state: ViewState,
  api: ApiClient,
  actions: Actions,
): void {
  root.textContent = "";
  const session = state.session;
  if (!session) return;

  const header = el("div", "gallery-header");
  const allButton = el("button", state.filter === "all" ? "filter-all on" : "filter-all", "All");
  allButton.addEventListener("click", () => actions.setFilter("all"));
  const favButton = el(
    "button",
    state.filter === "favorites" ? "filter-favorites on" : "filter-favorites",
    `Favorites (${session.favorites.length})`,
  );
  favButton.addEventListener("click", () => actions.setFilter("favorites"));
  header.append(allButton, favButton);
  if (session.finalSelection) {
    header.append(el("span", "final-banner", `final: ${session.finalSelection}`));
  }
  root.append(header);

  const liked = new Set(session.favorites);
  if (state.filter === "favorites") {
    const grid = el("div", "favorites-grid");
    for (const iteration of session.iterations) {
      for (const image of iteration.images) {
        if (liked.has(image.id)) grid.append(renderImageCard(state, session, image, api, actions));
      }
    }
    root.append(grid);
  } else {
    for (const iteration of [...session.iterations].reverse()) {
      const row = el("div", "iteration-row");
      row.dataset.iteration = String(iteration.index);
      row.append(el("div", "iteration-label", `iteration ${iteration.index}`));
      const strip = el("div", "iteration-images");
      for (const image of iteration.images) {
        strip.append(renderImageCard(state, session, image, api, actions));
      }
      row.append(strip);
      root.append(row);
    }
    if (session.iterations.length === 0) {
      root.append(el("p", "empty-state", "No images yet. Toggle tags and press Send."));
    }
  }
  if (state.pendingCommand) {
    root.append(el("div", "progress", "working…"));
  }

  if (state.zoomedImageId) {
    const overlay = el("div", "zoom-overlay");
    const big = el("img", "zoomed") as HTMLImageElement;
    big.src = api.imageUrl(state.zoomedImageId);
    overlay.append(big);
    overlay.addEventListener("click", () => actions.setZoom(null));
    root.append(overlay);
  }
}

export function renderErrorBanner(root: HTMLElement, state: ViewState, dismiss: () => void): void {
  root.textContent = "";
  if (!state.error) return;
  const banner = el("div", "error-banner");
  banner.append(el("code", "error-code", state.error.code));
  banner.append(el("span", "error-message", ` ${state.error.message} `));
  const close = el("button", "error-dismiss", "dismiss");
  close.addEventListener("click", dismiss);
  banner.append(close);
  root.append(banner);
}
