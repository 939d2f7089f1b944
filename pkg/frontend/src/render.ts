// DOM rendering. Everything is re-rendered on each state change; the trees
// involved are small enough that diffing would be overkill.
//
// Leaf colors are taken verbatim from the JSON: they land in both the
// data-color attribute (asserted byte-for-byte in tests) and the inline
// background style.

import {
  HAS_RATIONALE_COLOR,
  NO_RATIONALE_COLOR,
  type AuthorNode,
  type CommitNode,
  type SentenceLeaf,
  type VizTree,
} from "./types.js";
import {
  isAuthorExpanded,
  isCommitExpanded,
  isLeafDimmed,
  isLeafHighlighted,
  commitsVisible,
  sentencesVisible,
  type TreeState,
} from "./state.js";

export interface RenderCallbacks {
  onToggleAuthor(name: string): void;
  onToggleCommit(shortId: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  return node;
}

function marker(doc: Document, hasRationale: boolean): HTMLElement {
  const dot = el(doc, "span", "marker");
  const color = hasRationale ? HAS_RATIONALE_COLOR : NO_RATIONALE_COLOR;
  dot.setAttribute("data-color", color);
  dot.style.backgroundColor = color;
  dot.title = hasRationale ? "contains rationale" : "no rationale";
  return dot;
}

function renderLeaf(doc: Document, leaf: SentenceLeaf, state: TreeState): HTMLElement {
  const item = el(doc, "li", "sentence");
  if (isLeafDimmed(state, leaf)) {
    item.classList.add("dimmed");
  }
  if (isLeafHighlighted(state, leaf)) {
    item.classList.add("highlighted");
  }
  const chip = el(doc, "span", "leaf");
  chip.setAttribute("data-color", leaf.color);
  chip.setAttribute("data-order", String(leaf.order));
  chip.style.backgroundColor = leaf.color;
  chip.textContent = `s${leaf.order}`;
  chip.title = leaf.text; // hover shows the sentence
  const text = el(doc, "span", "sentence-text");
  text.textContent = leaf.text;
  const labels = el(doc, "span", "labels");
  labels.textContent = leaf.labels.length ? `[${leaf.labels.join(", ")}]` : "[unlabelled]";
  item.append(chip, text, labels);
  return item;
}

function renderCommit(
  doc: Document,
  author: AuthorNode,
  commit: CommitNode,
  state: TreeState,
  callbacks: RenderCallbacks,
): HTMLElement {
  const item = el(doc, "li", "commit");
  item.setAttribute("data-short-id", commit.short_id);
  const toggle = el(doc, "button", "toggle");
  toggle.textContent = isCommitExpanded(state, commit.short_id) ? "▾" : "▸";
  toggle.addEventListener("click", () => callbacks.onToggleCommit(commit.short_id));
  const label = el(doc, "span", "commit-label");
  label.append(marker(doc, commit.has_rationale));
  const name = el(doc, "span", "commit-name");
  name.textContent = commit.short_id;
  name.title = commit.hash;
  label.append(name);
  item.append(toggle, label);

  const list = el(doc, "ul", "sentences");
  for (const leaf of commit.sentences) {
    list.append(renderLeaf(doc, leaf, state));
  }
  if (!sentencesVisible(state, author.name, commit.short_id)) {
    list.hidden = true;
  }
  item.append(list);
  return item;
}

function renderAuthor(
  doc: Document,
  author: AuthorNode,
  state: TreeState,
  callbacks: RenderCallbacks,
): HTMLElement {
  const item = el(doc, "li", "author");
  item.setAttribute("data-name", author.name);
  const toggle = el(doc, "button", "toggle");
  toggle.textContent = isAuthorExpanded(state, author.name) ? "▾" : "▸";
  toggle.addEventListener("click", () => callbacks.onToggleAuthor(author.name));
  const label = el(doc, "span", "author-label");
  label.append(marker(doc, author.has_rationale));
  const name = el(doc, "span", "author-name");
  name.textContent = author.name;
  label.append(name);
  item.append(toggle, label);

  const list = el(doc, "ul", "commits");
  for (const commit of author.commits) {
    list.append(renderCommit(doc, author, commit, state, callbacks));
  }
  if (!commitsVisible(state, author.name)) {
    list.hidden = true;
  }
  item.append(list);
  return item;
}

export function renderTree(
  container: HTMLElement,
  tree: VizTree,
  state: TreeState,
  callbacks: RenderCallbacks,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (tree.authors.length === 0) {
    const empty = el(doc, "p", "placeholder");
    empty.textContent = "no data";
    container.append(empty);
    return;
  }
  const root = el(doc, "ul", "authors");
  for (const author of tree.authors) {
    root.append(renderAuthor(doc, author, state, callbacks));
  }
  container.append(root);
}

export function renderError(container: HTMLElement, message: string): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const banner = el(doc, "div", "error-banner");
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  container.append(banner);
}
