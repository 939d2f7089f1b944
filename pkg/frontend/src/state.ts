// View state over a loaded tree: expand/collapse with restoration, plus
// label and author filters. The tree itself is never mutated.

import type { LabelName, SentenceLeaf, VizTree } from "./types.js";

export interface TreeState {
  // stored flags survive while an ancestor is collapsed, so re-expanding
  // restores the previous child states
  expandedAuthors: Map<string, boolean>;
  expandedCommits: Map<string, boolean>;
  labelFilter: LabelName | null;
  authorFilter: string | null;
}

export function newState(tree: VizTree): TreeState {
  const state: TreeState = {
    expandedAuthors: new Map(),
    expandedCommits: new Map(),
    labelFilter: null,
    authorFilter: null,
  };
  for (const author of tree.authors) {
    state.expandedAuthors.set(author.name, true);
    for (const commit of author.commits) {
      state.expandedCommits.set(commit.short_id, true);
    }
  }
  return state;
}

export function toggleAuthor(state: TreeState, name: string): void {
  state.expandedAuthors.set(name, !(state.expandedAuthors.get(name) ?? true));
}

export function toggleCommit(state: TreeState, shortId: string): void {
  state.expandedCommits.set(shortId, !(state.expandedCommits.get(shortId) ?? true));
}

export function setLabelFilter(state: TreeState, label: LabelName | null): void {
  state.labelFilter = label;
}

export function setAuthorFilter(state: TreeState, author: string | null): void {
  state.authorFilter = author;
}

/** Stored flag combined with the author filter: non-matching authors collapse. */
export function isAuthorExpanded(state: TreeState, name: string): boolean {
  const stored = state.expandedAuthors.get(name) ?? true;
  if (state.authorFilter !== null && name !== state.authorFilter) {
    return false;
  }
  return stored;
}

export function isCommitExpanded(state: TreeState, shortId: string): boolean {
  return state.expandedCommits.get(shortId) ?? true;
}

/** Commits are visible when their author is (effectively) expanded. */
export function commitsVisible(state: TreeState, authorName: string): boolean {
  return isAuthorExpanded(state, authorName);
}

/** Sentence leaves need both the author and their commit expanded. */
export function sentencesVisible(state: TreeState, authorName: string, shortId: string): boolean {
  return isAuthorExpanded(state, authorName) && isCommitExpanded(state, shortId);
}

/** Leaves matching the label filter are highlighted; the rest are dimmed. */
export function isLeafHighlighted(state: TreeState, leaf: SentenceLeaf): boolean {
  return state.labelFilter !== null && leaf.labels.includes(state.labelFilter);
}

export function isLeafDimmed(state: TreeState, leaf: SentenceLeaf): boolean {
  return state.labelFilter !== null && !leaf.labels.includes(state.labelFilter);
}

export function highlightedLeafCount(tree: VizTree, state: TreeState): number {
  let count = 0;
  for (const author of tree.authors) {
    for (const commit of author.commits) {
      for (const leaf of commit.sentences) {
        if (isLeafHighlighted(state, leaf)) {
          count += 1;
        }
      }
    }
  }
  return count;
}

export function leafCount(tree: VizTree): number {
  let count = 0;
  for (const author of tree.authors) {
    for (const commit of author.commits) {
      count += commit.sentences.length;
    }
  }
  return count;
}
