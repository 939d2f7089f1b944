// Page wiring: load a viz.json (query-string path or file picker), keep the
// view state, re-render on every interaction.

import { parseVizTree } from "./schema.js";
import {
  highlightedLeafCount,
  newState,
  setAuthorFilter,
  setLabelFilter,
  toggleAuthor,
  toggleCommit,
  type TreeState,
} from "./state.js";
import { renderError, renderTree } from "./render.js";
import { LABEL_NAMES, type LabelName, type VizTree } from "./types.js";

let tree: VizTree | null = null;
let state: TreeState | null = null;

function container(): HTMLElement {
  return document.querySelector("#tree")!;
}

function statusLine(): HTMLElement {
  return document.querySelector("#status")!;
}

function redraw(): void {
  if (!tree || !state) {
    return;
  }
  renderTree(container(), tree, state, {
    onToggleAuthor(name) {
      toggleAuthor(state!, name);
      redraw();
    },
    onToggleCommit(shortId) {
      toggleCommit(state!, shortId);
      redraw();
    },
  });
  if (state.labelFilter) {
    statusLine().textContent =
      `${highlightedLeafCount(tree, state)} sentence(s) labelled ${state.labelFilter}`;
  } else {
    statusLine().textContent = "";
  }
}

function loadData(data: unknown): void {
  try {
    tree = parseVizTree(data);
  } catch (err) {
    tree = null;
    state = null;
    renderError(container(), err instanceof Error ? err.message : String(err));
    return;
  }
  state = newState(tree);
  redraw();
}

function wireControls(): void {
  const picker = document.querySelector<HTMLInputElement>("#file-picker")!;
  picker.addEventListener("change", async () => {
    const file = picker.files?.[0];
    if (!file) {
      return;
    }
    try {
      loadData(JSON.parse(await file.text()));
    } catch (err) {
      renderError(container(), `not valid JSON: ${err}`);
    }
  });

  const labelSelect = document.querySelector<HTMLSelectElement>("#label-filter")!;
  for (const label of LABEL_NAMES) {
    const option = document.createElement("option");
    option.value = label;
    option.textContent = label;
    labelSelect.append(option);
  }
  labelSelect.addEventListener("change", () => {
    if (state) {
      setLabelFilter(state, (labelSelect.value || null) as LabelName | null);
      redraw();
    }
  });

  const authorInput = document.querySelector<HTMLInputElement>("#author-filter")!;
  authorInput.addEventListener("input", () => {
    if (state) {
      setAuthorFilter(state, authorInput.value.trim() || null);
      redraw();
    }
  });
}

async function boot(): Promise<void> {
  wireControls();
  const params = new URLSearchParams(window.location.search);
  const path = params.get("data");
  if (!path) {
    container().textContent = "pick a viz.json file to begin";
    return;
  }
  try {
    const response = await fetch(path);
    if (!response.ok) {
      throw new Error(`${response.status} ${response.statusText}`);
    }
    loadData(await response.json());
  } catch (err) {
    renderError(container(), `could not load ${path}: ${err}`);
  }
}

boot();
