import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { renderError, renderTree, type RenderCallbacks } from "../src/render.js";
import { parseVizTree } from "../src/schema.js";
import { newState, setLabelFilter, toggleAuthor, toggleCommit, type TreeState } from "../src/state.js";
import { HAS_RATIONALE_COLOR, NO_RATIONALE_COLOR } from "../src/types.js";

function load(name: string) {
  return parseVizTree(
    JSON.parse(readFileSync(join(process.cwd(), "test/fixtures", name), "utf-8")),
  );
}

const tableIv = load("viz.json");
const lespinasse = load("lespinasse.json");

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="tree"></div>';
  container = document.querySelector<HTMLElement>("#tree")!;
});

function draw(tree = tableIv, state?: TreeState, callbacks?: Partial<RenderCallbacks>) {
  const s = state ?? newState(tree);
  renderTree(container, tree, s, {
    onToggleAuthor: callbacks?.onToggleAuthor ?? (() => {}),
    onToggleCommit: callbacks?.onToggleCommit ?? (() => {}),
  });
  return s;
}

describe("rendering the bundled fixture", () => {
  it("shows one author, one commit, nine leaves", () => {
    draw();
    expect(container.querySelectorAll("li.author")).toHaveLength(1);
    expect(container.querySelectorAll("li.commit")).toHaveLength(1);
    expect(container.querySelectorAll("span.leaf")).toHaveLength(9);
  });

  it("leaf colors are the palette hex values, byte for byte", () => {
    draw();
    const colors = [...container.querySelectorAll("span.leaf")].map((el) =>
      el.getAttribute("data-color"),
    );
    expect(colors).toEqual([
      "#ADD8E6",
      "#FFAE42",
      "#FFFACD",
      "#FFAE42",
      "#FFFACD",
      "#FFFACD",
      "#ADD8E6",
      "#C8A2C8",
      "#F4C2C2",
    ]);
    const used = new Set(colors);
    expect(used).toEqual(new Set(["#ADD8E6", "#FFAE42", "#FFFACD", "#C8A2C8", "#F4C2C2"]));
  });

  it("leaves expose the sentence text on hover", () => {
    draw();
    const first = container.querySelector("span.leaf")!;
    expect(first.getAttribute("title")).toBe("mm, oom: base root bonus on current usage");
  });

  it("renders an empty tree as a placeholder", () => {
    draw(parseVizTree({ authors: [] }));
    expect(container.querySelector(".placeholder")?.textContent).toBe("no data");
    expect(container.querySelectorAll("li")).toHaveLength(0);
  });
});

describe("collapse and expand", () => {
  it("collapsing an author hides commits and sentences but keeps them in the DOM", () => {
    const state = draw();
    toggleAuthor(state, "Johannes Weiner");
    draw(tableIv, state);
    expect(container.querySelector<HTMLElement>("ul.commits")!.hidden).toBe(true);
    // hidden, not removed: leaf count is unchanged
    expect(container.querySelectorAll("span.leaf")).toHaveLength(9);
  });

  it("expanding again restores previous commit states", () => {
    const state = draw(lespinasse);
    toggleCommit(state, "c2");
    toggleAuthor(state, "Michel Lespinasse");
    toggleAuthor(state, "Michel Lespinasse");
    draw(lespinasse, state);
    const commitLists = [...container.querySelectorAll<HTMLElement>("li.commit ul.sentences")];
    expect(commitLists.map((el) => el.hidden)).toEqual([false, true, false]);
  });

  it("toggle buttons dispatch the right callbacks", () => {
    const toggled: string[] = [];
    draw(tableIv, undefined, {
      onToggleAuthor: (name) => toggled.push(`author:${name}`),
      onToggleCommit: (id) => toggled.push(`commit:${id}`),
    });
    container.querySelector<HTMLButtonElement>("li.author > button.toggle")!.click();
    container.querySelector<HTMLButtonElement>("li.commit > button.toggle")!.click();
    expect(toggled).toEqual(["author:Johannes Weiner", "commit:c1"]);
  });
});

describe("markers and filters", () => {
  it("author and commit markers reflect has_rationale", () => {
    draw(lespinasse);
    const authorMarker = container.querySelector("li.author .marker")!;
    expect(authorMarker.getAttribute("data-color")).toBe(HAS_RATIONALE_COLOR);
    const commitMarkers = [
      ...container.querySelectorAll("li.commit .marker"),
    ].map((el) => el.getAttribute("data-color"));
    expect(commitMarkers).toEqual([NO_RATIONALE_COLOR, HAS_RATIONALE_COLOR, HAS_RATIONALE_COLOR]);
  });

  it("rationale filter dims the rest and highlights exactly four leaves", () => {
    const state = newState(tableIv);
    setLabelFilter(state, "Rationale");
    draw(tableIv, state);
    expect(container.querySelectorAll("li.sentence.highlighted")).toHaveLength(4);
    expect(container.querySelectorAll("li.sentence.dimmed")).toHaveLength(5);
    expect(container.querySelectorAll("li.sentence")).toHaveLength(9);
  });
});

describe("error banner", () => {
  it("replaces the view and sets an alert role", () => {
    draw();
    renderError(container, "invalid viz tree: authors[0].name must be a string");
    expect(container.querySelectorAll("li")).toHaveLength(0);
    const banner = container.querySelector(".error-banner")!;
    expect(banner.getAttribute("role")).toBe("alert");
    expect(banner.textContent).toContain("authors[0].name");
  });
});
