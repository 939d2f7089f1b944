// Hand-rolled structural validation of a loaded viz.json document.
// Returns a list of human-readable problems; empty means valid.

import type { VizTree } from "./types.js";

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

const HEX_COLOR = /^#[0-9A-Fa-f]{6}$/;

export function validateVizTree(data: unknown): string[] {
  const errors: string[] = [];
  if (!isObject(data)) {
    return ["document must be a JSON object"];
  }
  if (!Array.isArray(data.authors)) {
    return ["document must have an 'authors' array"];
  }
  data.authors.forEach((author, i) => {
    const where = `authors[${i}]`;
    if (!isObject(author)) {
      errors.push(`${where} must be an object`);
      return;
    }
    if (typeof author.name !== "string") errors.push(`${where}.name must be a string`);
    if (typeof author.has_rationale !== "boolean") {
      errors.push(`${where}.has_rationale must be a boolean`);
    }
    if (!Array.isArray(author.commits)) {
      errors.push(`${where}.commits must be an array`);
      return;
    }
    author.commits.forEach((commit, j) => {
      const cwhere = `${where}.commits[${j}]`;
      if (!isObject(commit)) {
        errors.push(`${cwhere} must be an object`);
        return;
      }
      if (typeof commit.short_id !== "string") errors.push(`${cwhere}.short_id must be a string`);
      if (typeof commit.hash !== "string") errors.push(`${cwhere}.hash must be a string`);
      if (typeof commit.has_rationale !== "boolean") {
        errors.push(`${cwhere}.has_rationale must be a boolean`);
      }
      if (!Array.isArray(commit.sentences)) {
        errors.push(`${cwhere}.sentences must be an array`);
        return;
      }
      commit.sentences.forEach((leaf, k) => {
        const lwhere = `${cwhere}.sentences[${k}]`;
        if (!isObject(leaf)) {
          errors.push(`${lwhere} must be an object`);
          return;
        }
        if (typeof leaf.order !== "number") errors.push(`${lwhere}.order must be a number`);
        if (typeof leaf.text !== "string") errors.push(`${lwhere}.text must be a string`);
        if (!Array.isArray(leaf.labels) || leaf.labels.some((l) => typeof l !== "string")) {
          errors.push(`${lwhere}.labels must be an array of strings`);
        }
        if (typeof leaf.color !== "string" || !HEX_COLOR.test(leaf.color)) {
          errors.push(`${lwhere}.color must be a #RRGGBB string`);
        }
      });
    });
  });
  return errors;
}

export function parseVizTree(data: unknown): VizTree {
  const errors = validateVizTree(data);
  if (errors.length > 0) {
    throw new Error(`invalid viz tree: ${errors[0]}${errors.length > 1 ? ` (+${errors.length - 1} more)` : ""}`);
  }
  return data as unknown as VizTree;
}
