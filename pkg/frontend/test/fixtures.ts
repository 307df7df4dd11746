import { CompileResult, EntityItem, RouteSummary, Subgraph } from "../src/api.js";

export const COMPILED: CompileResult = {
  mdd_id: "mdd-1",
  node_count: 5,
  solution_count: 3,
  variables: [
    { name: "document", values: ["d1", "d2"] },
    { name: "mesh", values: ["M03", "M09"] },
  ],
};

export const OPEN_SUMMARY: RouteSummary = {
  session_id: "route-1",
  mdd_id: "mdd-1",
  solution_count: 3,
  trail: [],
  layers: [
    {
      name: "document",
      decided: false,
      values: [{ value: "d1", count: 2 }, { value: "d2", count: 1 }],
    },
    {
      name: "mesh",
      decided: false,
      values: [{ value: "M03", count: 2 }, { value: "M09", count: 1 }],
    },
  ],
};

export const CHOSEN_SUMMARY: RouteSummary = {
  session_id: "route-1",
  mdd_id: "mdd-1",
  solution_count: 2,
  trail: [{ layer: "document", value: "d1" }],
  layers: [
    { name: "document", decided: true, chosen: "d1" },
    {
      name: "mesh",
      decided: false,
      values: [{ value: "M03", count: 1 }, { value: "M09", count: 1 }],
    },
  ],
};

export const COMPLETE_SUMMARY: RouteSummary = {
  session_id: "route-1",
  mdd_id: "mdd-1",
  solution_count: 1,
  trail: [
    { layer: "document", value: "d1" },
    { layer: "mesh", value: "M03" },
  ],
  layers: [
    { name: "document", decided: true, chosen: "d1" },
    { name: "mesh", decided: true, chosen: "M03" },
  ],
};

export const ORIGIN: EntityItem = {
  id: 19,
  namespace: "document",
  label: "d1",
  synonyms: [],
};

export const SUBGRAPH: Subgraph = {
  namespaces: [
    { id: 0, name: "mesh", kind: "terminology" },
    { id: 2, name: "document", kind: "entity-class" },
    { id: 3, name: "author", kind: "entity-class" },
  ],
  entities: [
    { id: 19, namespace: 2, label: "d1" },
    { id: 27, namespace: 3, label: "Alice Adams" },
    { id: 28, namespace: 3, label: "Bob Byrne" },
    { id: 2, namespace: 0, label: "Alzheimer Disease" },
  ],
  relations: [
    { id: 1, source: 27, target: 19, kind: "isAuthor" },
    { id: 2, source: 28, target: 19, kind: "isAuthor" },
    { id: 3, source: 19, target: 2, kind: "hasKeyword" },
  ],
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function dataCounts(html: string): number[] {
  return [...html.matchAll(/data-count="(\d+)"/g)].map((match) => Number(match[1]));
}
