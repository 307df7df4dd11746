/** Pure HTML renderers.
 *
 * Counts on screen come straight off API response fields (data-count
 * carries the raw number), so tests can intercept a response and check
 * the render echoes it. The one derived figure is the context panel's
 * per-namespace group size, which restates the payload's entity list.
 */

import {
  ApiError,
  CompileResult,
  EntityItem,
  EntityPage,
  LayerValue,
  LayerView,
  PathsResult,
  RouteSummary,
  Subgraph,
} from "./api.js";
import { deadEndKey } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function attr(value: string): string {
  return `"${escapeHtml(value)}"`;
}

export function renderError(error: ApiError | null): string {
  if (!error) {
    return "";
  }
  const param = error.param ? ` [${escapeHtml(error.param)}]` : "";
  return `<div class="banner error" role="alert">${escapeHtml(error.code)}: ${escapeHtml(error.message)}${param}</div>`;
}

export function renderCompileSummary(result: CompileResult, dotUrl: string): string {
  const layers = result.variables
    .map((v) => `<li>${escapeHtml(v.name)}</li>`)
    .join("");
  return [
    `<div class="compiled" data-mdd=${attr(result.mdd_id)}>`,
    `<p>Diagram <code>${escapeHtml(result.mdd_id)}</code>:`,
    ` <strong class="solution-count" data-count="${result.solution_count}">${result.solution_count}</strong> solutions,`,
    ` <span class="node-count" data-count="${result.node_count}">${result.node_count}</span> nodes.`,
    ` <a href=${attr(dotUrl)} download>DOT</a></p>`,
    `<ol class="schema">${layers}</ol>`,
    `</div>`,
  ].join("");
}

function renderValueButton(layer: string, value: LayerValue, count: number,
                           deadEnds: ReadonlySet<string>): string {
  const dead = count === 0 || deadEnds.has(deadEndKey(layer, value));
  const classes = dead ? "value dead-end" : "value";
  const disabled = dead ? " disabled" : "";
  return [
    `<li><button class=${attr(classes)} data-action="choose"`,
    ` data-layer=${attr(layer)} data-value=${attr(JSON.stringify(value))}`,
    ` data-count="${count}"${disabled}>`,
    `${escapeHtml(String(value))} <span class="count">${count}</span>`,
    `</button></li>`,
  ].join("");
}

function renderLayer(layer: LayerView, deadEnds: ReadonlySet<string>): string {
  if (layer.decided) {
    return [
      `<div class="layer decided">`,
      `<h4>${escapeHtml(layer.name)}</h4>`,
      `<p class="chosen">${escapeHtml(String(layer.chosen))}</p>`,
      `</div>`,
    ].join("");
  }
  const values = (layer.values ?? [])
    .map((vc) => renderValueButton(layer.name, vc.value, vc.count, deadEnds))
    .join("");
  return [
    `<div class="layer open">`,
    `<h4>${escapeHtml(layer.name)}</h4>`,
    `<ul class="values">${values}</ul>`,
    `</div>`,
  ].join("");
}

export function renderRoute(summary: RouteSummary | null,
                            deadEnds: ReadonlySet<string>): string {
  if (!summary) {
    return `<p class="notice">Compile a diagram to start a route.</p>`;
  }
  const trailItems = summary.trail
    .map((step) => `<li>${escapeHtml(step.layer)} = ${escapeHtml(String(step.value))}</li>`)
    .join("");
  const undoDisabled = summary.trail.length === 0 ? " disabled" : "";
  const complete = summary.layers.length > 0 && summary.layers.every((l) => l.decided)
    ? `<p class="route-complete">Every layer is decided; this is a single satisfying assignment.</p>`
    : "";
  const layers = summary.layers.map((l) => renderLayer(l, deadEnds)).join("");
  return [
    `<div class="route" data-session=${attr(summary.session_id)}>`,
    `<p>Remaining solutions: <strong class="route-total" data-count="${summary.solution_count}">${summary.solution_count}</strong></p>`,
    `<section class="trail"><h3>Trail</h3><ol>${trailItems}</ol>`,
    `<button data-action="undo"${undoDisabled}>Undo</button></section>`,
    complete,
    `<section class="layers">${layers}</section>`,
    `</div>`,
  ].join("");
}

export function renderEntityResults(page: EntityPage): string {
  const items = page.items
    .map((ent) => [
      `<li><button data-action="context" data-entity="${ent.id}">`,
      `${escapeHtml(ent.label)} <small>${escapeHtml(ent.namespace)} #${ent.id}</small>`,
      `</button></li>`,
    ].join(""))
    .join("");
  return [
    `<p><span class="search-total" data-count="${page.total}">${page.total}</span> matches</p>`,
    `<ul class="results">${items}</ul>`,
  ].join("");
}

export function renderContextPanel(origin: EntityItem | null,
                                   subgraph: Subgraph | null): string {
  if (!origin) {
    return `<p class="notice">Select an entity to see its context.</p>`;
  }
  const header = `<h3>Context of ${escapeHtml(origin.label)} <small>#${origin.id}</small></h3>`;
  if (!subgraph) {
    return `${header}<p class="notice">No such entity on the server.</p>`;
  }
  const nsNames = new Map(subgraph.namespaces.map((ns) => [ns.id, ns.name]));
  const groups = new Map<number, string[]>();
  for (const ent of subgraph.entities) {
    if (ent.id === origin.id) {
      continue;
    }
    const bucket = groups.get(ent.namespace);
    if (bucket) {
      bucket.push(ent.label);
    } else {
      groups.set(ent.namespace, [ent.label]);
    }
  }
  if (groups.size === 0) {
    return `${header}<p class="notice">No context relations.</p>`;
  }
  const sections = [...groups.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([nsId, labels]) => [
      `<section class="group">`,
      `<h4>${escapeHtml(nsNames.get(nsId) ?? String(nsId))}`,
      ` <span class="group-count" data-count="${labels.length}">${labels.length}</span></h4>`,
      `<ul>${labels.map((l) => `<li>${escapeHtml(l)}</li>`).join("")}</ul>`,
      `</section>`,
    ].join(""))
    .join("");
  return `${header}${sections}`;
}

export function renderPaths(result: PathsResult): string {
  const rows = result.paths
    .map((assignment) => {
      const cells = Object.entries(assignment)
        .map(([name, value]) => `<td>${escapeHtml(name)}: ${escapeHtml(String(value))}</td>`)
        .join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");
  return [
    `<p><span class="path-count" data-count="${result.count}">${result.count}</span> solutions listed</p>`,
    `<table class="paths">${rows}</table>`,
  ].join("");
}
