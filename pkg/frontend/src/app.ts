/** DOM wiring: mounts the explorer and connects events to the
 * controller and the pure renderers. No rendering logic lives here.
 */

import { ApiClient, ApiFailure, CompileRequest, EntityItem } from "./api.js";
import { RouteController, RouteState } from "./state.js";
import {
  renderCompileSummary,
  renderContextPanel,
  renderEntityResults,
  renderError,
  renderPaths,
  renderRoute,
} from "./views.js";

const SKELETON = `
<header>
  <h1>kgdd explorer</h1>
  <div id="error"></div>
</header>
<main>
  <section>
    <h2>Compile</h2>
    <form id="compile-form">
      <label>Layer namespaces (comma separated)
        <input id="layer-input" list="namespace-options" placeholder="document, mesh">
      </label>
      <datalist id="namespace-options"></datalist>
      <label>Adjacency
        <select id="adjacency">
          <option value="consecutive">consecutive</option>
          <option value="all-pairs">all-pairs</option>
        </select>
      </label>
      <button type="submit">Compile</button>
    </form>
    <div id="compiled"></div>
  </section>
  <section>
    <h2>Route</h2>
    <div id="route"></div>
    <button id="paths-button" type="button">List solutions</button>
    <div id="paths"></div>
  </section>
  <section>
    <h2>Context</h2>
    <form id="search-form">
      <input id="search-input" placeholder="entity label">
      <button type="submit">Search</button>
    </form>
    <div id="results"></div>
    <div id="context"></div>
  </section>
</main>
`;

export function mount(root: HTMLElement, api: ApiClient): RouteController {
  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(selector: string): T => {
    const found = root.querySelector<T>(selector);
    if (!found) {
      throw new Error(`missing element ${selector}`);
    }
    return found;
  };
  const errorBox = pick<HTMLDivElement>("#error");
  const compiledBox = pick<HTMLDivElement>("#compiled");
  const routeBox = pick<HTMLDivElement>("#route");
  const pathsBox = pick<HTMLDivElement>("#paths");
  const resultsBox = pick<HTMLDivElement>("#results");
  const contextBox = pick<HTMLDivElement>("#context");
  const knownEntities = new Map<number, EntityItem>();

  const controller = new RouteController(api, (state: RouteState) => {
    errorBox.innerHTML = renderError(state.error);
    compiledBox.innerHTML = state.compiled
      ? renderCompileSummary(state.compiled, api.dotUrl(state.compiled.mdd_id))
      : "";
    routeBox.innerHTML = renderRoute(state.summary, state.deadEnds);
    routeBox.classList.toggle("busy", state.busy);
  });

  api
    .namespaces()
    .then((list) => {
      pick<HTMLDataListElement>("#namespace-options").innerHTML = list
        .map((ns) => `<option value="${ns.name}"></option>`)
        .join("");
    })
    .catch(() => {
      // the banner will surface connectivity trouble on first use
    });

  pick<HTMLFormElement>("#compile-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const names = pick<HTMLInputElement>("#layer-input")
      .value.split(",")
      .map((part) => part.trim())
      .filter((part) => part.length > 0);
    if (names.length === 0) {
      return;
    }
    const adjacency = pick<HTMLSelectElement>("#adjacency").value === "all-pairs"
      ? "all-pairs"
      : "consecutive";
    const request: CompileRequest = {
      kind: "combinations",
      layers: names.map((namespace) => ({ namespace })),
      adjacency,
    };
    pathsBox.innerHTML = "";
    void controller.compile(request);
  });

  routeBox.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLButtonElement>("button[data-action]");
    if (!button || button.disabled) {
      return;
    }
    if (button.dataset.action === "undo") {
      void controller.undo();
      return;
    }
    if (button.dataset.action === "choose" && button.dataset.layer && button.dataset.value) {
      const value = JSON.parse(button.dataset.value) as string | number;
      void controller.choose(button.dataset.layer, value);
    }
  });

  pick<HTMLButtonElement>("#paths-button").addEventListener("click", () => {
    const compiled = controller.state().compiled;
    if (!compiled) {
      return;
    }
    api
      .paths(compiled.mdd_id)
      .then((result) => {
        pathsBox.innerHTML = renderPaths(result);
      })
      .catch((err: unknown) => {
        errorBox.innerHTML = renderError(
          err instanceof ApiFailure
            ? err.error
            : { code: "InternalError", message: String(err), param: null },
        );
      });
  });

  const showContext = (origin: EntityItem): void => {
    api
      .extendedSubgraph([origin.id])
      .then((subgraph) => {
        contextBox.innerHTML = renderContextPanel(origin, subgraph);
      })
      .catch((err: unknown) => {
        if (err instanceof ApiFailure && err.status === 404) {
          contextBox.innerHTML = renderContextPanel(origin, null);
          return;
        }
        errorBox.innerHTML = renderError(
          err instanceof ApiFailure
            ? err.error
            : { code: "InternalError", message: String(err), param: null },
        );
      });
  };

  pick<HTMLFormElement>("#search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const needle = pick<HTMLInputElement>("#search-input").value.trim();
    if (!needle) {
      return;
    }
    api
      .entities({ label: needle, pageSize: 25 })
      .then((page) => {
        knownEntities.clear();
        for (const item of page.items) {
          knownEntities.set(item.id, item);
        }
        resultsBox.innerHTML = renderEntityResults(page);
      })
      .catch((err: unknown) => {
        errorBox.innerHTML = renderError(
          err instanceof ApiFailure
            ? err.error
            : { code: "InternalError", message: String(err), param: null },
        );
      });
  });

  resultsBox.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLButtonElement>("button[data-entity]");
    if (!button) {
      return;
    }
    const id = Number(button.dataset.entity);
    const origin = knownEntities.get(id) ?? { id, namespace: "", label: `entity ${id}`, synonyms: [] };
    showContext(origin);
  });

  return controller;
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    const base = new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8000";
    mount(root, new ApiClient(base));
  }
}
