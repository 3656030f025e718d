/** Thin DOM adapter: renders the plain-data views and wires events.
 * All strings come from the view layer untouched. */

import { GridSession } from "./grid.js";
import { WhatIfSession } from "./whatif.js";

export function renderGrid(root: HTMLElement, session: GridSession,
                           onRefresh: () => void): void {
  const view = session.view();
  root.replaceChildren();

  const table = document.createElement("table");
  table.className = "grid";
  const head = table.createTHead().insertRow();
  head.insertCell().textContent = "Criteria";
  for (const label of view.columns) head.insertCell().textContent = label;

  const body = table.createTBody();
  for (const row of view.rows) {
    if (!row.visible) continue;
    const tr = body.insertRow();
    tr.className = `row-${row.kind}${row.dirty ? " dirty" : ""}`;
    const label = tr.insertCell();
    label.style.paddingLeft = `${row.depth}em`;
    if (row.kind === "dimension" || row.kind === "section") {
      const toggle = document.createElement("button");
      toggle.textContent = row.expanded ? "▾" : "▸";
      toggle.addEventListener("click", () => {
        session.toggle(row.id);
        onRefresh();
      });
      label.append(toggle, ` ${row.id} ${row.title}`);
    } else {
      label.textContent = row.kind === "total" ? row.title : `${row.id} ${row.title}`;
    }
    for (const cell of row.cells) {
      const td = tr.insertCell();
      td.textContent = cell.text;
      td.dataset.node = cell.sourceNodeId;
      td.dataset.column = cell.column;
    }
    if (row.kind === "leaf") {
      const edit = document.createElement("button");
      edit.textContent = "edit";
      edit.addEventListener("click", () => {
        session.beginEdit(row.id);
        onRefresh();
      });
      tr.insertCell().append(edit);
    }
  }
  root.append(table);

  if (view.editing) {
    const editor = document.createElement("div");
    editor.className = "editor";
    const heading = document.createElement("h3");
    heading.textContent = `Editing ${view.editing.criterionId}`;
    const picker = document.createElement("select");
    for (const point of session.pickerOptions()) {
      const option = document.createElement("option");
      option.value = String(point);
      option.textContent = String(point);
      option.selected = point === view.editing.score;
      picker.append(option);
    }
    picker.addEventListener("change", () => {
      session.setScore(Number(picker.value));
      onRefresh();
    });
    const rationale = document.createElement("textarea");
    rationale.value = view.editing.rationale;
    rationale.addEventListener("input", () => session.setRationale(rationale.value));
    const save = document.createElement("button");
    save.textContent = "save";
    save.addEventListener("click", () => {
      void session.commit().then(onRefresh);
    });
    editor.append(heading, picker, rationale, save);
    root.append(editor);
  }

  if (view.conflict) {
    const prompt = document.createElement("div");
    prompt.className = "conflict";
    const mine = view.conflict.mine;
    const theirs = view.conflict.theirs;
    prompt.append(
      Object.assign(document.createElement("p"), {
        textContent: `Conflict on ${view.conflict.criterionId}: another session committed first.`,
      }),
      Object.assign(document.createElement("p"), {
        textContent: `Yours: ${mine.score} — ${mine.rationale}`,
      }),
      Object.assign(document.createElement("p"), {
        textContent: `Theirs: ${theirs ? `${theirs.score} — ${theirs.rationale}` : "(no entry)"}`,
      }),
    );
    const retry = document.createElement("button");
    retry.textContent = "retry on top of theirs";
    retry.addEventListener("click", () => {
      void session.resolveConflict("retry").then(onRefresh);
    });
    const discard = document.createElement("button");
    discard.textContent = "discard mine";
    discard.addEventListener("click", () => {
      void session.resolveConflict("discard").then(onRefresh);
    });
    prompt.append(retry, discard);
    root.append(prompt);
  }
}

export function renderWhatIf(root: HTMLElement, sandbox: WhatIfSession,
                             onRefresh: () => void): void {
  root.replaceChildren();
  const controls = document.createElement("div");
  const preset = document.createElement("button");
  preset.textContent = "adopt best-in-class everywhere";
  preset.addEventListener("click", () => {
    void sandbox.adoptBestInClassPreset()
      .then(() => sandbox.run())
      .then(onRefresh);
  });
  const clear = document.createElement("button");
  clear.textContent = "clear sandbox";
  clear.addEventListener("click", () => {
    sandbox.clear();
    onRefresh();
  });
  controls.append(preset, clear);
  root.append(controls);

  if (!sandbox.lastResult) return;
  const panel = sandbox.panel();
  const list = document.createElement("dl");
  const add = (label: string, value: string) => {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    list.append(dt, dd);
  };
  add("overrides", String(panel.overrideCount));
  add("projected total", panel.totalDisplay);
  add("total delta", panel.totalDeltaDecimal);
  for (const dim of panel.dimensionDeltas) add(`dimension ${dim.id} delta`, dim.decimal);
  root.append(list);
}
