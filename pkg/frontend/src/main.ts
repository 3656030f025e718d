import { Client } from "./api.js";
import { renderGrid, renderWhatIf } from "./dom.js";
import { GridSession } from "./grid.js";
import { WhatIfSession } from "./whatif.js";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8321";

async function boot(): Promise<void> {
  const client = new Client(SERVICE_URL);
  const gridRoot = document.getElementById("grid")!;
  const whatifRoot = document.getElementById("whatif")!;
  const pickerRoot = document.getElementById("picker")!;

  const listing = await client.listAssessments();
  const select = document.createElement("select");
  for (const item of listing) {
    const option = document.createElement("option");
    option.value = item.id;
    option.textContent = item.company;
    select.append(option);
  }
  pickerRoot.append(select);

  const session = new GridSession(client);
  let sandbox: WhatIfSession | undefined;

  const refresh = (): void => {
    renderGrid(gridRoot, session, refresh);
    if (sandbox) renderWhatIf(whatifRoot, sandbox, refresh);
  };

  const open = async (id: string): Promise<void> => {
    await session.load(id);
    await session.addBestInClassColumn();
    sandbox = new WhatIfSession(client, session.rubric, id);
    refresh();
  };

  select.addEventListener("change", () => void open(select.value));
  await open(listing[0]?.id ?? "");
}

void boot();
