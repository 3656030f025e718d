/** Spawns the scoring service on a scratch copy of the bundled dataset so
 * tests can write freely; tears it down afterwards. */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { cpSync, mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

const PYTHON = process.env.FRAMEVAL_PYTHON ?? "python3";
const STATE_FILE = join(__dirname, "..", "..", ".service.json");

let child: ChildProcess | undefined;
let scratch: string | undefined;

async function waitForReady(url: string, attempts = 100): Promise<void> {
  for (let i = 0; i < attempts; i += 1) {
    try {
      const response = await fetch(`${url}/rubric`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`service at ${url} never became ready`);
}

export default async function setup(): Promise<() => void> {
  const bundled = execFileSync(
    PYTHON,
    ["-c", "from frameval.store import bundled_data_path; print(bundled_data_path())"],
    { encoding: "utf-8" },
  ).trim();

  scratch = mkdtempSync(join(tmpdir(), "frameval-workbench-"));
  const dataDir = join(scratch, "data");
  cpSync(bundled, dataDir, { recursive: true });

  child = spawn(
    PYTHON,
    ["-m", "frameval.cli", "--data-dir", dataDir, "serve", "--port", "0"],
    { stdio: ["ignore", "pipe", "inherit"] },
  );

  const url = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error("service did not announce a port")), 15000);
    child!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    child!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early with code ${code}`));
    });
  });

  await waitForReady(url);
  writeFileSync(STATE_FILE, JSON.stringify({ url, dataDir }));

  return () => {
    child?.kill();
    if (scratch) rmSync(scratch, { recursive: true, force: true });
    rmSync(STATE_FILE, { force: true });
  };
}
