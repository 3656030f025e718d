import { readFileSync } from "node:fs";
import { join } from "node:path";

import { Client } from "../src/api.js";

export function serviceUrl(): string {
  const state = JSON.parse(
    readFileSync(join(__dirname, "..", ".service.json"), "utf-8"),
  ) as { url: string };
  return state.url;
}

export function client(): Client {
  return new Client(serviceUrl());
}

/** Raw service fetch, independent of the client under test. */
export async function rawJson<T>(path: string): Promise<T> {
  const response = await fetch(`${serviceUrl()}${path}`);
  if (!response.ok) throw new Error(`raw fetch ${path}: ${response.status}`);
  return (await response.json()) as T;
}
