/** Replay recorded server interactions through a faked fetch. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

export const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export interface Interaction {
  name: string;
  method: string;
  path: string;
  query: Record<string, string> | null;
  body: unknown;
  body_file: string | null;
  status: number;
  content_type: string;
  file: string;
}

export const manifest: Interaction[] = JSON.parse(fixture("manifest.json"));

export function byName(name: string): Interaction {
  const found = manifest.find((it) => it.name === name);
  if (!found) throw new Error(`no interaction named ${name}`);
  return found;
}

function deepEqual(a: unknown, b: unknown): boolean {
  if (a === b) return true;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((v, i) => deepEqual(v, b[i]));
  }
  if (a !== null && b !== null && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    const kb = Object.keys(b as object).sort();
    return (
      deepEqual(ka, kb) &&
      ka.every((k) => deepEqual((a as Record<string, unknown>)[k], (b as Record<string, unknown>)[k]))
    );
  }
  return false;
}

export class FakeFetch {
  calls: { method: string; url: string; body: string | null }[] = [];
  private holds = new Set<string>();
  private waiters = new Map<string, (() => void)[]>();

  /** Delay the response for the named interaction until release() is called. */
  hold(name: string): void {
    this.holds.add(name);
  }

  release(name: string): void {
    this.holds.delete(name);
    for (const wake of this.waiters.get(name) ?? []) wake();
    this.waiters.delete(name);
  }

  private match(method: string, url: URL, body: string | null): Interaction {
    for (const it of manifest) {
      if (it.method !== method || it.path !== url.pathname) continue;
      const want = it.query ?? {};
      const got = Object.fromEntries(url.searchParams.entries());
      if (!deepEqual(want, got)) continue;
      if (it.body_file !== null) {
        if (body !== fixture(it.body_file)) continue;
      } else if (it.body !== null && it.body !== undefined) {
        if (typeof it.body === "string") {
          if (body !== it.body) continue;
        } else if (body === null || !deepEqual(JSON.parse(body), it.body)) {
          continue;
        }
      }
      return it;
    }
    throw new Error(`no recorded interaction for ${method} ${url} body=${body?.slice(0, 120)}`);
  }

  fn: FetchLike = async (rawUrl, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : null;
    this.calls.push({ method, url: rawUrl, body });
    const found = this.match(method, new URL(rawUrl, "http://fixtures"), body);
    if (this.holds.has(found.name)) {
      await new Promise<void>((resolve) => {
        this.waiters.set(found.name, [...(this.waiters.get(found.name) ?? []), resolve]);
      });
    }
    return new Response(readFileSync(join(FIXTURES, found.file)), {
      status: found.status,
      headers: { "content-type": found.content_type },
    });
  };
}
