// Shared test plumbing: a fetch stub that replays recorded API fixtures
// and records every request it serves.

import { ApiClient } from "../src/api";

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export function fixtureClient(
  routes: Record<string, unknown>,
): { client: ApiClient; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    calls.push({
      url,
      method,
      body: init?.body ? JSON.parse(init.body as string) : null,
    });
    const key = `${method} ${url.split("?")[0]}`;
    if (!(key in routes)) {
      return new Response(
        JSON.stringify({ code: "not_found", message: key, details: [] }),
        { status: 404 },
      );
    }
    return new Response(JSON.stringify(routes[key]), { status: 200 });
  };
  return { client: new ApiClient("", fetchFn), calls };
}

export function texts(root: HTMLElement, selector: string): string[] {
  return Array.from(root.querySelectorAll(selector)).map(
    (n) => n.textContent ?? "",
  );
}
