// Server-sent-events reader over fetch streams. The service delivers the
// event log at least once in seq order; the client deduplicates by seq and
// reconnects from the last seen seq, so the view never misses or repeats
// an event.

import type { WorkshopEvent } from "./types.js";

export interface StreamOptions {
  fromSeq?: number;
  wait?: number;
  reconnect?: boolean;
  onError?: (error: unknown) => void;
}

export interface StreamHandle {
  close(): void;
  readonly lastSeq: number;
}

export function parseSseChunk(buffer: string): { events: WorkshopEvent[]; rest: string } {
  const events: WorkshopEvent[] = [];
  const frames = buffer.split("\n\n");
  const rest = frames.pop() ?? "";
  for (const frame of frames) {
    for (const line of frame.split("\n")) {
      if (line.startsWith("data: ")) {
        try {
          events.push(JSON.parse(line.slice("data: ".length)) as WorkshopEvent);
        } catch {
          // malformed frame, skip
        }
      }
    }
  }
  return { events, rest };
}

export function subscribe(
  baseUrl: string,
  workshopId: string,
  onEvent: (event: WorkshopEvent) => void,
  options: StreamOptions = {},
): StreamHandle {
  let closed = false;
  let lastSeq = options.fromSeq ?? 0;
  const wait = options.wait ?? 25;
  const controllerRef: { current: AbortController | null } = { current: null };

  const loop = async () => {
    while (!closed) {
      const controller = new AbortController();
      controllerRef.current = controller;
      try {
        const url = new URL(`${baseUrl}/workshops/${workshopId}/events`);
        url.searchParams.set("from_seq", String(lastSeq));
        url.searchParams.set("wait", String(wait));
        const response = await fetch(url, { signal: controller.signal });
        if (!response.ok || !response.body) throw new Error(`stream status ${response.status}`);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          const { events, rest } = parseSseChunk(buffer);
          buffer = rest;
          for (const event of events) {
            if (event.seq > lastSeq) {
              lastSeq = event.seq;
              onEvent(event);
            }
          }
        }
      } catch (error) {
        if (!closed) options.onError?.(error);
      }
      if (!(options.reconnect ?? true)) break;
      if (!closed) await new Promise((resolve) => setTimeout(resolve, 250));
    }
  };
  void loop();

  return {
    close() {
      closed = true;
      controllerRef.current?.abort();
    },
    get lastSeq() {
      return lastSeq;
    },
  };
}

/** One-shot catch-up read: all events past fromSeq currently in the log. */
export async function fetchBacklog(
  baseUrl: string,
  workshopId: string,
  fromSeq = 0,
): Promise<WorkshopEvent[]> {
  const url = new URL(`${baseUrl}/workshops/${workshopId}/events`);
  url.searchParams.set("from_seq", String(fromSeq));
  url.searchParams.set("wait", "0");
  const response = await fetch(url);
  const text = await response.text();
  const { events } = parseSseChunk(text.endsWith("\n\n") ? text : text + "\n\n");
  return events;
}
