// Server-sent event subscription; one open stream per table.

import type { StreamEvent } from "./types.js";

export interface StreamHandle {
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSource;

export function subscribe(
  url: string,
  onEvent: (event: StreamEvent) => void,
  onError: (detail: string) => void,
  factory: EventSourceFactory = (u) => new EventSource(u),
): StreamHandle {
  const source = factory(url);
  source.onmessage = (message: MessageEvent<string>) => {
    try {
      onEvent(JSON.parse(message.data) as StreamEvent);
    } catch {
      onError("malformed event from service");
      source.close();
    }
  };
  source.onerror = () => {
    // EventSource retries on its own; a table treats any interruption as
    // connection loss and freezes instead
    onError("connection to the table lost");
    source.close();
  };
  return { close: () => source.close() };
}
