/** Trailing-edge debounce with injectable timers so tests can drive time. */

export interface TimerHost {
  setTimeout(handler: () => void, ms: number): number;
  clearTimeout(id: number): void;
}

export const realTimers: TimerHost = {
  setTimeout: (handler, ms) => setTimeout(handler, ms) as unknown as number,
  clearTimeout: (id) => clearTimeout(id),
};

export function debounce(
  fn: () => void,
  waitMs: number,
  timers: TimerHost = realTimers,
): { call: () => void; cancel: () => void; pending: () => boolean } {
  let id: number | null = null;
  return {
    call() {
      if (id !== null) timers.clearTimeout(id);
      id = timers.setTimeout(() => {
        id = null;
        fn();
      }, waitMs);
    },
    cancel() {
      if (id !== null) {
        timers.clearTimeout(id);
        id = null;
      }
    },
    pending: () => id !== null,
  };
}
