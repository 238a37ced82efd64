// Operation-time capture: the clock starts at the first keystroke after
// idle and stops when the command is sent. Both stamps travel to the
// server, which owns the csv export.

export interface ClientStamps {
  client_input_started_at: number | null;
  client_submitted_at: number;
}

export class TimingTracker {
  private startedAt: number | null = null;

  constructor(private readonly clock: () => number = () => Date.now() / 1000) {}

  /** Call on every input event; only the first after idle sticks. */
  markInput(): void {
    if (this.startedAt === null) {
      this.startedAt = this.clock();
    }
  }

  get active(): boolean {
    return this.startedAt !== null;
  }

  /** Seconds since the first keystroke, for the live widget display. */
  elapsed(): number | null {
    return this.startedAt === null ? null : Math.max(0, this.clock() - this.startedAt);
  }

  /** Stamps for the outgoing request; resets so the next command starts
   * its own measurement. */
  consume(): ClientStamps {
    const stamps = {
      client_input_started_at: this.startedAt,
      client_submitted_at: this.clock(),
    };
    this.startedAt = null;
    return stamps;
  }
}

export interface TimingCsvRow {
  mode: string;
  commandId: string;
  seconds: number | null;
}

/** Parse /api/timings.csv (mode,command_id,operation_seconds). */
export function parseTimingsCsv(text: string): TimingCsvRow[] {
  const lines = text.trim().split(/\r?\n/);
  const rows: TimingCsvRow[] = [];
  for (const line of lines.slice(1)) {
    if (!line) continue;
    const [mode, commandId, raw] = line.split(",");
    rows.push({
      mode: mode ?? "",
      commandId: commandId ?? "",
      seconds: raw ? Number(raw) : null,
    });
  }
  return rows;
}
