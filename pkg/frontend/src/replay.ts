// Session-log playback: parse the JSONL stream into frames and fold the
// events into the cumulative learning curve. The counting rules mirror the
// server's report renderer: each registered predicate brings its negated
// partner (+2), and operators_learned events carry the full operator list.

import type { LogEvent } from "./types.js";

export class LogParseError extends Error {
  constructor(
    public line: number,
    detail: string,
  ) {
    super(`log line ${line}: ${detail}`);
  }
}

export interface Frame {
  index: number;
  step: number;
  episode: number;
  event: LogEvent;
  predicates: number; // cumulative, including negated partners
  operators: number;
  operatorFirstSeen: boolean; // marks steps where a new operator appears
}

export function parseSessionLog(text: string): LogEvent[] {
  const events: LogEvent[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (e) {
      throw new LogParseError(i + 1, String(e));
    }
    const event = parsed as LogEvent;
    if (typeof event !== "object" || event === null || typeof event.type !== "string") {
      throw new LogParseError(i + 1, "missing event type");
    }
    events.push(event);
  }
  return events;
}

export function buildFrames(events: LogEvent[]): Frame[] {
  const frames: Frame[] = [];
  let predicates = 0;
  let operators = 0;
  const seenOperators = new Set<string>();
  for (let i = 0; i < events.length; i++) {
    const event = events[i];
    let operatorFirstSeen = false;
    if (event.type === "predicate_registered") {
      predicates += 2;
    } else if (event.type === "operators_learned") {
      const names = (event.payload.names as string[]) ?? [];
      operators = names.length;
      for (const name of names) {
        if (!seenOperators.has(name)) {
          seenOperators.add(name);
          operatorFirstSeen = true;
        }
      }
    }
    frames.push({
      index: i,
      step: event.step ?? 0,
      episode: event.episode ?? 0,
      event,
      predicates,
      operators,
      operatorFirstSeen,
    });
  }
  return frames;
}

export interface ReplaySummary {
  frames: number;
  episodes: number;
  predicateRegistrations: number;
  finalPredicates: number;
  finalOperators: number;
}

export function summarize(frames: Frame[]): ReplaySummary {
  const last = frames[frames.length - 1];
  return {
    frames: frames.length,
    episodes: frames.filter((f) => f.event.type === "episode_end").length,
    predicateRegistrations: frames.filter(
      (f) => f.event.type === "predicate_registered",
    ).length,
    finalPredicates: last ? last.predicates : 0,
    finalOperators: last ? last.operators : 0,
  };
}

export function curvePoints(
  frames: Frame[],
): { step: number; predicates: number; operators: number }[] {
  let step = 0;
  return frames.map((f) => {
    step = Math.max(step, f.step);
    return { step, predicates: f.predicates, operators: f.operators };
  });
}
