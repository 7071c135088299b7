// JSON shapes produced by the session service. The UI renders these
// verbatim and never derives symbolic facts or feasibility on its own.

export interface WorldObject {
  name: string;
  category: string;
  center: [number, number];
  size: [number, number];
  movable: boolean;
  is_container: boolean;
  has_water: boolean;
  inside_of: string | null;
}

export interface WorldSnapshot {
  domain_id: string;
  table_height: number;
  gripper_holding: string | null;
  objects: WorldObject[];
}

export interface Proposal {
  kind: "action" | "declare_success";
  action: string | null;
  args: string[];
}

export interface PredicateView {
  name: string;
  description: string;
  source: string;
}

export interface SessionState {
  id: string;
  domain: string;
  teacher: string;
  status: "awaiting_goal" | "running" | "awaiting_feedback" | "finished";
  step: number;
  episode: number;
  episode_steps: number;
  task: unknown;
  goal_text: string | null;
  world: WorldSnapshot | null;
  symbolic_state: string[];
  pending_proposal: Proposal | null;
  last_outcome: string | null;
  predicates: PredicateView[];
  operators: string;
  ledger: unknown;
  feedback_count: number;
}

export interface LogEvent {
  step: number;
  episode: number;
  type: string;
  payload: Record<string, unknown>;
  wall_time: number;
}
