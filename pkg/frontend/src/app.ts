// Dashboard wiring: one session per tab. Polls GET state, renders the
// scene and teach panel, and maps every button onto exactly one API call.

import { ApiClient, ApiError } from "./api.js";
import { drawCurve } from "./curve.js";
import { buildFrames, curvePoints, parseSessionLog, summarize } from "./replay.js";
import { renderScene } from "./scene.js";
import type { Frame } from "./replay.js";
import type { SessionState } from "./types.js";

const TEMPLATE_CHIPS = [
  "Yes.",
  "No, object a is too wide to grasp.",
  "No, you are not holding object a.",
  "No, there is something on object b.",
  "The goal is not reached: object a is not on object b.",
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class Dashboard {
  private api = new ApiClient();
  private sessionId: string | null = null;
  private busy = false;
  private timer: number | null = null;

  start(): void {
    el<HTMLButtonElement>("create").onclick = () => this.createSession();
    el<HTMLButtonElement>("set-goal").onclick = () => this.setGoal();
    el<HTMLButtonElement>("advance").onclick = () => this.advance();
    el<HTMLButtonElement>("approve").onclick = () => this.approve();
    el<HTMLButtonElement>("reject").onclick = () => this.reject();
    el<HTMLButtonElement>("download").onclick = () => this.download();
    el<HTMLInputElement>("replay-file").onchange = (e) =>
      this.loadReplay(e.target as HTMLInputElement);
    el<HTMLInputElement>("replay-slider").oninput = () => this.showReplayFrame();
    const chips = el<HTMLDivElement>("chips");
    for (const text of TEMPLATE_CHIPS) {
      const chip = document.createElement("button");
      chip.className = "chip";
      chip.textContent = text;
      chip.onclick = () => {
        el<HTMLTextAreaElement>("explanation").value = text;
      };
      chips.appendChild(chip);
    }
  }

  private async guard(work: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await work();
      this.setError("");
    } catch (e) {
      if (e instanceof ApiError && e.status === 409) {
        this.setError("waiting for your feedback");
      } else {
        this.setError(String(e instanceof Error ? e.message : e));
      }
    } finally {
      this.busy = false;
    }
  }

  private setError(text: string): void {
    el("error").textContent = text;
  }

  private async createSession(): Promise<void> {
    await this.guard(async () => {
      const domain = el<HTMLSelectElement>("domain").value;
      const teacher = el<HTMLSelectElement>("teacher").value;
      const seed = Number(el<HTMLInputElement>("seed").value) || 0;
      const { id } = await this.api.createSession(domain, teacher, seed);
      this.sessionId = id;
      el("session-id").textContent = id;
      if (this.timer !== null) window.clearInterval(this.timer);
      this.timer = window.setInterval(() => this.refresh(), 1500);
      await this.refresh();
    });
  }

  private async refresh(): Promise<void> {
    if (!this.sessionId) return;
    const state = await this.api.getState(this.sessionId);
    this.render(state);
    const log = await this.api.fetchLog(this.sessionId);
    const frames = buildFrames(parseSessionLog(log));
    const canvas = el<HTMLCanvasElement>("curve");
    drawCurve(canvas.getContext("2d")!, curvePoints(frames), canvas.width, canvas.height);
  }

  private render(state: SessionState): void {
    el("status").textContent = state.status;
    el("step").textContent = `episode ${state.episode}, step ${state.step}`;
    el("goal-text").textContent = state.goal_text ?? "";
    const proposal = state.pending_proposal;
    el("proposal").textContent = proposal
      ? proposal.kind === "declare_success"
        ? "agent declares: goal achieved"
        : `agent proposes: ${proposal.action}`
      : "";
    const awaiting = state.status === "awaiting_feedback";
    el<HTMLButtonElement>("approve").disabled = !awaiting;
    el<HTMLButtonElement>("reject").disabled = !awaiting;
    el<HTMLTextAreaElement>("explanation").disabled = !awaiting;
    el<HTMLButtonElement>("set-goal").disabled = state.status !== "awaiting_goal";
    el<HTMLButtonElement>("advance").disabled = state.status !== "running";

    if (state.world) {
      const canvas = el<HTMLCanvasElement>("scene");
      renderScene(canvas.getContext("2d")!, state.world, {
        width: canvas.width,
        height: canvas.height,
        highlights: proposal?.args ?? [],
      });
    }
    el("symbolic").textContent = state.symbolic_state.join("\n");
    el("predicates").textContent = state.predicates
      .map((p) => `# ${p.description}\n${p.source}`)
      .join("\n\n");
    el("operators").textContent = state.operators;
    el("ledger").textContent = JSON.stringify(state.ledger, null, 2);
  }

  private async setGoal(): Promise<void> {
    await this.guard(async () => {
      if (!this.sessionId) return;
      await this.api.setGoal(this.sessionId, el<HTMLInputElement>("goal").value);
      await this.refresh();
    });
  }

  private async advance(): Promise<void> {
    await this.guard(async () => {
      if (!this.sessionId) return;
      await this.api.advance(this.sessionId);
      await this.refresh();
    });
  }

  private async approve(): Promise<void> {
    await this.guard(async () => {
      if (!this.sessionId) return;
      await this.api.approve(this.sessionId);
      await this.refresh();
    });
  }

  private async reject(): Promise<void> {
    await this.guard(async () => {
      if (!this.sessionId) return;
      const text = el<HTMLTextAreaElement>("explanation").value;
      await this.api.reject(this.sessionId, text);
      el<HTMLTextAreaElement>("explanation").value = "";
      await this.refresh();
    });
  }

  private download(): void {
    if (this.sessionId) {
      window.location.href = this.api.bundleUrl(this.sessionId);
    }
  }

  // -- replay ---------------------------------------------------------------

  private replayFrames: Frame[] = [];

  private loadReplay(input: HTMLInputElement): void {
    const file = input.files?.[0];
    if (!file) return;
    file.text().then((text) => {
      try {
        this.replayFrames = buildFrames(parseSessionLog(text));
      } catch (e) {
        this.setError(String(e instanceof Error ? e.message : e));
        return;
      }
      const slider = el<HTMLInputElement>("replay-slider");
      slider.max = String(Math.max(0, this.replayFrames.length - 1));
      slider.value = "0";
      const s = summarize(this.replayFrames);
      el("replay-summary").textContent =
        `${s.frames} frames, ${s.episodes} episodes, ` +
        `${s.finalPredicates} predicates, ${s.finalOperators} operators`;
      this.showReplayFrame();
    });
  }

  private showReplayFrame(): void {
    const index = Number(el<HTMLInputElement>("replay-slider").value);
    const frame = this.replayFrames[index];
    if (!frame) return;
    const mark = frame.operatorFirstSeen ? " [new operator]" : "";
    el("replay-frame").textContent =
      `#${frame.index} step ${frame.step} ${frame.event.type}${mark}  ` +
      `predicates=${frame.predicates} operators=${frame.operators}\n` +
      JSON.stringify(frame.event.payload, null, 2);
    const canvas = el<HTMLCanvasElement>("replay-curve");
    drawCurve(
      canvas.getContext("2d")!,
      curvePoints(this.replayFrames.slice(0, index + 1)),
      canvas.width,
      canvas.height,
    );
  }
}

new Dashboard().start();
