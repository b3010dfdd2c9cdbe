import { ApiClient } from "./api";
import { drawHeatmap, renderHeatmap } from "./heatmap";
import { buildMatchStrip } from "./inspect";
import {
  applyReselect,
  applySession,
  initialState,
  metricsReadout,
  sliderRange,
  type ViewState,
} from "./state";
import { ThresholdSlider } from "./slider";
import type { MatrixKind, MatrixPayload } from "./types";

const MAX_CELLS_PER_FETCH = 250_000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export class ExplorerApp {
  readonly state: ViewState = initialState();
  private matrixCache = new Map<string, MatrixPayload>();
  private slider!: ThresholdSlider;

  constructor(private readonly api: ApiClient = new ApiClient()) {}

  async start(): Promise<void> {
    const session = await this.api.session();
    applySession(this.state, session);
    this.slider = new ThresholdSlider(this.api, this.state, () => this.renderAll());

    el<HTMLSelectElement>("matrix-kind").addEventListener("change", (ev) => {
      this.state.matrixKind = (ev.target as HTMLSelectElement).value as MatrixKind;
      void this.renderMatrix();
    });
    const sliderInput = el<HTMLInputElement>("threshold");
    sliderInput.addEventListener("input", () => {
      el("threshold-value").textContent = sliderInput.value;
      this.slider.change(Number(sliderInput.value));
    });
    el<HTMLSelectElement>("selection-method").addEventListener("change", async (ev) => {
      const method = (ev.target as HTMLSelectElement).value as
        | "score_threshold"
        | "windowed_uniqueness";
      const resp = await this.api.reselect({ method });
      applyReselect(this.state, resp);
      this.configureSlider();
      this.renderAll();
    });
    el<HTMLInputElement>("query-pick").addEventListener("change", (ev) => {
      const q = Number((ev.target as HTMLInputElement).value);
      void this.inspect(q);
    });

    // initial selection state comes from the session; one reselect primes the
    // match list with the same parameters
    const resp = await this.api.reselect({});
    applyReselect(this.state, resp);
    this.configureSlider();
    await this.renderMatrix();
    this.renderAll();
  }

  private configureSlider(): void {
    const [lo, hi] = sliderRange(this.state);
    const input = el<HTMLInputElement>("threshold");
    input.min = String(lo);
    input.max = String(hi);
    input.step = String((hi - lo) / 200 || 0.01);
    const sel = this.state.selection;
    const current = sel?.method === "windowed_uniqueness" ? sel.mu : sel?.lambda ?? 0;
    input.value = String(current);
    el("threshold-value").textContent = input.value;
  }

  private matrixFetchPlan(): { downsample: number } {
    const session = this.state.session;
    if (!session) return { downsample: 1 };
    const cells = session.n * session.m;
    return { downsample: Math.max(1, Math.ceil(Math.sqrt(cells / MAX_CELLS_PER_FETCH))) };
  }

  async renderMatrix(): Promise<void> {
    const kind = this.state.matrixKind;
    const { downsample } = this.matrixFetchPlan();
    const key = `${kind}:${downsample}`;
    let payload = this.matrixCache.get(key);
    if (!payload) {
      payload = await this.api.matrix(kind, downsample);
      this.matrixCache.set(key, payload);
    }
    const accepted = this.state.matches.filter((m) => m.accepted);
    const result = renderHeatmap(payload, this.state.clip, accepted);
    drawHeatmap(el<HTMLCanvasElement>("heatmap"), result);
  }

  private renderMetrics(): void {
    el("metrics").textContent = metricsReadout(this.state.metrics);
    el("accepted-count").textContent = `${this.state.acceptedCount} accepted`;
    el("stale-badge").style.display = this.state.stale ? "inline" : "none";
  }

  private renderMatchList(): void {
    const list = el<HTMLTableSectionElement>("match-rows");
    list.innerHTML = "";
    for (const m of this.state.matches.filter((x) => x.accepted).slice(0, 500)) {
      const row = document.createElement("tr");
      row.innerHTML = `<td>${m.query}</td><td>${m.reference}</td><td>${m.strength.toFixed(4)}</td>`;
      row.addEventListener("click", () => void this.inspect(m.query));
      list.appendChild(row);
    }
  }

  renderAll(): void {
    this.renderMetrics();
    this.renderMatchList();
    void this.renderMatrix();
  }

  async inspect(query: number): Promise<void> {
    this.state.selectedQuery = query;
    const detail = await this.api.matchDetail(query, 2);
    const strip = buildMatchStrip(detail, this.api);
    const panel = el("inspector");
    panel.innerHTML = "";
    const badge = document.createElement("div");
    badge.className = "badge";
    badge.textContent =
      strip.accepted === null ? "no proposal" : strip.accepted ? "accepted" : "rejected";
    panel.appendChild(badge);
    const strips = document.createElement("div");
    strips.className = "strip";
    for (const pair of strip.pairs) {
      const cell = document.createElement("div");
      const qImg = document.createElement("img");
      qImg.src = pair.queryUrl;
      qImg.title = `query ${pair.queryIndex}`;
      cell.appendChild(qImg);
      if (pair.referenceUrl) {
        const rImg = document.createElement("img");
        rImg.src = pair.referenceUrl;
        rImg.title = `reference ${pair.referenceIndex}`;
        cell.appendChild(rImg);
      }
      strips.appendChild(cell);
    }
    panel.appendChild(strips);
  }
}
