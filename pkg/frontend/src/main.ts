import { ApiClient, ApiError } from "./api";
import { drawChart, trainingSeries } from "./charts";
import { DemoEditor } from "./editor";
import { decodeOccupancy, type DecodedGrid } from "./grid";
import { drawPath, drawScenario, drawStroke, PATH_STYLES } from "./render";
import type { PathDoc, PathMetrics, ScenarioDoc, TrainJobDoc } from "./types";
import { ViewTransform } from "./view";

const api = new ApiClient();

interface AppState {
  scenario: ScenarioDoc | null;
  grid: DecodedGrid | null;
  view: ViewTransform | null;
  paths: PathDoc[];
  metricsBySource: Map<string, PathMetrics>;
  editor: DemoEditor | null;
  selectedModel: string | null;
  job: TrainJobDoc | null;
  status: string;
}

const state: AppState = {
  scenario: null,
  grid: null,
  view: null,
  paths: [],
  metricsBySource: new Map(),
  editor: null,
  selectedModel: null,
  job: null,
  status: "pick a scenario",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("map");
const ctx = canvas.getContext("2d")!;
const chartCanvas = el<HTMLCanvasElement>("chart");
const chartCtx = chartCanvas.getContext("2d")!;

function setStatus(text: string): void {
  state.status = text;
  el<HTMLDivElement>("status").textContent = text;
}

function redraw(): void {
  if (!state.scenario || !state.grid || !state.view) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  drawScenario(ctx, state.scenario, state.grid, state.view);
  for (const p of state.paths) drawPath(ctx, state.view, p);
  if (state.editor) {
    const s = state.editor.state();
    drawStroke(ctx, state.view, s.points, s.segmentOk);
  }
  renderReadouts();
}

function renderReadouts(): void {
  const box = el<HTMLDivElement>("readouts");
  const rows: string[] = [];
  for (const p of state.paths) {
    const style = PATH_STYLES[p.source];
    const m = state.metricsBySource.get(p.source);
    const bits = [`<b style="color:${style?.color ?? "#333"}">${p.source}</b>`, `${p.points.length} pts`];
    if (m) {
      bits.push(`len ${m.length.toFixed(2)} m`);
      if (m.homotopic !== undefined) bits.push(m.homotopic ? "homotopic ✓" : "homotopic ✗");
      if (m.dissimilarity !== undefined) bits.push(`dissim ${m.dissimilarity.toFixed(4)}`);
      bits.push(`front ${m.max_front.toFixed(2)}`);
    }
    rows.push(`<div>${bits.join(" · ")}</div>`);
  }
  box.innerHTML = rows.join("") || "<div>no paths yet</div>";
}

async function refreshScenarioList(): Promise<void> {
  const { scenarios } = await api.listScenarios();
  const list = el<HTMLSelectElement>("scenario-list");
  list.innerHTML = "";
  for (const s of scenarios) {
    const opt = document.createElement("option");
    opt.value = s.id;
    opt.textContent = `${s.id} (${s.width}x${s.height}, ${s.pedestrians} peds${s.has_demo ? ", demo" : ""})`;
    list.appendChild(opt);
  }
}

async function openScenario(id: string): Promise<void> {
  const doc = await api.getScenario(id);
  state.scenario = doc;
  state.grid = decodeOccupancy(doc);
  state.view = new ViewTransform(
    doc.width * doc.resolution,
    doc.height * doc.resolution,
    canvas.width,
    canvas.height,
  );
  state.editor = new DemoEditor(doc);
  state.metricsBySource.clear();
  const { paths } = await api.listPaths(id);
  state.paths = paths;
  setStatus(`scenario ${id}`);
  redraw();
}

function canvasPoint(ev: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return state.view!.toMap({ x: ev.clientX - rect.left, y: ev.clientY - rect.top });
}

function wireEditor(): void {
  canvas.addEventListener("pointerdown", (ev) => {
    if (!state.editor || !state.view) return;
    state.editor.begin();
    state.editor.extend(canvasPoint(ev));
    redraw();
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!state.editor?.drawing) return;
    state.editor.extend(canvasPoint(ev));
    updateSubmitButton();
    redraw();
  });
  canvas.addEventListener("pointerup", () => {
    state.editor?.finish();
    updateSubmitButton();
    redraw();
  });
  el<HTMLButtonElement>("clear-demo").addEventListener("click", () => {
    state.editor?.clear();
    updateSubmitButton();
    redraw();
  });
  el<HTMLButtonElement>("submit-demo").addEventListener("click", submitDemo);
}

function updateSubmitButton(): void {
  el<HTMLButtonElement>("submit-demo").disabled = !(state.editor?.isValid() ?? false);
}

async function submitDemo(): Promise<void> {
  if (!state.scenario || !state.editor) return;
  const points = state.editor.submission();
  if (!points) return;
  try {
    const resp = await api.submitDemo(state.scenario.id, points);
    const snaps = [resp.snapped.start ? "start snapped" : "", resp.snapped.end ? "end snapped" : ""]
      .filter(Boolean)
      .join(", ");
    setStatus(`demo stored (${resp.path.points.length} pts${snaps ? ", " + snaps : ""})`);
    state.editor.clear();
    const { paths } = await api.listPaths(state.scenario.id);
    state.paths = paths;
    redraw();
  } catch (err) {
    if (err instanceof ApiError) setStatus(`demo rejected: ${err.message}`);
    else throw err;
  }
  updateSubmitButton();
}

function wirePlanners(): void {
  for (const planner of ["rrt", "rrtstar", "ganrrtstar"] as const) {
    el<HTMLButtonElement>(`plan-${planner}`).addEventListener("click", async () => {
      if (!state.scenario) return;
      const seedText = el<HTMLInputElement>("seed").value;
      const options: { model?: string; seed?: number } = {};
      if (seedText.trim() !== "") options.seed = Number(seedText);
      if (planner === "ganrrtstar") {
        if (!state.selectedModel) {
          setStatus("pick a model for the learned planner first");
          return;
        }
        options.model = state.selectedModel;
      }
      setStatus(`planning with ${planner}...`);
      try {
        const resp = await api.plan(state.scenario.id, planner, options);
        state.metricsBySource.set(resp.path.source, resp.metrics);
        state.paths = state.paths.filter((p) => p.source !== resp.path.source).concat([resp.path]);
        setStatus(`planned ${resp.path.source} (${resp.metrics.length.toFixed(2)} m)`);
        redraw();
      } catch (err) {
        if (err instanceof ApiError) setStatus(`planner failed: ${err.message}`);
        else throw err;
      }
    });
  }
}

async function refreshModels(): Promise<void> {
  const { models } = await api.listModels();
  const list = el<HTMLSelectElement>("model-list");
  list.innerHTML = "";
  for (const m of models) {
    const opt = document.createElement("option");
    opt.value = m;
    opt.textContent = m;
    list.appendChild(opt);
  }
  const best = models.filter((m) => m.endsWith("best.json"));
  state.selectedModel = best[best.length - 1] ?? models[models.length - 1] ?? null;
  if (state.selectedModel) list.value = state.selectedModel;
}

function wireTraining(): void {
  el<HTMLSelectElement>("model-list").addEventListener("change", (ev) => {
    state.selectedModel = (ev.target as HTMLSelectElement).value;
  });
  el<HTMLButtonElement>("start-training").addEventListener("click", async () => {
    try {
      const { id } = await api.startTraining({});
      setStatus(`training job ${id} started`);
      pollTraining(id);
    } catch (err) {
      if (err instanceof ApiError) setStatus(`training not started: ${err.message}`);
      else throw err;
    }
  });
  el<HTMLButtonElement>("cancel-training").addEventListener("click", async () => {
    if (state.job) await api.cancelTraining(state.job.id);
  });
}

function pollTraining(jobId: string): void {
  const tick = async () => {
    const job = await api.trainStatus(jobId);
    state.job = job;
    el<HTMLDivElement>("job-state").textContent =
      `${job.state} — epoch ${job.progress.epochs_done}/${job.progress.epochs_max}` +
      (job.error ? ` (${job.error})` : "");
    drawChart(chartCtx, trainingSeries(job.rows));
    if (job.state === "queued" || job.state === "running") {
      window.setTimeout(tick, 1000); // 1 Hz poll
    } else {
      await refreshModels();
      setStatus(`training ${job.state}; best epoch ${job.best_epoch}`);
    }
  };
  void tick();
}

async function start(): Promise<void> {
  wireEditor();
  wirePlanners();
  wireTraining();
  el<HTMLSelectElement>("scenario-list").addEventListener("change", (ev) => {
    void openScenario((ev.target as HTMLSelectElement).value);
  });
  el<HTMLButtonElement>("reload").addEventListener("click", () => void refreshScenarioList());
  await refreshScenarioList();
  await refreshModels();
  const list = el<HTMLSelectElement>("scenario-list");
  if (list.options.length > 0) await openScenario(list.options[0].value);
  updateSubmitButton();
  drawChart(chartCtx, []);
}

void start();
