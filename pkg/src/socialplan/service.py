"""HTTP/JSON facade over the workbench: scenarios, demonstration capture,
synchronous planning, background training jobs, models and metrics.

State lives in a directory laid out exactly like the CLI's inputs/outputs
(scenarios/, demos/, plans/, models/, reports/), so the CLI and the service
are interchangeable over the same data. Every write is durably persisted
before the response returns.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path as FsPath

import numpy as np

from . import irl, metrics, tinynet
from .config import WorkbenchConfig, load_config
from .features import FeatureExtractor
from .geometry import dist, resample_spacing
from .planner import plan_gan_rrt_star, plan_rrt, plan_rrt_star
from .scenario import (
    FormatError,
    Path,
    PathInvariantError,
    Scenario,
    dumps_json,
    load_path,
    load_scenario,
    path_from_dict,
    path_to_dict,
    scenario_from_dict,
    scenario_to_dict,
    validate_path,
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail


def _durable_write(path: FsPath, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    dir_fd = os.open(path.parent, os.O_RDONLY)
    try:
        os.fsync(dir_fd)
    finally:
        os.close(dir_fd)


class TrainJob:
    def __init__(self, job_id: str, epochs_max: int):
        self.id = job_id
        self.state = "queued"
        self.epochs_done = 0
        self.epochs_max = epochs_max
        self.rows: list[dict] = []
        self.error: str | None = None
        self.best_epoch = 0
        self.best_val_homotopy = 0.0
        self.cancel_event = threading.Event()
        self.lock = threading.Lock()

    def to_dict(self) -> dict:
        with self.lock:
            return {
                "id": self.id,
                "state": self.state,
                "progress": {"epochs_done": self.epochs_done, "epochs_max": self.epochs_max},
                "rows": list(self.rows),
                "error": self.error,
                "best_epoch": self.best_epoch,
                "best_val_homotopy": self.best_val_homotopy,
            }


class WorkbenchService:
    """All endpoint logic, independent of the HTTP plumbing."""

    def __init__(self, state_dir, config: WorkbenchConfig):
        self.root = FsPath(state_dir)
        self.config = config
        for sub in ("scenarios", "demos", "plans", "models", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self.write_lock = threading.RLock()
        self.job_lock = threading.Lock()
        self.jobs: dict[str, TrainJob] = {}

    # -- scenarios ---------------------------------------------------------

    def _scenario_path(self, sid: str) -> FsPath:
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", sid):
            raise ApiError(404, "not_found", f"unknown scenario {sid!r}")
        return self.root / "scenarios" / f"{sid}.json"

    def _load_scenario(self, sid: str) -> Scenario:
        p = self._scenario_path(sid)
        if not p.exists():
            raise ApiError(404, "not_found", f"unknown scenario {sid!r}")
        return load_scenario(p)

    def list_scenarios(self) -> dict:
        out = []
        for f in sorted((self.root / "scenarios").glob("*.json")):
            s = load_scenario(f)
            out.append(
                {
                    "id": s.id,
                    "width": s.grid.width,
                    "height": s.grid.height,
                    "resolution": s.grid.resolution,
                    "pedestrians": len(s.pedestrians),
                    "has_demo": bool(self._demo_files(s.id)),
                }
            )
        return {"scenarios": out}

    def get_scenario(self, sid: str) -> dict:
        return scenario_to_dict(self._load_scenario(sid))

    def create_scenario(self, doc) -> dict:
        try:
            s = scenario_from_dict(doc)
        except FormatError as exc:
            raise ApiError(422, "invariant", str(exc)) from exc
        p = self._scenario_path(s.id)
        if p.exists():
            raise ApiError(409, "conflict", f"scenario {s.id!r} already exists")
        with self.write_lock:
            _durable_write(p, dumps_json(scenario_to_dict(s)))
        return {"id": s.id}

    # -- demos and paths ---------------------------------------------------

    def _demo_files(self, sid: str) -> list[FsPath]:
        # plain {sid}.json (CLI oracle output) sorts before {sid}__NNN.json
        # uploads, matching the CLI's last-wins demo resolution
        legacy = self.root / "demos" / f"{sid}.json"
        out = [legacy] if legacy.exists() else []
        out.extend(sorted((self.root / "demos").glob(f"{sid}__*.json")))
        return out

    def latest_demo(self, sid: str) -> Path | None:
        files = self._demo_files(sid)
        if not files:
            return None
        return load_path(files[-1])

    def add_demo(self, sid: str, doc) -> dict:
        scenario = self._load_scenario(sid)
        if not isinstance(doc, dict) or "points" not in doc:
            raise ApiError(422, "invariant", "points: missing field")
        raw = doc["points"]
        if not isinstance(raw, list) or len(raw) < 2:
            raise ApiError(422, "invariant", "points: a path needs at least 2 points")
        try:
            pts = [(float(p["x"]), float(p["y"])) for p in raw]
        except (TypeError, KeyError) as exc:
            raise ApiError(422, "invariant", "points: each point needs numeric x and y") from exc
        snapped = {"start": False, "end": False}
        if pts[0] != scenario.start:
            if dist(pts[0], scenario.start) <= scenario.goal_radius:
                pts[0] = scenario.start
                snapped["start"] = True
            else:
                raise ApiError(422, "invariant", "points[0]: must start at the scenario start")
        if not scenario.in_goal(pts[-1]):
            if dist(pts[-1], scenario.goal) <= 2.0 * scenario.goal_radius:
                pts[-1] = scenario.goal
                snapped["end"] = True
            else:
                raise ApiError(422, "invariant", "points[-1]: must end inside the goal region")
        try:
            path = Path(scenario_id=sid, source="demo_human", points=tuple(pts))
            validate_path(scenario, path)
        except (FormatError, PathInvariantError) as exc:
            raise ApiError(422, "invariant", str(exc)) from exc
        existing = self._demo_files(sid)
        name = f"{sid}__{len(existing):03d}.json"
        with self.write_lock:
            _durable_write(self.root / "demos" / name, dumps_json(path_to_dict(path)))
        return {"path": path_to_dict(path), "snapped": snapped}

    def list_paths(self, sid: str) -> dict:
        self._load_scenario(sid)
        out = [path_to_dict(load_path(f)) for f in self._demo_files(sid)]
        for f in sorted((self.root / "plans").glob(f"{sid}__*.json")):
            out.append(path_to_dict(load_path(f)))
        return {"paths": out}

    # -- planning ----------------------------------------------------------

    def plan(self, sid: str, doc) -> dict:
        scenario = self._load_scenario(sid)
        if not isinstance(doc, dict):
            raise ApiError(422, "invariant", "body: must be an object")
        planner_name = doc.get("planner")
        if planner_name not in ("rrt", "rrtstar", "ganrrtstar"):
            raise ApiError(422, "invariant", f"planner: unknown planner {planner_name!r}")
        seed = doc.get("seed", self.config.planner.seed)
        if not isinstance(seed, int):
            raise ApiError(422, "invariant", "seed: must be an integer")
        pc = replace(self.config.planner, seed=seed)
        if planner_name == "rrt":
            result = plan_rrt(scenario, pc)
        elif planner_name == "rrtstar":
            result = plan_rrt_star(scenario, pc)
        else:
            model_rel = doc.get("model")
            pair = self._load_pair(model_rel)
            result = plan_gan_rrt_star(scenario, pair, pc, feature_config=self.config.features)
        if not result.success:
            raise ApiError(422, "planner_failure", f"no path found within {pc.max_iterations} iterations")
        path = result.path
        with self.write_lock:
            _durable_write(
                self.root / "plans" / f"{sid}__{path.source}.json", dumps_json(path_to_dict(path))
            )
        return {"path": path_to_dict(path), "metrics": self._path_metrics(scenario, path)}

    def _load_pair(self, model_rel) -> tinynet.GanPair:
        if model_rel is None:
            raise ApiError(422, "invariant", "model: required for ganrrtstar")
        model_path = (self.root / "models" / model_rel).resolve()
        if not str(model_path).startswith(str((self.root / "models").resolve())):
            raise ApiError(404, "not_found", f"unknown model {model_rel!r}")
        if not model_path.exists():
            raise ApiError(404, "not_found", f"unknown model {model_rel!r}")
        with open(model_path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if "generator" in doc:
            return tinynet.pair_from_dict(doc)
        gen = tinynet.mlp_from_dict(doc)
        dis = tinynet.Mlp(tinynet.DISCRIMINATOR_SIZES, rng=np.random.default_rng(0))
        return tinynet.GanPair(gen, dis, tinynet.SgdMomentum(gen, 1e-3), tinynet.SgdMomentum(dis, 1e-3))

    def _path_metrics(self, scenario: Scenario, path: Path) -> dict:
        extractor = FeatureExtractor(scenario, self.config.features)
        pts = resample_spacing(path.as_array(), metrics.FEATURE_SPACING)
        feats = extractor.batch(pts)
        out = {
            "length": float(np.sum(np.hypot(*np.diff(path.as_array(), axis=0).T))),
            "max_front": float(feats[:, 2].max()),
            "max_back": float(feats[:, 3].max()),
            "max_side": float(feats[:, 4].max()),
        }
        demo = self.latest_demo(scenario.id)
        if demo is not None and path.source != "demo_human":
            report = metrics.metric_report(scenario, demo, path, feature_config=self.config.features)
            out.update(
                {
                    "dissimilarity": report.dissimilarity,
                    "feature_difference": report.feature_difference,
                    "homotopic": report.homotopic,
                    "path_length_demo": report.path_length_demo,
                }
            )
        return out

    # -- models ------------------------------------------------------------

    def list_models(self) -> dict:
        base = self.root / "models"
        out = []
        for f in sorted(base.rglob("*.json")):
            out.append(str(f.relative_to(base)))
        return {"models": out}

    # -- training ----------------------------------------------------------

    def start_training(self, doc) -> dict:
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            raise ApiError(422, "invariant", "body: must be an object")
        split = doc.pop("split", "75:25") if isinstance(doc, dict) else "75:25"
        try:
            base = self.config.to_dict()
            for block, overrides in doc.items():
                if block not in base:
                    raise ApiError(422, "invariant", f"{block}: unknown config block")
                if not isinstance(overrides, dict):
                    raise ApiError(422, "invariant", f"{block}: must be an object")
                base[block].update(overrides)
            from .config import config_from_dict

            cfg = config_from_dict(base)
        except ApiError:
            raise
        except Exception as exc:
            raise ApiError(422, "invariant", f"config: {exc}") from exc

        with self.job_lock:
            for job in self.jobs.values():
                if job.state in ("queued", "running"):
                    raise ApiError(409, "conflict", f"training job {job.id} is already {job.state}")
            job = TrainJob(uuid.uuid4().hex[:12], cfg.train.epochs_max)
            self.jobs[job.id] = job
            self._persist_job(job)
        thread = threading.Thread(target=self._run_training, args=(job, cfg, split), daemon=True)
        thread.start()
        return {"id": job.id, "state": job.state}

    def _persist_job(self, job: TrainJob) -> None:
        _durable_write(self.root / "reports" / f"job_{job.id}.json", dumps_json(job.to_dict()))

    def _run_training(self, job: TrainJob, cfg: WorkbenchConfig, split: str) -> None:
        try:
            with job.lock:
                job.state = "running"
            self._persist_job(job)
            scenario_files = sorted((self.root / "scenarios").glob("*.json"))
            scenarios = [load_scenario(f) for f in scenario_files]
            pairs = [(s, self.latest_demo(s.id)) for s in scenarios]
            pairs = [(s, d) for s, d in pairs if d is not None]
            if len(pairs) < 2:
                raise RuntimeError("need at least 2 scenarios with demonstrations")
            a, b = split.split(":")
            frac = float(a) / (float(a) + float(b))
            n_train = max(1, min(len(pairs) - 1, round(frac * len(pairs))))
            train_s = [s for s, _ in pairs[:n_train]]
            train_d = [d for _, d in pairs[:n_train]]
            val_s = [s for s, _ in pairs[n_train:]]
            val_d = [d for _, d in pairs[n_train:]]

            model_dir = self.root / "models" / f"job_{job.id}"
            model_dir.mkdir(parents=True, exist_ok=True)
            pair = tinynet.GanPair.initialize(
                irl.derive_seed(cfg.train.seed, 7), lr_g=cfg.train.lr_g, lr_d=cfg.train.lr_d
            )
            pair, pre_info = irl.pretrain(
                pair, train_s, train_d, cfg.train, cfg.planner, feature_config=cfg.features
            )

            best_seen = -1.0

            def on_epoch(row: irl.EpochRow) -> None:
                nonlocal best_seen
                if row.val_homotopy > best_seen:  # checkpoint improving epochs only
                    best_seen = row.val_homotopy
                    tinynet.save_pair(pair, model_dir / f"epoch_{row.epoch:04d}.json")
                with job.lock:
                    job.epochs_done = row.epoch
                    job.rows.append(row.to_dict())
                self._persist_job(job)

            best_pair, report = irl.train(
                pair,
                train_s,
                train_d,
                val_s,
                val_d,
                cfg.train,
                cfg.planner,
                feature_config=cfg.features,
                pretrain_info=pre_info,
                on_epoch=on_epoch,
                should_stop=job.cancel_event.is_set,
            )
            tinynet.save_pair(best_pair, model_dir / "best.json")
            _durable_write(self.root / "reports" / f"train_report_{job.id}.json", dumps_json(report.to_dict()))
            with job.lock:
                job.state = "cancelled" if report.stopping_reason == "cancelled" else "done"
                job.best_epoch = report.best_epoch
                job.best_val_homotopy = report.best_val_homotopy
            self._persist_job(job)
        except Exception as exc:  # noqa: BLE001 - job failures become job state
            with job.lock:
                job.state = "failed"
                job.error = str(exc)
            self._persist_job(job)

    def get_job(self, job_id: str) -> dict:
        job = self.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "not_found", f"unknown training job {job_id!r}")
        return job.to_dict()

    def cancel_job(self, job_id: str) -> dict:
        job = self.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "not_found", f"unknown training job {job_id!r}")
        job.cancel_event.set()
        with job.lock:
            if job.state == "queued":
                job.state = "cancelled"
        return job.to_dict()


_ROUTES: list[tuple[str, re.Pattern, str]] = [
    ("GET", re.compile(r"^/api/scenarios$"), "list_scenarios"),
    ("POST", re.compile(r"^/api/scenarios$"), "create_scenario"),
    ("GET", re.compile(r"^/api/scenarios/(?P<sid>[^/]+)$"), "get_scenario"),
    ("POST", re.compile(r"^/api/scenarios/(?P<sid>[^/]+)/demos$"), "add_demo"),
    ("GET", re.compile(r"^/api/scenarios/(?P<sid>[^/]+)/paths$"), "list_paths"),
    ("POST", re.compile(r"^/api/scenarios/(?P<sid>[^/]+)/plan$"), "plan"),
    ("POST", re.compile(r"^/api/train$"), "start_training"),
    ("GET", re.compile(r"^/api/train/(?P<job_id>[^/]+)$"), "get_job"),
    ("DELETE", re.compile(r"^/api/train/(?P<job_id>[^/]+)$"), "cancel_job"),
    ("GET", re.compile(r"^/api/models$"), "list_models"),
]

_TAKES_BODY = {"create_scenario", "add_demo", "plan", "start_training"}

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class _Handler(BaseHTTPRequestHandler):
    service: WorkbenchService = None
    ui_dir: FsPath | None = None

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send_json(self, status: int, doc) -> None:
        body = json.dumps(doc, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return None
        try:
            return json.loads(raw.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ApiError(400, "bad_request", f"invalid JSON body: {exc}") from exc

    def _dispatch(self, method: str) -> None:
        try:
            for m, pattern, name in _ROUTES:
                if m != method:
                    continue
                match = pattern.match(self.path.split("?", 1)[0])
                if not match:
                    continue
                handler = getattr(self.service, name)
                kwargs = match.groupdict()
                if name in _TAKES_BODY:
                    kwargs["doc"] = self._read_body()
                self._send_json(200, handler(**kwargs))
                return
            if method == "GET" and self._serve_static():
                return
            raise ApiError(404, "not_found", f"no route for {method} {self.path}")
        except ApiError as exc:
            self._send_json(exc.status, {"error": exc.code, "detail": exc.detail})
        except Exception as exc:  # noqa: BLE001 - surface as 500 with detail
            self._send_json(500, {"error": "internal", "detail": str(exc)})

    def _serve_static(self) -> bool:
        if self.ui_dir is None:
            return False
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            if rel != "index.html" and not rel.startswith("api/"):
                target = (self.ui_dir / "index.html").resolve()
                if not target.is_file():
                    return False
            else:
                return False
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", _STATIC_TYPES.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
        return True

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")


def build_server(port: int, state_dir, config: WorkbenchConfig | None = None, ui_dir=None) -> ThreadingHTTPServer:
    service = WorkbenchService(state_dir, config or load_config(None))
    handler = type("BoundHandler", (_Handler,), {"service": service, "ui_dir": FsPath(ui_dir) if ui_dir else None})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(port: int, state_dir, config_path=None, ui_dir=None) -> None:
    config = load_config(config_path)
    if ui_dir is None:
        candidate = FsPath(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    server = build_server(port, state_dir, config, ui_dir)
    print(f"serving on http://127.0.0.1:{port} (state: {state_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
