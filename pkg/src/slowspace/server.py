"""Session hosting: authoritative op ordering, broadcast, behavioral
residue accumulation, persistence, and log replay.

Transport-free core (Session / SpaceStore) plus a FastAPI app exposing the
HTTP and WebSocket surface. All mutation of one space happens through its
Session, one op at a time: that serialization is what makes convergence a
plain fold for every subscriber.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import os
import tempfile
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from . import model, protocol
from .errors import CorruptFile, EditError, NotFound, ReplayError
from .materialize import export_bytes
from .model import Space
from .pcg import EcosystemTemplate, default_catalog
from .protocol import (
    EditOp,
    Envelope,
    OpApplied,
    PresenceBroadcast,
    PresenceReport,
    Rejected,
    ResidueDelta,
    SubmitOp,
    Welcome,
)


@dataclass(frozen=True)
class ResiduePolicy:
    wear_rate: float = 0.001  # wear per second of presence
    cap: float = 1.0

    def __post_init__(self):
        if self.wear_rate <= 0:
            raise ValueError("wear_rate must be positive")


@dataclass
class LogEntry:
    seq: int
    origin_client: int
    op: EditOp


@dataclass
class Outgoing:
    """A message the transport layer must deliver."""

    target: int | None  # client_id, or None for broadcast to all subscribers
    envelope: Envelope


class Session:
    """One hosted space: authoritative state, subscriber set, op log."""

    def __init__(self, space: Space):
        self.space = space
        # replay base: the snapshot this session started from (creation state
        # for fresh spaces; the loaded file for reopened ones)
        self.creation_state = space
        self.subscribers: dict[int, str] = {}  # client_id -> display name
        self.op_log: list[LogEntry] = []
        self._next_client_id = 1

    def connect(self, client_name: str) -> tuple[int, Welcome]:
        client_id = self._next_client_id
        self._next_client_id += 1
        self.subscribers[client_id] = client_name
        welcome = Welcome(
            client_id=client_id,
            snapshot=model.canonical_bytes(self.space),
            seq=self.space.op_seq,
        )
        return client_id, welcome

    def disconnect(self, client_id: int) -> None:
        self.subscribers.pop(client_id, None)

    def handle_submit(self, client_id: int, submit: SubmitOp) -> list[Outgoing]:
        try:
            new_space, assigned = protocol.apply(self.space, submit.op)
        except EditError as e:
            return [
                Outgoing(
                    target=client_id,
                    envelope=Rejected(client_op_id=submit.client_op_id, reason=e.reason),
                )
            ]
        seq = self.space.op_seq + 1
        self.space = model.with_op_seq(new_space, seq)
        self.op_log.append(
            LogEntry(seq=seq, origin_client=client_id, op=submit.op)
        )
        return [
            Outgoing(
                target=None,
                envelope=OpApplied(
                    seq=seq,
                    origin_client=client_id,
                    client_op_id=submit.client_op_id,
                    op=submit.op,
                    assigned_item_id=assigned,
                ),
            )
        ]

    def record_presence(
        self, client_id: int, report: PresenceReport, policy: ResiduePolicy
    ) -> list[Outgoing]:
        try:
            cell = model.cell_of_world(self.space.grid, report.position)
        except EditError:
            return []  # out-of-extent reports are ignored silently
        out: list[Outgoing] = [
            Outgoing(target=None, envelope=PresenceBroadcast(client_id=client_id, cell=cell))
        ]
        old = self.space.residue_at(cell)
        new = min(policy.cap, old + report.dwell_s * policy.wear_rate)
        if round(new, 4) != round(old, 4):
            self.space = model.set_residue(self.space, cell, new)
            out.append(
                Outgoing(target=None, envelope=ResidueDelta(cell=cell, wear=new))
            )
        return out


def replay_log(creation_state: Space, op_log: list[LogEntry]) -> Space:
    """Fold the log over the creation state; the convergence oracle.

    Residue is not carried in the op log, so the result has zero residue.
    """
    space = creation_state
    expected = creation_state.op_seq + 1
    for entry in op_log:
        if entry.seq != expected:
            raise ReplayError(entry.seq, f"expected seq {expected}")
        try:
            space, _ = protocol.apply(space, entry.op)
        except EditError as e:
            raise ReplayError(entry.seq, e.reason) from None
        space = model.with_op_seq(space, entry.seq)
        expected += 1
    return space


# --- persistence ------------------------------------------------------------


class SpaceStore:
    """Whole-file canonical JSON persistence, atomic via rename."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)

    def path_for(self, space_id: str) -> str:
        return os.path.join(self.data_dir, f"{space_id}.json")

    def list_spaces(self) -> list[tuple[str, str]]:
        out = []
        for fn in sorted(os.listdir(self.data_dir)):
            if not fn.endswith(".json"):
                continue
            try:
                space = self.load(fn[: -len(".json")])
            except (NotFound, CorruptFile):
                continue
            out.append((space.space_id, space.name))
        return out

    def load(self, space_id: str) -> Space:
        path = self.path_for(space_id)
        if not os.path.exists(path):
            raise NotFound(space_id)
        try:
            with open(path, "rb") as f:
                space = model.space_from_bytes(f.read())
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise CorruptFile([str(e)]) from None
        violations = model.validate_space(space)
        if violations:
            raise CorruptFile(violations)
        return space

    def save(self, space: Space) -> str:
        data = model.canonical_bytes(space)
        path = self.path_for(space.space_id)
        fd, tmp = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return path


def open_space(store: SpaceStore, space_id: str) -> Session:
    return Session(store.load(space_id))


def save_space(session: Session, store: SpaceStore) -> str:
    return store.save(session.space)


# --- op-log files (replay/audit) -------------------------------------------


def write_op_log(path: str, op_log: list[LogEntry]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for e in op_log:
            doc = {
                "seq": e.seq,
                "origin_client": e.origin_client,
                "op": protocol.op_to_doc(e.op),
            }
            f.write(model.write_canonical_json(doc) + "\n")


def read_op_log(path: str) -> list[LogEntry]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            out.append(
                LogEntry(
                    seq=int(doc["seq"]),
                    origin_client=int(doc["origin_client"]),
                    op=protocol.op_from_doc(doc["op"]),
                )
            )
    return out


# --- HTTP / WebSocket app ---------------------------------------------------


@dataclass
class ServerConfig:
    data_dir: str = "./data"
    residue: ResiduePolicy = field(default_factory=ResiduePolicy)
    autosave_interval_s: float = 10.0
    catalog: list[EcosystemTemplate] = field(default_factory=default_catalog)
    static_dir: str | None = None


class _LiveSession:
    """Session plus per-connection outboxes and the per-space apply lock."""

    def __init__(self, session: Session):
        self.session = session
        self.lock = asyncio.Lock()
        self.outboxes: dict[int, asyncio.Queue] = {}

    def dispatch(self, sender: int, messages: list[Outgoing]) -> None:
        for m in messages:
            if m.target is None:
                for q in self.outboxes.values():
                    q.put_nowait(m.envelope)
            else:
                q = self.outboxes.get(m.target)
                if q is not None:
                    q.put_nowait(m.envelope)


def create_app(config: ServerConfig):
    store = SpaceStore(config.data_dir)
    live: dict[str, _LiveSession] = {}

    async def autosave_loop():
        while True:
            await asyncio.sleep(config.autosave_interval_s)
            for ls in list(live.values()):
                async with ls.lock:
                    save_space(ls.session, store)

    @contextlib.asynccontextmanager
    async def lifespan(app):
        task = None
        if config.autosave_interval_s > 0:
            task = asyncio.create_task(autosave_loop())
        yield
        if task is not None:
            task.cancel()

    app = FastAPI(title="slowspace", lifespan=lifespan)

    def get_live(space_id: str) -> _LiveSession:
        if space_id not in live:
            live[space_id] = _LiveSession(open_space(store, space_id))
        return live[space_id]

    @app.get("/spaces")
    def list_spaces():
        listed = {sid: name for sid, name in store.list_spaces()}
        for sid, ls in live.items():
            listed[sid] = ls.session.space.name
        return [{"space_id": sid, "name": name} for sid, name in sorted(listed.items())]

    @app.post("/spaces", status_code=201)
    def create_space(body: dict):
        try:
            name = str(body.get("name", "untitled"))
            seed = int(body.get("seed", 0))
            grid = model.GridSpec(
                width=int(body.get("width", 16)),
                height=int(body.get("height", 16)),
                cell_size=float(body.get("cell_size", 2.0)),
            )
            space_id = str(body.get("space_id") or f"space-{len(store.list_spaces()) + 1}")
            space = model.new_space(space_id, name, seed, grid)
        except (EditError, ValueError, TypeError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        store.save(space)
        return {"space_id": space.space_id, "name": space.name}

    @app.get("/spaces/{space_id}/file")
    def space_file(space_id: str):
        try:
            ls = get_live(space_id)
        except NotFound:
            raise HTTPException(status_code=404, detail=space_id)
        except CorruptFile as e:
            raise HTTPException(status_code=500, detail="; ".join(e.violations))
        return Response(
            content=model.canonical_bytes(ls.session.space),
            media_type="application/json",
        )

    @app.get("/spaces/{space_id}/export")
    def space_export(space_id: str):
        try:
            ls = get_live(space_id)
        except NotFound:
            raise HTTPException(status_code=404, detail=space_id)
        return Response(
            content=export_bytes(ls.session.space, config.catalog),
            media_type="application/json",
        )

    @app.websocket("/ws/{space_id}")
    async def ws_endpoint(ws: WebSocket, space_id: str):
        await ws.accept()
        try:
            ls = get_live(space_id)
        except (NotFound, CorruptFile) as e:
            await ws.send_text(
                protocol.encode(
                    protocol.Error(code="no_such_space", detail=str(e))
                ).decode("utf-8")
            )
            await ws.close()
            return

        # first frame must be Hello
        try:
            hello = protocol.decode((await ws.receive_text()).encode("utf-8"))
        except Exception:
            await ws.close()
            return
        if not isinstance(hello, protocol.Hello):
            await ws.close()
            return

        async with ls.lock:
            client_id, welcome = ls.session.connect(hello.client_name)
            outbox: asyncio.Queue = asyncio.Queue()
            ls.outboxes[client_id] = outbox
        await ws.send_text(protocol.encode(welcome).decode("utf-8"))

        async def sender():
            while True:
                env = await outbox.get()
                await ws.send_text(protocol.encode(env).decode("utf-8"))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = (await ws.receive_text()).encode("utf-8")
                try:
                    env = protocol.decode(raw)
                except Exception as e:
                    outbox.put_nowait(protocol.Error(code="decode", detail=str(e)))
                    continue
                async with ls.lock:
                    if isinstance(env, SubmitOp):
                        out = ls.session.handle_submit(client_id, env)
                    elif isinstance(env, PresenceReport):
                        out = ls.session.record_presence(client_id, env, config.residue)
                    else:
                        out = [
                            Outgoing(
                                target=client_id,
                                envelope=protocol.Error(
                                    code="unexpected", detail=type(env).__name__
                                ),
                            )
                        ]
                    ls.dispatch(client_id, out)
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            async with ls.lock:
                ls.session.disconnect(client_id)
                ls.outboxes.pop(client_id, None)
                save_space(ls.session, store)

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    if config.static_dir and os.path.isdir(config.static_dir):
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
