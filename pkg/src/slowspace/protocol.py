"""Wire protocol: edit ops, envelopes, canonical JSON codec, and the
optimistic client replica.

All mutations on the wire are absolute (no "cycle"/"toggle" ops): the UI
computes the next state locally, so convergence under the server's total
order is a plain fold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace as dc_replace

from . import model
from .errors import DecodeError, EditError, LocalRejected, SequenceGap
from .model import (
    ItemKind,
    Space,
    Terrain,
    TimeOfDay,
    WallEdge,
    WorldPoint,
    write_canonical_json,
)

PROTO_VERSION = 1


# --- edit ops ---------------------------------------------------------------


@dataclass(frozen=True)
class SetTerrain:
    cell: tuple[int, int]
    terrain: Terrain


@dataclass(frozen=True)
class SetWall:
    edge: WallEdge
    present: bool


@dataclass(frozen=True)
class PlaceItem:
    kind: ItemKind
    cell: tuple[int, int]


@dataclass(frozen=True)
class MoveItem:
    item_id: int
    to_cell: tuple[int, int]


@dataclass(frozen=True)
class RemoveItem:
    item_id: int


@dataclass(frozen=True)
class SetTimeOfDay:
    time_of_day: TimeOfDay


EditOp = SetTerrain | SetWall | PlaceItem | MoveItem | RemoveItem | SetTimeOfDay


def apply(space: Space, op: EditOp) -> tuple[Space, int | None]:
    """Apply one decoded op; returns (new space, assigned item id or None).

    Raises EditError on rejection; never anything else for a decoded op.
    """
    if isinstance(op, SetTerrain):
        return model.set_terrain(space, op.cell, op.terrain), None
    if isinstance(op, SetWall):
        return model.set_wall(space, op.edge, op.present), None
    if isinstance(op, PlaceItem):
        return model.place_item(space, op.kind, op.cell)
    if isinstance(op, MoveItem):
        return model.move_item(space, op.item_id, op.to_cell), None
    if isinstance(op, RemoveItem):
        return model.remove_item(space, op.item_id), None
    if isinstance(op, SetTimeOfDay):
        return model.set_time_of_day(space, op.time_of_day), None
    raise TypeError(f"not an EditOp: {op!r}")


# --- envelopes --------------------------------------------------------------


@dataclass(frozen=True)
class Hello:
    proto_version: int
    space_id: str
    client_name: str


@dataclass(frozen=True)
class SubmitOp:
    client_op_id: int
    op: EditOp


@dataclass(frozen=True)
class PresenceReport:
    position: WorldPoint
    dwell_s: float


@dataclass(frozen=True)
class Welcome:
    client_id: int
    snapshot: bytes  # canonical space bytes
    seq: int


@dataclass(frozen=True)
class OpApplied:
    seq: int
    origin_client: int
    client_op_id: int
    op: EditOp
    assigned_item_id: int | None = None  # present iff op is PlaceItem


@dataclass(frozen=True)
class Rejected:
    client_op_id: int
    reason: str


@dataclass(frozen=True)
class PresenceBroadcast:
    client_id: int
    cell: tuple[int, int]


@dataclass(frozen=True)
class ResidueDelta:
    cell: tuple[int, int]
    wear: float


@dataclass(frozen=True)
class Error:
    code: str
    detail: str


Envelope = (
    Hello
    | SubmitOp
    | PresenceReport
    | Welcome
    | OpApplied
    | Rejected
    | PresenceBroadcast
    | ResidueDelta
    | Error
)


# --- codec ------------------------------------------------------------------


def op_to_doc(op: EditOp) -> dict:
    if isinstance(op, SetTerrain):
        return {"op": "set_terrain", "cell": list(op.cell), "terrain": op.terrain.value}
    if isinstance(op, SetWall):
        return {
            "op": "set_wall",
            "edge": [op.edge.orientation, op.edge.x, op.edge.y],
            "present": op.present,
        }
    if isinstance(op, PlaceItem):
        return {"op": "place", "kind": op.kind.value, "cell": list(op.cell)}
    if isinstance(op, MoveItem):
        return {"op": "move", "item_id": op.item_id, "to_cell": list(op.to_cell)}
    if isinstance(op, RemoveItem):
        return {"op": "remove", "item_id": op.item_id}
    if isinstance(op, SetTimeOfDay):
        return {"op": "set_time", "time_of_day": op.time_of_day.value}
    raise TypeError(f"not an EditOp: {op!r}")


def _require(doc: dict, keys: set[str]) -> None:
    if not isinstance(doc, dict):
        raise DecodeError(0, "expected object")
    if doc.keys() != keys:
        extra = sorted(doc.keys() - keys)
        missing = sorted(keys - doc.keys())
        raise DecodeError(0, f"field mismatch: extra {extra}, missing {missing}")


def _cell(v) -> tuple[int, int]:
    if (
        not isinstance(v, list)
        or len(v) != 2
        or not all(isinstance(c, int) and not isinstance(c, bool) for c in v)
    ):
        raise DecodeError(0, f"bad cell: {v!r}")
    return (v[0], v[1])


def _int(v, what: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise DecodeError(0, f"bad {what}: {v!r}")
    return v


def _str(v, what: str) -> str:
    if not isinstance(v, str):
        raise DecodeError(0, f"bad {what}: {v!r}")
    return v


def _float(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DecodeError(0, f"bad {what}: {v!r}")
    return float(v)


def op_from_doc(doc) -> EditOp:
    if not isinstance(doc, dict):
        raise DecodeError(0, "op must be an object")
    tag = doc.get("op")
    try:
        if tag == "set_terrain":
            _require(doc, {"op", "cell", "terrain"})
            return SetTerrain(cell=_cell(doc["cell"]), terrain=Terrain(doc["terrain"]))
        if tag == "set_wall":
            _require(doc, {"op", "edge", "present"})
            e = doc["edge"]
            if (
                not isinstance(e, list)
                or len(e) != 3
                or e[0] not in ("H", "V")
                or not all(isinstance(c, int) and not isinstance(c, bool) for c in e[1:])
            ):
                raise DecodeError(0, f"bad edge: {e!r}")
            if not isinstance(doc["present"], bool):
                raise DecodeError(0, "present must be boolean")
            return SetWall(
                edge=WallEdge(orientation=e[0], x=e[1], y=e[2]),
                present=doc["present"],
            )
        if tag == "place":
            _require(doc, {"op", "kind", "cell"})
            return PlaceItem(kind=ItemKind(doc["kind"]), cell=_cell(doc["cell"]))
        if tag == "move":
            _require(doc, {"op", "item_id", "to_cell"})
            return MoveItem(
                item_id=_int(doc["item_id"], "item_id"), to_cell=_cell(doc["to_cell"])
            )
        if tag == "remove":
            _require(doc, {"op", "item_id"})
            return RemoveItem(item_id=_int(doc["item_id"], "item_id"))
        if tag == "set_time":
            _require(doc, {"op", "time_of_day"})
            return SetTimeOfDay(time_of_day=TimeOfDay(doc["time_of_day"]))
    except ValueError as e:  # bad enum value
        raise DecodeError(0, str(e)) from None
    raise DecodeError(0, f"unknown op tag: {tag!r}")


def envelope_to_doc(env: Envelope) -> dict:
    if isinstance(env, Hello):
        return {
            "t": "hello",
            "v": PROTO_VERSION,
            "proto_version": env.proto_version,
            "space_id": env.space_id,
            "client_name": env.client_name,
        }
    if isinstance(env, SubmitOp):
        return {
            "t": "submit",
            "v": PROTO_VERSION,
            "client_op_id": env.client_op_id,
            "op": op_to_doc(env.op),
        }
    if isinstance(env, PresenceReport):
        return {
            "t": "presence",
            "v": PROTO_VERSION,
            "position": [env.position.x, env.position.y, env.position.z],
            "dwell_s": env.dwell_s,
        }
    if isinstance(env, Welcome):
        return {
            "t": "welcome",
            "v": PROTO_VERSION,
            "client_id": env.client_id,
            "snapshot": env.snapshot.decode("utf-8"),
            "seq": env.seq,
        }
    if isinstance(env, OpApplied):
        doc = {
            "t": "op",
            "v": PROTO_VERSION,
            "seq": env.seq,
            "origin_client": env.origin_client,
            "client_op_id": env.client_op_id,
            "op": op_to_doc(env.op),
        }
        if env.assigned_item_id is not None:
            doc["assigned_item_id"] = env.assigned_item_id
        return doc
    if isinstance(env, Rejected):
        return {
            "t": "reject",
            "v": PROTO_VERSION,
            "client_op_id": env.client_op_id,
            "reason": env.reason,
        }
    if isinstance(env, PresenceBroadcast):
        return {
            "t": "presence_b",
            "v": PROTO_VERSION,
            "client_id": env.client_id,
            "cell": list(env.cell),
        }
    if isinstance(env, ResidueDelta):
        return {
            "t": "residue",
            "v": PROTO_VERSION,
            "cell": list(env.cell),
            "wear": env.wear,
        }
    if isinstance(env, Error):
        return {"t": "error", "v": PROTO_VERSION, "code": env.code, "detail": env.detail}
    raise TypeError(f"not an envelope: {env!r}")


def encode(env: Envelope) -> bytes:
    return write_canonical_json(envelope_to_doc(env)).encode("utf-8")


def decode(data: bytes) -> Envelope:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DecodeError(e.start, "invalid utf-8") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DecodeError(e.pos, e.msg) from None
    if not isinstance(doc, dict):
        raise DecodeError(0, "envelope must be an object")
    if doc.get("v") != PROTO_VERSION:
        raise DecodeError(0, f"unsupported protocol version: {doc.get('v')!r}")
    tag = doc.get("t")
    if tag == "hello":
        _require(doc, {"t", "v", "proto_version", "space_id", "client_name"})
        return Hello(
            proto_version=_int(doc["proto_version"], "proto_version"),
            space_id=_str(doc["space_id"], "space_id"),
            client_name=_str(doc["client_name"], "client_name"),
        )
    if tag == "submit":
        _require(doc, {"t", "v", "client_op_id", "op"})
        return SubmitOp(
            client_op_id=_int(doc["client_op_id"], "client_op_id"),
            op=op_from_doc(doc["op"]),
        )
    if tag == "presence":
        _require(doc, {"t", "v", "position", "dwell_s"})
        p = doc["position"]
        if not isinstance(p, list) or len(p) != 3:
            raise DecodeError(0, f"bad position: {p!r}")
        return PresenceReport(
            position=WorldPoint(
                x=_float(p[0], "x"), y=_float(p[1], "y"), z=_float(p[2], "z")
            ),
            dwell_s=_float(doc["dwell_s"], "dwell_s"),
        )
    if tag == "welcome":
        _require(doc, {"t", "v", "client_id", "snapshot", "seq"})
        return Welcome(
            client_id=_int(doc["client_id"], "client_id"),
            snapshot=_str(doc["snapshot"], "snapshot").encode("utf-8"),
            seq=_int(doc["seq"], "seq"),
        )
    if tag == "op":
        keys = {"t", "v", "seq", "origin_client", "client_op_id", "op"}
        if "assigned_item_id" in doc:
            keys.add("assigned_item_id")
        _require(doc, keys)
        op = op_from_doc(doc["op"])
        assigned = doc.get("assigned_item_id")
        if assigned is not None:
            assigned = _int(assigned, "assigned_item_id")
        if (assigned is not None) != isinstance(op, PlaceItem):
            raise DecodeError(0, "assigned_item_id present iff op is place")
        return OpApplied(
            seq=_int(doc["seq"], "seq"),
            origin_client=_int(doc["origin_client"], "origin_client"),
            client_op_id=_int(doc["client_op_id"], "client_op_id"),
            op=op,
            assigned_item_id=assigned,
        )
    if tag == "reject":
        _require(doc, {"t", "v", "client_op_id", "reason"})
        return Rejected(
            client_op_id=_int(doc["client_op_id"], "client_op_id"),
            reason=_str(doc["reason"], "reason"),
        )
    if tag == "presence_b":
        _require(doc, {"t", "v", "client_id", "cell"})
        return PresenceBroadcast(
            client_id=_int(doc["client_id"], "client_id"), cell=_cell(doc["cell"])
        )
    if tag == "residue":
        _require(doc, {"t", "v", "cell", "wear"})
        return ResidueDelta(cell=_cell(doc["cell"]), wear=_float(doc["wear"], "wear"))
    if tag == "error":
        _require(doc, {"t", "v", "code", "detail"})
        return Error(code=_str(doc["code"], "code"), detail=_str(doc["detail"], "detail"))
    raise DecodeError(0, f"unknown message tag: {tag!r}")


# --- client replica ---------------------------------------------------------


def _rewrite_item_id(op: EditOp, old_id: int, new_id: int) -> EditOp:
    if isinstance(op, MoveItem) and op.item_id == old_id:
        return dc_replace(op, item_id=new_id)
    if isinstance(op, RemoveItem) and op.item_id == old_id:
        return dc_replace(op, item_id=new_id)
    return op


@dataclass
class _Pending:
    client_op_id: int
    op: EditOp
    optimistic_item_id: int | None = None  # set for PlaceItem


class ClientReplica:
    """Optimistic client state: server-confirmed space plus a pending queue
    replayed on top of it. `view` is what the UI renders."""

    def __init__(self, client_id: int, snapshot: Space):
        self.client_id = client_id
        self.confirmed = snapshot
        self.pending: list[_Pending] = []
        self.view = snapshot
        self._next_client_op_id = 1

    def on_local(self, op: EditOp) -> SubmitOp:
        """Apply optimistically and return the SubmitOp to send."""
        try:
            new_view, assigned = apply(self.view, op)
        except EditError as e:
            raise LocalRejected(e.reason) from None
        entry = _Pending(
            client_op_id=self._next_client_op_id,
            op=op,
            optimistic_item_id=assigned,
        )
        self._next_client_op_id += 1
        self.pending.append(entry)
        self.view = new_view
        return SubmitOp(client_op_id=entry.client_op_id, op=op)

    def on_server(self, env: Envelope) -> None:
        if isinstance(env, OpApplied):
            if env.seq != self.confirmed.op_seq + 1:
                raise SequenceGap(
                    f"expected seq {self.confirmed.op_seq + 1}, got {env.seq}"
                )
            new_confirmed, assigned = apply(self.confirmed, env.op)
            new_confirmed = model.with_op_seq(new_confirmed, env.seq)
            if env.assigned_item_id is not None and assigned != env.assigned_item_id:
                raise SequenceGap(
                    f"server assigned id {env.assigned_item_id}, fold yields {assigned}"
                )
            if env.origin_client == self.client_id:
                if self.pending and self.pending[0].client_op_id == env.client_op_id:
                    head = self.pending.pop(0)
                    if (
                        head.optimistic_item_id is not None
                        and env.assigned_item_id is not None
                        and head.optimistic_item_id != env.assigned_item_id
                    ):
                        self._rewrite_pending(
                            head.optimistic_item_id, env.assigned_item_id
                        )
                elif self.pending and self.pending[0].client_op_id < env.client_op_id:
                    # acks arrive in submission order; a smaller pending head
                    # means we missed one
                    raise SequenceGap(
                        f"ack for op {env.client_op_id} skipped pending head "
                        f"{self.pending[0].client_op_id}"
                    )
                # else: the op was dropped at a rebuild after a conflicting
                # remote edit, but the server ordered it anyway; treat its
                # echo like a remote op
            self.confirmed = new_confirmed
            self._rebuild_view()
        elif isinstance(env, Rejected):
            self.pending = [
                p for p in self.pending if p.client_op_id != env.client_op_id
            ]
            self._rebuild_view()
        elif isinstance(env, ResidueDelta):
            self.confirmed = model.set_residue(self.confirmed, env.cell, env.wear)
            self._rebuild_view()
        elif isinstance(env, (PresenceBroadcast, Error)):
            pass  # informational; no replica state change
        else:
            raise TypeError(f"unexpected server envelope: {env!r}")

    def _rewrite_pending(self, old_id: int, new_id: int) -> None:
        for p in self.pending:
            p.op = _rewrite_item_id(p.op, old_id, new_id)

    def _rebuild_view(self) -> None:
        """Replay pending over confirmed, dropping ops that no longer apply.

        A pending PlaceItem may land on a different optimistic id after the
        confirmed state advanced; later pending ops that referenced the old
        optimistic id are rewritten to follow it.
        """
        view = self.confirmed
        kept: list[_Pending] = []
        for p in self.pending:
            try:
                new_view, assigned = apply(view, p.op)
            except EditError:
                continue  # invalidated by a confirmed op; drop
            if assigned is not None and p.optimistic_item_id != assigned:
                old = p.optimistic_item_id
                p.optimistic_item_id = assigned
                if old is not None:
                    for q in self.pending:
                        if q is not p:
                            q.op = _rewrite_item_id(q.op, old, assigned)
            view = new_view
            kept.append(p)
        self.pending = kept
        self.view = view
