"""In-process convergence fuzzer: N simulated clients, one session,
random op generation and randomly delayed per-client delivery.

Delivery stays FIFO per client (matching the transport contract) but the
interleaving across clients is random, so replicas see server broadcasts
at very different moments relative to their own optimistic edits.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from . import model, protocol
from .errors import LocalRejected
from .model import GridSpec, ItemKind, Terrain, TimeOfDay, WallEdge
from .protocol import ClientReplica, EditOp
from .server import Session, replay_log


@dataclass
class FuzzResult:
    converged: bool
    final_hash: int
    replica_hashes: list[int]
    server_hash: int
    replay_hash: int
    ops_applied: int
    ops_rejected: int

    @property
    def detail(self) -> str:
        return (
            f"server={self.server_hash} replay={self.replay_hash} "
            f"replicas={self.replica_hashes} "
            f"applied={self.ops_applied} rejected={self.ops_rejected}"
        )


def _random_op(rng: random.Random, replica: ClientReplica) -> EditOp:
    view = replica.view
    g = view.grid
    cell = (rng.randrange(g.width), rng.randrange(g.height))
    roll = rng.random()
    if roll < 0.30:
        return protocol.SetTerrain(cell=cell, terrain=rng.choice(list(Terrain)))
    if roll < 0.45:
        if rng.random() < 0.5:
            edge = WallEdge("H", rng.randrange(g.width), rng.randrange(g.height + 1))
        else:
            edge = WallEdge("V", rng.randrange(g.width + 1), rng.randrange(g.height))
        return protocol.SetWall(edge=edge, present=rng.random() < 0.6)
    if roll < 0.70:
        return protocol.PlaceItem(kind=rng.choice(list(ItemKind)), cell=cell)
    if roll < 0.80 and view.items:
        return protocol.MoveItem(item_id=rng.choice(view.items).id, to_cell=cell)
    if roll < 0.90 and view.items:
        return protocol.RemoveItem(item_id=rng.choice(view.items).id)
    return protocol.SetTimeOfDay(time_of_day=rng.choice(list(TimeOfDay)))


def run_fuzz(
    clients: int = 3,
    ops: int = 1000,
    seed: int = 7,
    grid: GridSpec | None = None,
) -> FuzzResult:
    rng = random.Random(seed)
    grid = grid or GridSpec(16, 16, 2.0)
    session = Session(model.new_space(f"fuzz-{seed}", "fuzz", seed, grid))

    replicas: list[ClientReplica] = []
    inboxes: list[deque] = []
    ids: list[int] = []
    for i in range(clients):
        client_id, welcome = session.connect(f"client-{i}")
        replicas.append(
            ClientReplica(client_id, model.space_from_bytes(welcome.snapshot))
        )
        inboxes.append(deque())
        ids.append(client_id)

    def deliver_one(i: int) -> None:
        replicas[i].on_server(inboxes[i].popleft())

    # each applied op fans out to every client, so deliveries must outpace
    # submissions or inboxes (and thus pending queues) grow without bound;
    # the backlog cap keeps delays bounded while the interleaving stays random
    backlog_cap = clients * 12

    submitted = 0
    rejected_local = 0
    while submitted < ops:
        deliverable = [i for i in range(clients) if inboxes[i]]
        backlog = sum(len(q) for q in inboxes)
        submit_now = (
            rng.random() < (1.0 / (clients + 1)) and backlog < backlog_cap
        ) or not deliverable
        if submit_now:
            i = rng.randrange(clients)
            op = _random_op(rng, replicas[i])
            try:
                submit = replicas[i].on_local(op)
            except LocalRejected:
                rejected_local += 1
                continue
            submitted += 1
            for out in session.handle_submit(ids[i], submit):
                if out.target is None:
                    for inbox in inboxes:
                        inbox.append(out.envelope)
                else:
                    inboxes[ids.index(out.target)].append(out.envelope)
        else:
            deliver_one(rng.choice(deliverable))

    # drain all remaining deliveries
    for i in range(clients):
        while inboxes[i]:
            deliver_one(i)

    for r in replicas:
        assert not r.pending, "pending must drain once all acks are delivered"

    server_hash = model.scene_hash(session.space)
    replayed = replay_log(session.creation_state, session.op_log)
    replay_hash = model.scene_hash(replayed)
    replica_hashes = [model.scene_hash(r.confirmed) for r in replicas]
    converged = all(h == server_hash for h in replica_hashes) and (
        replay_hash == server_hash
    )
    return FuzzResult(
        converged=converged,
        final_hash=server_hash,
        replica_hashes=replica_hashes,
        server_hash=server_hash,
        replay_hash=replay_hash,
        ops_applied=len(session.op_log),
        ops_rejected=submitted - len(session.op_log),
    )
