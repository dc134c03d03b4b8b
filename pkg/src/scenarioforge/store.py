"""File-backed event store: one append-only log per workshop.

Each workshop has a single logical writer (a re-entrant lock around every
command); readers see committed state. Logs are newline-delimited JSON
records replayed on startup, so a crash and restart lands on exactly the
pre-crash state.

A workshop created with a ``deterministic_seed`` uses a logical clock (one
millisecond per event) and seed-derived participant tokens, which makes a
scripted run reproduce its entire event log byte for byte.
"""

from __future__ import annotations

import hashlib
import os
import re
import secrets
import threading
import time
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

from . import engine, events as events_mod
from .errors import InvalidAgenda, NothingOpen, SequenceConflict, UnknownWorkshop
from .events import Event, replay, state_hash
from .model import (
    OTHERS_LABEL,
    Agenda,
    EventDraft,
    Phase,
    Role,
    WorkshopState,
    cmd_register_participant,
    step_instances,
)

_LOG_SUFFIX = ".log"
_WID_RE = re.compile(r"^w(\d+)$")


class WorkshopHandle:
    """In-memory side of one workshop: state, log, lock, and clock."""

    def __init__(self, workshop_id: str, path: Path):
        self.id = workshop_id
        self.path = path
        self.state = WorkshopState()
        self.events: list[Event] = []
        self.lock = threading.RLock()
        self.changed = threading.Condition(self.lock)
        self.last_at = 0
        self.deterministic = False


class WorkshopStore:
    def __init__(self, data_dir: str | Path, fsync: bool = False):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.fsync = fsync
        self._handles: dict[str, WorkshopHandle] = {}
        self._registry_lock = threading.Lock()
        self._load()

    # ---- loading ----

    def _load(self) -> None:
        for path in sorted(self.data_dir.glob(f"*{_LOG_SUFFIX}")):
            workshop_id = path.stem
            handle = WorkshopHandle(workshop_id, path)
            parsed = events_mod.parse_log(path.read_text(encoding="utf-8"))
            state, _ = replay(parsed)
            handle.state = state
            handle.events = parsed
            handle.last_at = parsed[-1].at if parsed else 0
            handle.deterministic = state.deterministic
            self._handles[workshop_id] = handle

    # ---- lookup ----

    def get(self, workshop_id: str) -> WorkshopHandle:
        handle = self._handles.get(workshop_id)
        if handle is None:
            raise UnknownWorkshop(f"workshop {workshop_id!r} does not exist")
        return handle

    def workshop_ids(self) -> list[str]:
        return sorted(self._handles, key=lambda w: (len(w), w))

    # ---- creation ----

    def create_workshop(
        self,
        title: str,
        agenda: Agenda | Mapping[str, Any],
        issue_areas: Sequence[Mapping[str, Any] | str],
        deterministic_seed: Optional[int] = None,
    ) -> WorkshopHandle:
        """Validate the configuration and commit the creation event."""
        if isinstance(agenda, Agenda):
            agenda.validate()
            agenda_dict = agenda.to_dict()
        else:
            agenda_dict = Agenda.from_dict(agenda).to_dict()

        areas: list[dict] = []
        for entry in issue_areas:
            if isinstance(entry, str):
                areas.append({"label": entry, "keywords": []})
            else:
                label = str(entry.get("label") or "").strip()
                if not label:
                    raise InvalidAgenda("issue area label is empty")
                areas.append({"label": label, "keywords": list(entry.get("keywords") or [])})
        if not areas:
            raise InvalidAgenda("issue_areas must be non-empty")
        labels = [a["label"] for a in areas]
        if len(set(labels)) != len(labels):
            raise InvalidAgenda("issue area labels must be unique")
        if OTHERS_LABEL not in labels:
            areas.append({"label": OTHERS_LABEL, "keywords": []})
        elif labels[-1] != OTHERS_LABEL:
            areas = [a for a in areas if a["label"] != OTHERS_LABEL] + [
                a for a in areas if a["label"] == OTHERS_LABEL
            ]

        with self._registry_lock:
            workshop_id = self._next_workshop_id()
            handle = WorkshopHandle(workshop_id, self.data_dir / f"{workshop_id}{_LOG_SUFFIX}")
            handle.deterministic = deterministic_seed is not None
            self._handles[workshop_id] = handle

        shell = WorkshopState()
        prep_specs = Agenda.from_dict(agenda_dict).steps_for(Phase.PREPARATION)
        payload = {
            "workshop_id": workshop_id,
            "title": title,
            "agenda": agenda_dict,
            "issue_areas": areas,
            "deterministic": deterministic_seed is not None,
            "seed": deterministic_seed,
            "steps": step_instances(shell, prep_specs, Phase.PREPARATION, 0),
        }
        with handle.lock:
            self._commit(handle, [EventDraft(kind="workshop_created", payload=payload)])
        return handle

    def _next_workshop_id(self) -> str:
        highest = 0
        for wid in self._handles:
            match = _WID_RE.match(wid)
            if match:
                highest = max(highest, int(match.group(1)))
        return f"w{highest + 1}"

    # ---- command execution ----

    def execute(
        self,
        workshop_id: str,
        command: Callable[..., list[EventDraft]],
        **kwargs: Any,
    ) -> list[Event]:
        """Run a command under the workshop's writer lock and commit its events.

        An expired open step is closed first (deadline auto-close); an
        explicit close arriving after that expiry returns the auto-close
        events instead of failing.
        """
        handle = self.get(workshop_id)
        with handle.lock:
            auto = engine.pending_deadline_close(handle.state, self._now(handle))
            auto_events = self._commit(handle, auto) if auto else []
            try:
                drafts = command(handle.state, self._now(handle), **kwargs)
            except NothingOpen:
                if auto_events and command is engine.cmd_close_step:
                    return auto_events
                raise
            return auto_events + self._commit(handle, drafts)

    def register_participant(
        self, workshop_id: str, role: Role, group_label: Optional[str] = None
    ) -> list[Event]:
        """Admit a participant, minting a fresh (or seed-derived) token."""
        handle = self.get(workshop_id)
        with handle.lock:
            next_alias = f"P{len(handle.state.participants) + 1}"
            token = self._mint_token(handle, next_alias)
            return self.execute(
                workshop_id, cmd_register_participant, role=role, group_label=group_label, token=token
            )

    def _mint_token(self, handle: WorkshopHandle, alias: str) -> str:
        if handle.state.deterministic:
            seed = handle.state.det_seed or 0
            return hashlib.sha256(f"{seed}:{handle.id}:{alias}".encode()).hexdigest()[:32]
        return secrets.token_hex(16)

    def _now(self, handle: WorkshopHandle) -> int:
        if handle.deterministic:
            return handle.last_at + 1
        return max(int(time.time() * 1000), handle.last_at)

    def _commit(self, handle: WorkshopHandle, drafts: Sequence[EventDraft]) -> list[Event]:
        committed = []
        with handle.changed:
            for draft in drafts:
                seq = len(handle.events) + 1
                event = Event(
                    seq=seq, kind=draft.kind, at=self._now(handle), actor=draft.actor, payload=draft.payload
                )
                self._append_line(handle, event)
                events_mod.apply_event(handle.state, event)
                handle.events.append(event)
                handle.last_at = event.at
                committed.append(event)
            if committed:
                handle.changed.notify_all()
        return committed

    def _append_line(self, handle: WorkshopHandle, event: Event) -> None:
        with open(handle.path, "a", encoding="utf-8") as fh:
            fh.write(event.to_line() + "\n")
            if self.fsync:
                fh.flush()
                os.fsync(fh.fileno())

    def append_event(self, workshop_id: str, event: Event) -> int:
        """Append a pre-built event, fencing on its seq; returns the committed seq."""
        handle = self.get(workshop_id)
        with handle.lock:
            expected = len(handle.events) + 1
            if event.seq != expected:
                raise SequenceConflict(f"expected seq {expected}, got {event.seq}")
            self._append_line(handle, event)
            events_mod.apply_event(handle.state, event)
            handle.events.append(event)
            handle.last_at = max(handle.last_at, event.at)
            with handle.changed:
                handle.changed.notify_all()
            return event.seq

    # ---- reads ----

    def events_since(self, workshop_id: str, from_seq: int = 0) -> list[Event]:
        handle = self.get(workshop_id)
        with handle.lock:
            return [e for e in handle.events if e.seq > from_seq]

    def wait_events(self, workshop_id: str, from_seq: int, timeout: float) -> list[Event]:
        """Block up to ``timeout`` seconds for events past ``from_seq``."""
        handle = self.get(workshop_id)
        with handle.changed:
            fresh = [e for e in handle.events if e.seq > from_seq]
            if fresh or timeout <= 0:
                return fresh
            handle.changed.wait(timeout)
            return [e for e in handle.events if e.seq > from_seq]

    def verify_replay(self, workshop_id: str) -> dict:
        """Re-fold the on-disk log twice and compare with the live state hash."""
        handle = self.get(workshop_id)
        with handle.lock:
            live_hash = state_hash(handle.state)
            parsed = events_mod.parse_log(handle.path.read_text(encoding="utf-8"))
        _, first = replay(parsed)
        _, second = replay(parsed)
        return {
            "workshop_id": workshop_id,
            "events": len(parsed),
            "live_hash": live_hash,
            "replay_hash": first,
            "deterministic": first == second,
            "match": first == second == live_hash,
        }
