"""Causal networks over rewrite histories and schedule-invariance testing."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Literal

import networkx as nx

from .graph import SpaceGraph
from .rules import MatchSite, UpdateRule, apply_rule_in_place, find_matches, site_edges


class ScheduleLimitError(Exception):
    """Exhaustive schedule enumeration outgrew the configured limit."""


@dataclass(frozen=True)
class Event:
    """One rule application: ids are 1-based; 0 is the initial graph."""

    id: int
    rule: str
    site: tuple[int, ...]
    dependencies: tuple[int, ...]


@dataclass(frozen=True)
class CausalNetwork:
    events: tuple[Event, ...]

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(d, e.id) for e in self.events for d in e.dependencies}

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for e in self.events:
            g.add_node(e.id, rule=e.rule)
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> str:
        return json.dumps(
            {
                "events": [
                    {
                        "id": e.id,
                        "rule": e.rule,
                        "site": list(e.site),
                        "dependencies": list(e.dependencies),
                    }
                    for e in self.events
                ],
                "dependencies": sorted(list(pair) for pair in self.edges),
            },
            indent=2,
            sort_keys=True,
        )


def networks_isomorphic(a: CausalNetwork, b: CausalNetwork) -> bool:
    """Isomorphism of rule-labeled dependency DAGs."""
    return nx.is_isomorphic(
        a.to_networkx(),
        b.to_networkx(),
        node_match=lambda x, y: x["rule"] == y["rule"],
    )


@dataclass(frozen=True)
class Schedule:
    """Deterministic policy for picking one match per step.

    fixed: always the first match in sorted order.
    random: seeded uniform choice among current matches.
    explicit: follow a tuple of indices into the sorted match list.
    """

    policy: Literal["fixed", "random", "explicit"]
    seed: int = 0
    choices: tuple[int, ...] = ()

    def describe(self) -> str:
        if self.policy == "fixed":
            return "fixed"
        if self.policy == "random":
            return f"random:{self.seed}"
        return "explicit:" + ",".join(map(str, self.choices))


def build_causal_network(
    g: SpaceGraph,
    rules: list[UpdateRule],
    schedule: Schedule,
    steps: int,
) -> tuple[SpaceGraph, CausalNetwork]:
    """Apply up to `steps` scheduled rewrites, recording events and the
    dependency edges A -> B for every event B whose matched site contains an
    edge created by A."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    host = g.copy()
    rng = random.Random(schedule.seed) if schedule.policy == "random" else None
    events: list[Event] = []
    for step_index in range(steps):
        matches = _all_matches(host, rules)
        if not matches:
            break
        if schedule.policy == "fixed":
            pick = 0
        elif schedule.policy == "random":
            assert rng is not None
            pick = rng.randrange(len(matches))
        else:
            if step_index >= len(schedule.choices):
                break
            pick = schedule.choices[step_index]
            if not 0 <= pick < len(matches):
                raise ValueError(
                    f"explicit choice {pick} out of range for {len(matches)} matches"
                )
        rule_index, site = matches[pick]
        rule = rules[rule_index]
        deps = sorted(
            {
                host.provenance[e]
                for e in site_edges(host, site)
                if host.provenance[e] != 0
            }
        )
        event_id = len(events) + 1
        apply_rule_in_place(host, rule, site, event_id)
        assert all(d < event_id for d in deps)
        events.append(Event(event_id, rule.name, site.vertices, tuple(deps)))
    return host, CausalNetwork(tuple(events))


def _all_matches(
    g: SpaceGraph, rules: list[UpdateRule]
) -> list[tuple[int, MatchSite]]:
    return [
        (ri, site) for ri, rule in enumerate(rules) for site in find_matches(g, rule)
    ]


@dataclass(frozen=True)
class InvarianceVerdict:
    invariant_over_sample: bool
    schedules_compared: int
    witness: tuple[Schedule, Schedule] | None = None


def causal_invariance_test(
    g: SpaceGraph,
    rules: list[UpdateRule],
    steps: int,
    *,
    sample_seeds: list[int] | None = None,
    exhaustive_threshold: int = 6,
    max_schedules: int = 20_000,
) -> InvarianceVerdict:
    """Compare causal networks across schedules by labeled-DAG isomorphism.

    When the event horizon is small (steps <= exhaustive_threshold) every
    maximal schedule is enumerated; otherwise the seeded random schedules
    are sampled.  The verdict only speaks for the compared sample.
    """
    schedules: list[Schedule]
    if steps <= exhaustive_threshold:
        choice_seqs = _enumerate_choice_sequences(g, rules, steps, max_schedules)
        schedules = [Schedule("explicit", choices=seq) for seq in choice_seqs]
    else:
        seeds = sample_seeds if sample_seeds is not None else list(range(8))
        schedules = [Schedule("random", seed=s) for s in seeds]
    if not schedules:
        return InvarianceVerdict(True, 0)
    reference_schedule = schedules[0]
    _, reference = build_causal_network(g, rules, reference_schedule, steps)
    for other in schedules[1:]:
        _, network = build_causal_network(g, rules, other, steps)
        if not networks_isomorphic(reference, network):
            return InvarianceVerdict(
                False, len(schedules), (reference_schedule, other)
            )
    return InvarianceVerdict(True, len(schedules))


def _enumerate_choice_sequences(
    g: SpaceGraph, rules: list[UpdateRule], steps: int, max_schedules: int
) -> list[tuple[int, ...]]:
    """Depth-first tree of explicit match choices, maximal within the horizon."""
    sequences: list[tuple[int, ...]] = []

    def walk(host: SpaceGraph, prefix: tuple[int, ...]) -> None:
        if len(sequences) > max_schedules:
            raise ScheduleLimitError(
                f"more than {max_schedules} schedules at steps={steps}"
            )
        if len(prefix) == steps:
            sequences.append(prefix)
            return
        matches = _all_matches(host, rules)
        if not matches:
            sequences.append(prefix)
            return
        for pick in range(len(matches)):
            rule_index, site = matches[pick]
            branch = host.copy()
            apply_rule_in_place(branch, rules[rule_index], site, len(prefix) + 1)
            walk(branch, prefix + (pick,))

    walk(g.copy(), ())
    return sequences
