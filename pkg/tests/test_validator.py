"""Tests for the relational lint engine."""

import dataclasses

import pytest

from src.core.errors import UnknownRuleCode
from src.core.parser import extract_inline_timestamps
from src.core.schema import (
    EPSILON,
    AudioEvent,
    EventType,
    Script,
    TimeRange,
    timed_sort_key,
)
from src.core.timeline import overlap
from src.core.validator import (
    RULES,
    Diagnostic,
    DiagnosticSet,
    Severity,
    explain_rule,
    path_key,
    rules_reading,
    validate,
)

from corpus import (
    CLEAN_FIXTURES,
    EXPECTED_FINDINGS,
    FIXTURES,
    MUTATION_FIXTURES,
    dialogue,
    entity,
    music,
    sfx,
    shot,
)


# --- Mutations: each injects one violation of its rule ----------------------

def _first(script: Script):
    return sorted(script.shots, key=timed_sort_key)[0]


def _last_end(script: Script) -> float:
    return max(s.time_range.end for s in script.shots)


def _with_shot(script: Script, new_shot) -> Script:
    return dataclasses.replace(script, shots=tuple(
        new_shot if s.id == new_shot.id else s for s in script.shots))


def _add_events(script: Script, *events: AudioEvent) -> Script:
    return dataclasses.replace(script, events=script.events + events)


def mutate_e001(script):
    first = _first(script)
    return _with_shot(script, dataclasses.replace(
        first, references_in_shot=first.references_in_shot + ("PERSON_99",)))


def mutate_e002(script):
    first = _first(script)
    event = dialogue("EVENT_99", first.time_range.start, first.time_range.end, "PERSON_99", "Hi.")
    return _add_events(script, event)


def mutate_e003(script):
    first = _first(script)
    return _with_shot(script, dataclasses.replace(
        first, active_events=first.active_events + ("EVENT_99",)))


def mutate_e004(script):
    first = _first(script)
    return dataclasses.replace(script, shots=script.shots + (
        dataclasses.replace(first, id="SHOT_99"),))


def mutate_e005(script):
    first = _first(script)
    outside = first.time_range.end + 5
    return _with_shot(script, dataclasses.replace(
        first, visual_description=f"{first.visual_description} [t={outside}] Later."))


def mutate_e006(script):
    first = _first(script)
    start = _last_end(script) + 1
    moved = dataclasses.replace(first, active_events=first.active_events + ("EVENT_99",))
    return _add_events(_with_shot(script, moved), sfx("EVENT_99", start, start + 1, "Far away"))


def mutate_e007(script):
    first = _first(script)
    return _with_shot(script, dataclasses.replace(
        first, time_range=TimeRange(first.time_range.start, script.meta.duration + 5)))


def mutate_e008(script):
    first = _first(script)
    event = dataclasses.replace(
        music("EVENT_99", first.time_range.start, first.time_range.end, "Strings"),
        speaker="PERSON_1")
    return _add_events(script, event)


def mutate_w101(script):
    return dataclasses.replace(script, references=script.references + (
        entity("OBJECT_99", "A forgotten umbrella", "black canopy"),))


def mutate_w102(script):
    first = _first(script)
    return _add_events(script, music("EVENT_99", first.time_range.start,
                                     first.time_range.end, "Unlisted strings"))


def mutate_w103(script):
    first = _first(script)
    stranger = entity("PERSON_99", "A voice offscreen", "unseen")
    event = dialogue("EVENT_99", first.time_range.start, first.time_range.end,
                     "PERSON_99", "Over here!")
    return _add_events(dataclasses.replace(
        script, references=script.references + (stranger,)), event)


def mutate_w104(script):
    start = _last_end(script) + 1
    return dataclasses.replace(script, shots=script.shots + (
        shot("SHOT_99", start, start + 1, "After the gap."),))


def mutate_w105(script):
    first = _first(script)
    return _add_events(script, sfx("EVENT_99", first.time_range.start,
                                   first.time_range.end, "Something rattles"))


MUTATIONS = {
    "E001": mutate_e001, "E002": mutate_e002, "E003": mutate_e003, "E004": mutate_e004,
    "E005": mutate_e005, "E006": mutate_e006, "E007": mutate_e007, "E008": mutate_e008,
    "W101": mutate_w101, "W102": mutate_w102, "W103": mutate_w103, "W104": mutate_w104,
    "W105": mutate_w105,
}


# --- Brute-force oracle for the temporal rules -----------------------------

def brute_force_findings(script: Script):
    """(code, subject id, related id) triples for E006, W102 and W103 by full scan."""
    found = set()
    entities = {e.id for e in script.references}
    for shot_ in script.shots:
        for event in script.events:
            overlaps = overlap(shot_.time_range, event.time_range).length > EPSILON
            listed = event.id in shot_.active_events
            if listed and not overlaps:
                found.add(("E006", shot_.id, event.id))
            if overlaps and not listed:
                found.add(("W102", shot_.id, event.id))
            if (overlaps and event.type is EventType.DIALOGUE
                    and event.speaker not in shot_.references_in_shot):
                found.add(("W103", event.id, shot_.id))
        for ref in shot_.references_in_shot:
            if ref not in entities:
                found.add(("E001", shot_.id, ref))
    return found


class TestMutations:
    """Every rule fires on a fixture mutated to violate it."""

    def test_catalog_complete(self):
        assert sorted(RULES) == sorted(MUTATIONS)
        assert len(MUTATION_FIXTURES) >= 5

    @pytest.mark.parametrize("code", sorted(MUTATIONS))
    @pytest.mark.parametrize("name", MUTATION_FIXTURES)
    def test_rule_detected(self, code, name):
        mutated = MUTATIONS[code](FIXTURES[name]())
        found = validate(mutated)
        assert code in found.codes(), f"{code} not reported on mutated {name}"
        assert found.with_code(code)[0].severity is RULES[code].severity


class TestPrecision:
    """No false positives on the clean corpus."""

    @pytest.mark.parametrize("name", CLEAN_FIXTURES)
    def test_clean_fixture(self, name):
        script = FIXTURES[name]()
        assert len(validate(script)) == 0
        assert brute_force_findings(script) == set()

    @pytest.mark.parametrize("name", sorted(EXPECTED_FINDINGS))
    def test_single_finding_fixtures(self, name):
        found = validate(FIXTURES[name]())
        assert found.codes() == EXPECTED_FINDINGS[name]

    def test_dangling_reference_names_entity(self, fixture_script):
        found = validate(fixture_script("dangling_reference"))
        assert len(found) == 1
        only = found.items[0]
        assert only.code == "E001"
        assert only.related == ("PERSON_2",)
        assert only.subject == "shots/SHOT_2/references_in_shot"

    def test_listed_event_outside_shot(self, fixture_script):
        script = fixture_script("two_shot_minimal")
        first = script.shot("SHOT_1")
        bad = dataclasses.replace(first, time_range=TimeRange(0, 4),
                                  active_events=("EVENT_9",))
        script = dataclasses.replace(
            script,
            shots=(bad,),
            events=(sfx("EVENT_9", 5, 6, "A bell", "PERSON_1"),))
        assert [d.code for d in validate(script, ["E006"])] == ["E006"]

    def test_unlisted_dialogue(self, fixture_script):
        found = validate(fixture_script("unlisted_event"))
        w102 = found.with_code("W102")
        assert ("EVENT_1",) in [d.related for d in w102]
        assert all(d.severity is Severity.WARNING for d in w102)

    def test_duration_zero_skips_e007(self, fixture_script):
        assert "E007" not in validate(fixture_script("unknown_duration")).codes()

    def test_oracle_agrees_on_unlisted(self, fixture_script):
        script = fixture_script("unlisted_event")
        oracle = {(code, rel) for code, _, rel in brute_force_findings(script)}
        engine = {(d.code, d.related[0]) for d in validate(script, ["W102"])}
        assert engine == oracle

    def test_marker_window_edges(self, fixture_script):
        script = fixture_script("two_shot_minimal")
        first = script.shot("SHOT_1")
        inside = dataclasses.replace(first, visual_description="At the start. [t=0.0] Go.")
        at_end = dataclasses.replace(first, visual_description="At the end. [t=3.0] Go.")
        past = dataclasses.replace(first, visual_description="Later. [t=3.5] Go.")
        assert not validate(dataclasses.replace(script, shots=(inside,)), ["E005"])
        # The window is widened by EPSILON on both sides
        stamps, _ = extract_inline_timestamps(at_end.visual_description)
        assert stamps[0].time == first.time_range.end
        assert not validate(dataclasses.replace(script, shots=(at_end,)), ["E005"])
        assert validate(dataclasses.replace(script, shots=(past,)), ["E005"]).codes() == {"E005"}

    def test_repeated_outside_marker_reported_twice(self, fixture_script):
        script = fixture_script("two_shot_minimal")
        twice = dataclasses.replace(script.shot("SHOT_1"),
                                    visual_description="Waits. [t=3.5] Nods. [t=3.5] Leaves.")
        findings = validate(dataclasses.replace(script, shots=(twice,)), ["E005"]).with_code("E005")
        assert len(findings) == 2
        assert findings[0].message != findings[1].message


class TestDiagnosticSet:
    """Test suite for DiagnosticSet behaviour."""

    @pytest.fixture
    def diagnostics(self):
        return DiagnosticSet.of([
            Diagnostic("W104", Severity.WARNING, "shots/SHOT_10/time_range", "gap"),
            Diagnostic("E001", Severity.ERROR, "shots/SHOT_2/references_in_shot", "x"),
            Diagnostic("E001", Severity.ERROR, "shots/SHOT_2/references_in_shot", "x"),
        ])

    def test_sorted_and_deduplicated(self, diagnostics):
        assert [d.subject for d in diagnostics] == [
            "shots/SHOT_2/references_in_shot", "shots/SHOT_10/time_range"]

    def test_counts(self, diagnostics):
        assert diagnostics.counts == {"error": 1, "warning": 1}
        assert diagnostics.has_errors

    def test_promoted(self, diagnostics):
        promoted = diagnostics.promoted()
        assert promoted.counts == {"error": 2, "warning": 0}

    def test_without(self, diagnostics):
        assert diagnostics.without(["E001"]).codes() == {"W104"}

    def test_difference(self, diagnostics):
        only_warning = diagnostics.without(["E001"])
        assert diagnostics.difference(only_warning).codes() == {"E001"}


class TestDeterminism:
    """validate is a pure function of the script."""

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_repeatable(self, name):
        script = FIXTURES[name]()
        assert validate(script) == validate(script)

    def test_stream_order_irrelevant(self, fixture_script):
        script = mutate_w105(mutate_e001(fixture_script("rooftop_chase")))
        shuffled = dataclasses.replace(script, shots=tuple(reversed(script.shots)),
                                       events=tuple(reversed(script.events)))
        assert validate(shuffled) == validate(script)


class TestCatalog:
    """Test suite for explain_rule and rule dependencies."""

    def test_explain_error_rule(self):
        info = explain_rule("E001")
        assert info.severity is Severity.ERROR
        assert "references_in_shot" in info.title

    def test_explain_warning_rule(self):
        info = explain_rule("w102")
        assert info.code == "W102"
        assert info.severity is Severity.WARNING

    def test_unknown_code(self):
        with pytest.raises(UnknownRuleCode):
            explain_rule("E999")

    def test_subset_of_rules(self, fixture_script):
        script = mutate_w105(mutate_e001(fixture_script("kitchen_tea")))
        assert validate(script, ["W105"]).codes() == {"W105"}

    def test_path_key(self):
        assert path_key("shots/SHOT_3/time_range") == "shots.time_range"
        assert path_key("shots/SHOT_3/camera/movement") == "shots.camera"
        assert path_key("meta/duration") == "meta.duration"
        assert path_key("events/EVENT_4") == "events"

    def test_rules_reading(self):
        assert rules_reading(["shots/SHOT_1/camera/movement"]) == set()
        assert rules_reading(["meta/duration"]) == {"E007"}
        assert "W105" in rules_reading(["events/EVENT_2"])
        assert rules_reading(["shots/SHOT_1/visual_description"]) == {"E005", "W101"}
