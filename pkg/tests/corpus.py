"""
Fixture corpus and random script generators for the test suite.

FIXTURES maps a name to a builder; CLEAN_FIXTURES lists the scripts that
lint to an empty DiagnosticSet. Random generators take a random.Random so
every bulk test is reproducible from its seed.
"""

import dataclasses
import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.core.schema import (
    AppearanceAnchor,
    AudioEvent,
    Camera,
    Category,
    EventType,
    GlobalContext,
    MediaMeta,
    ReferenceEntity,
    Script,
    Shot,
    TimeRange,
    build_script,
    id_prefix,
)
from src.core.timeline import infer_active_events


# --- Builders --------------------------------------------------------------

def entity(id: str, description: str, detail: str, timestamp: float = 0.0,
           **person_fields) -> ReferenceEntity:
    return ReferenceEntity(id, Category[id_prefix(id)], description, timestamp,
                           AppearanceAnchor(detail, **person_fields))


def shot(id: str, start: float, end: float, description: str, refs: Sequence[str] = (),
         movement: Optional[str] = "static", perspective: Optional[str] = "eye-level",
         scale: Optional[str] = "medium") -> Shot:
    return Shot(id, TimeRange(start, end), description,
                Camera(movement, perspective, scale), tuple(refs), ())


def dialogue(id: str, start: float, end: float, speaker: str, line: str,
             description: str = "") -> AudioEvent:
    return AudioEvent(id, EventType.DIALOGUE, TimeRange(start, end), speaker, line, description)


def sfx(id: str, start: float, end: float, description: str,
        source: Optional[str] = None) -> AudioEvent:
    return AudioEvent(id, EventType.SFX, TimeRange(start, end), source, None, description)


def music(id: str, start: float, end: float, description: str) -> AudioEvent:
    return AudioEvent(id, EventType.MUSIC, TimeRange(start, end), None, None, description)


def linked(script: Script) -> Script:
    """Write inferred active_events into every shot."""
    inferred = infer_active_events(script)
    return dataclasses.replace(script, shots=tuple(
        dataclasses.replace(s, active_events=tuple(inferred[s.id])) for s in script.shots))


def make(duration: float, scene: str, references=(), shots=(), events=(),
         style: str = "", audio: str = "", fps: float = 25.0, link: bool = True) -> Script:
    script = build_script(MediaMeta(duration, fps), GlobalContext(scene, style, audio),
                          references, shots, events)
    return linked(script) if link else script


# --- Hand-authored fixtures ------------------------------------------------

def kitchen_tea() -> Script:
    return make(
        8.0, "A small kitchen on a rainy afternoon.",
        [entity("PERSON_1", "An elderly chef, calm and precise", "silver beard, steady hands",
                clothing="white double-breasted jacket"),
         entity("PERSON_2", "A young guest in a raincoat", "wet hair, flushed cheeks", 4.0,
                clothing="yellow raincoat"),
         entity("OBJECT_1", "A copper kettle", "dented copper body, black handle", 1.0)],
        [shot("SHOT_1", 0, 4, "PERSON_1 lifts OBJECT_1 from the stove. [t=2.5] Steam curls "
                              "toward the window.", ["PERSON_1", "OBJECT_1"]),
         shot("SHOT_2", 4, 8, "PERSON_2 takes the cup from PERSON_1 and smiles.",
              ["PERSON_1", "PERSON_2"], "slow push-in", "over-the-shoulder", "close-up")],
        [sfx("EVENT_1", 1, 2, "The kettle whistles", "OBJECT_1"),
         dialogue("EVENT_2", 2.5, 3.5, "PERSON_1", "Tea is ready."),
         dialogue("EVENT_3", 5, 6.5, "PERSON_2", "Thank you, it smells wonderful."),
         music("EVENT_4", 0, 8, "Soft piano in a minor key")],
        style="Warm tungsten light, shallow depth of field",
        audio="Rain against the window",
    )


def two_shot_minimal() -> Script:
    return make(
        6.0, "A doorstep in a quiet street.",
        [entity("PERSON_1", "A courier with a parcel", "blue cap, reflective vest")],
        [shot("SHOT_1", 0, 3, "PERSON_1 knocks on a green door.", ["PERSON_1"]),
         shot("SHOT_2", 3, 6, "PERSON_1 sets the parcel down.", ["PERSON_1"], scale="wide")],
        [dialogue("EVENT_1", 1, 2.5, "PERSON_1", "Delivery!"),
         sfx("EVENT_2", 3.5, 4.5, "Cardboard thuds on stone", "PERSON_1")],
    )


def fox_clearing() -> Script:
    return make(
        9.0, "Dawn in a northern forest.",
        [entity("ANIMAL_1", "A red fox, alert and thin", "russet fur, white-tipped tail", 2.0),
         entity("SCENE_1", "A misty birch clearing at dawn", "pale trunks, low fog")],
        [shot("SHOT_1", 0, 5, "Fog drifts across SCENE_1. [t=2.0] ANIMAL_1 steps out of the "
                              "ferns.", ["ANIMAL_1", "SCENE_1"], "slow pan", None, "wide"),
         shot("SHOT_2", 5, 9, "ANIMAL_1 freezes, ears turned toward the sound.",
              ["ANIMAL_1", "SCENE_1"], None, "low angle", "close-up")],
        [sfx("EVENT_1", 2.5, 3, "A twig snaps under a paw", "ANIMAL_1"),
         music("EVENT_2", 0, 9, "Sparse woodwinds")],
        style="Desaturated greens, soft diffusion",
    )


def hallway_spanning() -> Script:
    return make(
        9.0, "A school hallway after dark.",
        [entity("PERSON_1", "A night guard with a flashlight", "broad shoulders",
                clothing="navy uniform"),
         entity("PERSON_2", "A lost child", "tear-streaked face", 4.0,
                clothing="striped pajamas")],
        [shot("SHOT_1", 0, 4, "PERSON_1 walks the dark hallway.", ["PERSON_1"], "tracking"),
         shot("SHOT_2", 4, 9, "PERSON_1 kneels beside PERSON_2.", ["PERSON_1", "PERSON_2"])],
        [sfx("EVENT_3", 0.5, 1.2, "Footsteps echo", "PERSON_1"),
         dialogue("EVENT_1", 3, 7, "PERSON_1", "Hey there, are you lost? Let's find your parents."),
         dialogue("EVENT_2", 7.2, 8.5, "PERSON_2", "I heard a noise.")],
    )


def rooftop_chase() -> Script:
    return make(
        10.0, "Rooftops of a dense city at dusk.",
        [entity("PERSON_1", "A courier in a red jacket", "wiry build",
                clothing="red windbreaker", accessories="messenger bag"),
         entity("PERSON_2", "A security guard, breathing hard", "heavyset",
                clothing="grey uniform"),
         entity("OBJECT_1", "A metal fire door", "rusted hinges, peeling paint")],
        [shot("SHOT_1", 0, 3, "PERSON_1 bursts through OBJECT_1 onto the roof.",
              ["PERSON_1", "OBJECT_1"], "handheld"),
         shot("SHOT_2", 3, 6, "PERSON_2 follows, scanning the rooftops.", ["PERSON_2"]),
         shot("SHOT_3", 6, 10, "PERSON_1 leaps the gap between buildings. [t=8.0] PERSON_2 "
                               "stops at the edge.", ["PERSON_1", "PERSON_2"], "crane up")],
        [sfx("EVENT_1", 0, 0.8, "The door bangs open", "OBJECT_1"),
         dialogue("EVENT_2", 3.5, 5, "PERSON_2", "Stop right there!"),
         sfx("EVENT_3", 6.5, 7.5, "Shoes slap on tar paper", "PERSON_1"),
         dialogue("EVENT_4", 8.2, 9.5, "PERSON_2", "Unbelievable."),
         music("EVENT_5", 0, 10, "Driving percussion")],
        style="Orange dusk, long lenses",
        audio="Distant traffic and wind",
    )


def market_markers() -> Script:
    return make(
        70.0, "An open-air fruit market.",
        [entity("PERSON_1", "A fruit vendor calling out prices", "sunburnt forearms",
                clothing="green apron"),
         entity("OBJECT_1", "A crate of oranges", "wooden crate, stenciled label")],
        [shot("SHOT_1", 0, 60, "PERSON_1 stacks OBJECT_1 by the stall. [t=00:30.0] A customer "
                               "points at the oranges. [t=00:45.5] PERSON_1 bags a dozen.",
              ["PERSON_1", "OBJECT_1"]),
         shot("SHOT_2", 60, 70, "PERSON_1 counts coins. [t=01:02.5] The crate is empty.",
              ["PERSON_1", "OBJECT_1"])],
        [dialogue("EVENT_1", 31, 33, "PERSON_1", "Three for a euro!"),
         sfx("EVENT_2", 46, 47, "Oranges tumble into a paper bag", "OBJECT_1"),
         sfx("EVENT_3", 62.5, 63, "Coins clink", "PERSON_1")],
    )


def single_monologue() -> Script:
    return make(
        12.0, "Inside a failing space capsule.",
        [entity("PERSON_1", "An astronaut recording a log", "cracked visor",
                clothing="white pressure suit"),
         entity("SCENE_1", "A cramped capsule", "blinking panels, loose cables")],
        [shot("SHOT_1", 0, 12, "PERSON_1 floats in SCENE_1, facing the camera.",
              ["PERSON_1", "SCENE_1"], "static", "frontal", "medium close-up")],
        [sfx("EVENT_3", 0, 12, "Panels hum and beep", "SCENE_1"),
         dialogue("EVENT_1", 1, 6, "PERSON_1", "Day forty. The oxygen scrubber is failing."),
         dialogue("EVENT_2", 6.5, 11, "PERSON_1", "If anyone hears this, tell them we tried.")],
    )


def empty_streams() -> Script:
    return make(10.0, "A room.")


def unknown_duration() -> Script:
    return make(0.0, "A bare stage.", shots=[shot("SHOT_1", 0, 5, "An empty spotlight.")])


def noncanonical_order() -> Script:
    script = make(
        6.0, "A workshop.",
        [entity("PERSON_2", "An apprentice", "ink-stained fingers"),
         entity("PERSON_1", "A clockmaker", "magnifying loupe")],
        [shot("SHOT_2", 3, 6, "PERSON_1 hands a gear to PERSON_2.", ["PERSON_2", "PERSON_1"]),
         shot("SHOT_1", 0, 3, "PERSON_2 and PERSON_1 lean over the bench.",
              ["PERSON_2", "PERSON_1"])],
        [sfx("EVENT_2", 3.2, 3.6, "A gear clicks into place", "PERSON_1"),
         sfx("EVENT_1", 0.5, 5.5, "Dozens of clocks tick", "PERSON_1")],
    )
    return dataclasses.replace(script, shots=tuple(
        dataclasses.replace(s, active_events=tuple(reversed(s.active_events)))
        for s in script.shots))


def dialogue_heavy_cafe() -> Script:
    both = ["PERSON_1", "PERSON_2"]
    lines = ["Morning. The usual?", "Make it a double.", "Rough night?", "Rough year.",
             "This one is on the house.", "You are a saint.", "Go get them.",
             "See you tomorrow."]
    events = [dialogue(f"EVENT_{i + 1}", 2 * i + 0.2, 2 * i + 1.8,
                       "PERSON_1" if i % 2 == 0 else "PERSON_2", line)
              for i, line in enumerate(lines)]
    events.append(sfx("EVENT_9", 4.5, 5, "The espresso machine hisses", "PERSON_1"))
    return make(
        16.0, "A corner cafe just before sunrise.",
        [entity("PERSON_1", "A barista with tattoos", "inked forearms", clothing="black apron"),
         entity("PERSON_2", "A regular customer, tired", "dark circles", clothing="wrinkled suit")],
        [shot("SHOT_1", 0, 4, "PERSON_1 wipes the counter as PERSON_2 walks in.", both),
         shot("SHOT_2", 4, 8, "PERSON_1 pulls a shot of espresso.", both),
         shot("SHOT_3", 8, 12, "PERSON_2 slumps onto a stool.", both),
         shot("SHOT_4", 12, 16, "PERSON_2 lifts the cup in a small salute to PERSON_1.", both)],
        events,
        style="Blue hour light through fogged glass",
    )


def dialogue_heavy_phone() -> Script:
    refs = ["PERSON_1", "OBJECT_1"]
    lines = ["Yes, this is Harlow.", "When did you last see her?", "Which station?",
             "Don't touch anything.", "I'm on my way.", "Twenty minutes."]
    events = [dialogue(f"EVENT_{i + 2}", 2 * i + 0.6, 2 * i + 1.9, "PERSON_1", line)
              for i, line in enumerate(lines)]
    events.append(sfx("EVENT_1", 0, 0.5, "The phone rings twice", "OBJECT_1"))
    return make(
        12.0, "A cluttered detective office at night.",
        [entity("PERSON_1", "A detective on the phone", "unshaven", clothing="trench coat"),
         entity("OBJECT_1", "A black rotary phone", "coiled cord")],
        [shot("SHOT_1", 0, 4, "PERSON_1 picks up OBJECT_1.", refs),
         shot("SHOT_2", 4, 8, "PERSON_1 scribbles an address.", refs, "slow dolly"),
         shot("SHOT_3", 8, 12, "PERSON_1 slams OBJECT_1 down and grabs his hat.", refs)],
        events,
    )


def full_bank() -> Script:
    return make(
        8.0, "A park path in autumn.",
        [entity("SCENE_1", "A leafy park path", "red maples"),
         entity("ANIMAL_1", "A small terrier", "wiry coat"),
         entity("OBJECT_1", "A green bench", "flaking paint"),
         entity("PERSON_1", "A jogger taking a break", "flushed face", clothing="running tights")],
        [shot("SHOT_1", 0, 8, "PERSON_1 walks ANIMAL_1 past OBJECT_1 through SCENE_1.",
              ["SCENE_1", "ANIMAL_1", "OBJECT_1", "PERSON_1"])],
        [sfx("EVENT_1", 2, 3, "A dog barks", "ANIMAL_1")],
    )


def unicode_cafe() -> Script:
    return make(
        5.0, "Une pâtisserie parisienne.",
        [entity("PERSON_1", "Zoë, a pâtissier", "flour on the cheeks", clothing="tablier blanc")],
        [shot("SHOT_1", 0, 5, "PERSON_1 glazes a tarte aux pommes, carefully.", ["PERSON_1"])],
        [dialogue("EVENT_1", 1, 3, "PERSON_1", "Voilà, c'est prêt !")],
    )


def music_only() -> Script:
    return make(
        6.0, "A city at night.",
        [entity("SCENE_1", "A city skyline at night", "neon towers")],
        [shot("SHOT_1", 0, 3, "SCENE_1 glitters.", ["SCENE_1"], "aerial drift"),
         shot("SHOT_2", 3, 6, "Traffic streams below SCENE_1.", ["SCENE_1"])],
        [music("EVENT_1", 0, 6, "Slow synth pads")],
    )


# Fixtures with exactly one known kind of finding

def dangling_reference() -> Script:
    script = two_shot_minimal()
    shot_2 = script.shot("SHOT_2")
    return dataclasses.replace(script, shots=(
        script.shot("SHOT_1"),
        dataclasses.replace(shot_2, references_in_shot=("PERSON_1", "PERSON_2"))))


def gap_between_shots() -> Script:
    return make(
        6.0, "A corridor.",
        [entity("PERSON_1", "A janitor", "grey overalls")],
        [shot("SHOT_1", 0, 3, "PERSON_1 mops the floor.", ["PERSON_1"]),
         shot("SHOT_2", 3.5, 6, "PERSON_1 leans on the mop.", ["PERSON_1"])],
    )


def offscreen_speaker() -> Script:
    return make(
        4.0, "A dark stairwell.",
        [entity("PERSON_1", "A tenant", "slippers"),
         entity("PERSON_2", "A neighbour upstairs", "unseen")],
        [shot("SHOT_1", 0, 4, "PERSON_1 looks up the stairs.", ["PERSON_1"])],
        [dialogue("EVENT_1", 1, 2, "PERSON_2", "Who's there?")],
    )


def unlisted_event() -> Script:
    script = two_shot_minimal()
    return dataclasses.replace(script, shots=tuple(
        dataclasses.replace(s, active_events=()) for s in script.shots))


def sourceless_sfx() -> Script:
    return make(
        4.0, "A quiet library.",
        [entity("PERSON_1", "A librarian", "half-moon glasses")],
        [shot("SHOT_1", 0, 4, "PERSON_1 shelves a book.", ["PERSON_1"])],
        [sfx("EVENT_1", 1, 1.5, "Something falls in the stacks")],
    )


def unused_entity() -> Script:
    return make(
        4.0, "A garage.",
        [entity("PERSON_1", "A mechanic", "oily hands"),
         entity("OBJECT_1", "A spare tyre", "bald tread")],
        [shot("SHOT_1", 0, 4, "PERSON_1 tightens a bolt.", ["PERSON_1"])],
    )


def overlapping_shots() -> Script:
    return make(
        6.0, "A boxing gym.",
        [entity("PERSON_1", "A boxer", "taped hands")],
        [shot("SHOT_1", 0, 4, "PERSON_1 hits the bag.", ["PERSON_1"]),
         shot("SHOT_2", 3, 6, "PERSON_1 catches her breath.", ["PERSON_1"])],
    )


def outside_marker() -> Script:
    return make(
        8.0, "A train platform.",
        [entity("PERSON_1", "A commuter", "wool coat")],
        [shot("SHOT_1", 0, 4, "PERSON_1 checks the board. [t=5.0] The train pulls in.",
              ["PERSON_1"]),
         shot("SHOT_2", 4, 8, "PERSON_1 boards.", ["PERSON_1"])],
    )


FIXTURES: Dict[str, Callable[[], Script]] = {
    "kitchen_tea": kitchen_tea,
    "two_shot_minimal": two_shot_minimal,
    "fox_clearing": fox_clearing,
    "hallway_spanning": hallway_spanning,
    "rooftop_chase": rooftop_chase,
    "market_markers": market_markers,
    "single_monologue": single_monologue,
    "empty_streams": empty_streams,
    "unknown_duration": unknown_duration,
    "noncanonical_order": noncanonical_order,
    "dialogue_heavy_cafe": dialogue_heavy_cafe,
    "dialogue_heavy_phone": dialogue_heavy_phone,
    "full_bank": full_bank,
    "unicode_cafe": unicode_cafe,
    "music_only": music_only,
    "dangling_reference": dangling_reference,
    "gap_between_shots": gap_between_shots,
    "offscreen_speaker": offscreen_speaker,
    "unlisted_event": unlisted_event,
    "sourceless_sfx": sourceless_sfx,
    "unused_entity": unused_entity,
    "overlapping_shots": overlapping_shots,
    "outside_marker": outside_marker,
}

CLEAN_FIXTURES = [
    "kitchen_tea", "two_shot_minimal", "fox_clearing", "hallway_spanning", "rooftop_chase",
    "market_markers", "single_monologue", "empty_streams", "unknown_duration",
    "noncanonical_order", "dialogue_heavy_cafe", "dialogue_heavy_phone", "full_bank",
    "unicode_cafe", "music_only",
]

# Clean, with shots and a known duration: targets for lint mutations
MUTATION_FIXTURES = [
    "kitchen_tea", "two_shot_minimal", "fox_clearing", "hallway_spanning", "rooftop_chase",
    "market_markers", "single_monologue", "dialogue_heavy_cafe", "full_bank", "music_only",
]

DIALOGUE_HEAVY = ["dialogue_heavy_cafe", "dialogue_heavy_phone"]

# Fixture -> the only rule codes it should trigger
EXPECTED_FINDINGS = {
    "dangling_reference": {"E001"},
    "gap_between_shots": {"W104"},
    "offscreen_speaker": {"W103"},
    "unlisted_event": {"W102"},
    "sourceless_sfx": {"W105"},
    "unused_entity": {"W101"},
    "overlapping_shots": {"E004"},
    "outside_marker": {"E005"},
}


# --- Random generators -----------------------------------------------------

_NOUNS = ["lantern", "violin", "harbour", "mirror", "courier", "orchard", "engine", "falcon",
          "ribbon", "glacier", "teacup", "compass", "curtain", "ladder", "meadow", "piano"]
_ADJECTIVES = ["quiet", "rusted", "golden", "restless", "pale", "crooked", "bright",
               "ancient", "nervous", "silver", "heavy", "tiny"]
_VERBS = ["glances at", "circles", "reaches for", "walks past", "stares at", "lifts",
          "ignores", "points at"]
_LINES = ["Where were you?", "Not now.", "It's beautiful.", "Keep moving!", "I knew it.",
          "Hand me that.", "Listen.", "We're late again."]


def _words(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(_ADJECTIVES + _NOUNS) for _ in range(n))


def _ms(rng: random.Random, low: float, high: float) -> float:
    """Random millisecond-quantized time in [low, high)."""
    lo, hi = round(low * 1000), round(high * 1000)
    return rng.randrange(lo, hi) / 1000 if hi > lo else lo / 1000


def random_tiling(rng: random.Random, n: int, duration: Optional[float] = None) -> List[float]:
    """n+1 strictly increasing cut points from 0 to the end."""
    if duration is None:
        cuts = [0.0]
        for _ in range(n):
            cuts.append(round(cuts[-1] + rng.randint(5, 40) / 10, 3))
        return cuts
    inner = sorted(rng.sample(range(1, round(duration * 10)), n - 1)) if n > 1 else []
    return [0.0] + [c / 10 for c in inner] + [duration]


def random_entities(rng: random.Random, count: int) -> List[ReferenceEntity]:
    counters = {c: 0 for c in Category}
    entities = []
    for _ in range(count):
        category = rng.choice(list(Category))
        counters[category] += 1
        id_ = f"{category.prefix}_{counters[category]}"
        extras = {}
        if category is Category.PERSON and rng.random() < 0.5:
            extras["clothing"] = _words(rng, 2)
        entities.append(entity(id_, f"A {_words(rng, rng.randint(1, 4))}, {_words(rng, 2)}",
                               _words(rng, 3), **extras))
    return entities


def _description(rng: random.Random, start: float, end: float, refs: Sequence[str],
                 markers: bool) -> str:
    sentences = []
    times = sorted(_ms(rng, start, end) for _ in range(rng.randint(0, 2))) if markers else []
    for i in range(rng.randint(1, 3)):
        subject = rng.choice(list(refs)) if refs and rng.random() < 0.7 else f"The {_words(rng, 1)}"
        sentence = f"{subject} {rng.choice(_VERBS)} the {_words(rng, 2)}."
        if i > 0 and times:
            sentence = f"[t={times.pop(0)}] {sentence}"
        sentences.append(sentence)
    return " ".join(sentences)


def random_events(rng: random.Random, count: int, duration: float,
                  entities: Sequence[ReferenceEntity], first_id: int = 1) -> List[AudioEvent]:
    events = []
    ids = [e.id for e in entities]
    for i in range(count):
        start = _ms(rng, 0, duration - 0.1)
        end = min(duration, round(start + rng.randint(1, 40) / 10, 3))
        id_ = f"EVENT_{first_id + i}"
        kind = rng.choice(list(EventType)) if ids else rng.choice([EventType.SFX, EventType.MUSIC])
        if kind is EventType.DIALOGUE:
            events.append(dialogue(id_, start, end, rng.choice(ids), rng.choice(_LINES)))
        elif kind is EventType.SFX:
            source = rng.choice(ids) if ids and rng.random() < 0.7 else None
            events.append(sfx(id_, start, end, f"A {_words(rng, 2)} rattles", source))
        else:
            events.append(music(id_, start, end, f"{_words(rng, 2).capitalize()} strings"))
    return events


def random_script(rng: random.Random, max_shots: int = 6, max_events: int = 6,
                  max_entities: int = 4, markers: bool = True) -> Script:
    """A tiled, linked script free of lint errors (warnings possible)."""
    entities = random_entities(rng, rng.randint(0, max_entities))
    cuts = random_tiling(rng, rng.randint(1, max_shots))
    ids = [e.id for e in entities]
    shots = []
    for i, (start, end) in enumerate(zip(cuts, cuts[1:])):
        refs = rng.sample(ids, rng.randint(0, len(ids))) if ids else []
        camera = rng.choice(["static", "pan left", "dolly in", "handheld"])
        shots.append(shot(f"SHOT_{i + 1}", start, end,
                          _description(rng, start, end, refs, markers), refs, camera))
    events = random_events(rng, rng.randint(0, max_events), cuts[-1], entities)
    return make(cuts[-1], f"A {_words(rng, 3)} place.", entities, shots, events,
                style=rng.choice(["", "Grainy film stock"]),
                audio=rng.choice(["", "Low wind"]))


def random_interval_script(rng: random.Random, max_shots: int = 50,
                           max_events: int = 50) -> Script:
    """Arbitrary (possibly overlapping) shots and events on a 0-20 s axis."""
    def ranges(count: int) -> List[Tuple[float, float]]:
        out = []
        for _ in range(count):
            start = _ms(rng, 0, 19.9)
            out.append((start, round(start + rng.randint(1, 6000) / 1000, 3)))
        return out

    shots = [shot(f"SHOT_{i + 1}", s, e, "A frame.")
             for i, (s, e) in enumerate(ranges(rng.randint(0, max_shots)))]
    events = [sfx(f"EVENT_{i + 1}", s, e, "A sound.")
              for i, (s, e) in enumerate(ranges(rng.randint(0, max_events)))]
    return make(0.0, "Random intervals.", shots=shots, events=events, link=False)


def random_eval_pair(rng: random.Random, max_items: int = 6) -> Tuple[Script, Script]:
    """Gold and candidate scripts sharing duration and fps."""
    duration = rng.randint(20, 60) / 2

    def one() -> Script:
        entities = random_entities(rng, rng.randint(0, max_items))
        cuts = random_tiling(rng, rng.randint(1, max_items), duration)
        shots = [shot(f"SHOT_{i + 1}", s, e, "A shot.") for i, (s, e) in enumerate(zip(cuts, cuts[1:]))]
        events = random_events(rng, rng.randint(0, max_items), duration, entities)
        return make(duration, "Evaluation scene.", entities, shots, events)

    return one(), one()
