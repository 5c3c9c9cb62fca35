#!/usr/bin/env python3
"""Regenerate the bundled fixture song and its mock LLM table.

The song is synthetic: 19 lines, 105 words, with ground-truth word timings
(words.json). The subtitle track derives from the ground truth with seeded
+-200 ms cue jitter and ~10% token noise, bounded so every line still
clears the fuzzy-match threshold. Run from the repo root:

    python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from elmi.analysis.mocktable import build_analysis_mock_table
from elmi.analysis.models import AltGlosses, ChallengeKind, ChallengeNote
from elmi.analysis.stages import BatchLine
from elmi.core import tokenize_gloss
from elmi.textsources import parse_lyrics

ROOT = Path(__file__).resolve().parent.parent
SONG_DIR = ROOT / "fixtures" / "night-drive"

TITLE = "Night Drive"
ARTIST = "The City Lights"
NICKNAME = "signer"
PROFICIENCY = "moderate"
SIGN_LANGUAGE = "ASL"
DESCRIPTION = (
    "Night Drive is a synth-pop single by The City Lights, running three and "
    "a half minutes. Written after a coastal tour, it pairs a steady motorik "
    "beat with bright arpeggios; the band has described it as a song about "
    "shaking off a hard week by driving until the city feels small."
)

SECTIONS = [
    (
        "Verse 1",
        [
            "Golden light on the harbor tonight",
            "Jump up to the top, LeBron",
            "Chasing echoes down the avenue",
            "Cool shade stunner in the rearview",
            "Hot like summer on my skin",
            "Every heartbeat drums a new begin",
            "Break it down",
        ],
    ),
    (
        "Pre-Chorus",
        [
            "Hold the wheel, feel the night",
            "City lights are burning bright",
            "Every shadow fades from sight",
            "We ride until the morning light",
        ],
    ),
    (
        "Chorus",
        [
            "Night drive, we glide through rain",
            "Night drive, we sing the pain",
            "Smooth like butter on the lane",
            "Stars above us call my name",
            "Take my hand, feel the beat",
            "Move your body to the street",
            "Night drive, the city our stage",
            "Break it down",
        ],
    ),
]

BASE_GLOSSES = {
    0: "GOLD LIGHT HARBOR TONIGHT",
    1: "JUMP TOP F-S 'L-E-B-R-O-N'",
    2: "ME CHASE ECHO STREET",
    3: "COOL SHADE AWESOME PERSON",
    4: "HOT SAME-AS SUMMER SKIN",
    5: "HEARTBEAT DRUM NEW START",
    6: "RELAX ENJOY",
    7: "HOLD WHEEL FEEL NIGHT",
    8: "CITY LIGHT BURN BRIGHT",
    9: "SHADOW DISAPPEAR",
    10: "WE DRIVE UNTIL MORNING",
    11: "NIGHT DRIVE GLIDE RAIN",
    12: "NIGHT DRIVE SING PAIN AWAY",
    13: "SMOOTH SAME-AS BUTTER [glide hands]",
    14: "STAR ABOVE CALL MY NAME",
    15: "TAKE MY HAND FEEL BEAT",
    16: "MOVE BODY STREET DANCE",
    17: "NIGHT DRIVE CITY OUR STAGE",
    18: "RELAX ENJOY DANCE",
}

# three flagged lines: a cultural reference, a poetic image, a simile
NOTES = {
    1: ChallengeNote(1, ChallengeKind.CULTURAL,
                     "Names a famous basketball player; audiences unfamiliar "
                     "with US sports may need context or fingerspelling.", True),
    3: ChallengeNote(3, ChallengeKind.POETIC,
                     "A compressed poetic image: sunglasses standing in for a "
                     "confident, stylish person."),
    13: ChallengeNote(13, ChallengeKind.POETIC,
                      "A simile comparing motion to butter; the feel matters "
                      "more than the word."),
}

GUIDE_TEXTS = {
    0: "Let your hands open slowly like light spreading over water, with a calm, warm face.",
    1: "Raise your eyebrows and smile widely to carry the playful boast; make the jump sign big.",
    2: "Lean forward slightly as you sign, as if following something just out of reach.",
    3: "Hold a cool, relaxed expression; a small head tilt sells the confidence.",
    4: "Let warmth show on your face; sign SUMMER with a lazy, heavy rhythm.",
    5: "Pulse your signs with the beat so the heartbeat image lands visually.",
    6: "Drop your shoulders and grin; this is the release moment of the verse.",
    7: "Grip an imaginary wheel firmly, then soften into FEEL with closed eyes.",
    8: "Widen your eyes and brighten your face as the lights come up.",
    9: "Sweep the shadows away with a light, dismissive flick and a relieved face.",
    10: "Settle into a steady rocking rhythm, gaze forward like watching the road.",
    11: "Glide both hands smoothly on GLIDE; keep the face serene under the rain image.",
    12: "Sign PAIN briefly, then let your whole posture lift as it leaves.",
    13: "Make the glide continuous and effortless; the smoothness carries the simile.",
    14: "Look up on STAR and hold the sign a beat longer, like hearing your name.",
    15: "Reach toward the audience on TAKE, inviting them in with raised brows.",
    16: "Let your torso join the movement; this line is all body rhythm.",
    17: "Open your arms wide on STAGE, claiming the space with a proud face.",
    18: "Repeat the release from the verse but bigger; this is the final break.",
}

MOODS = {
    0: ("#warm", "#hopeful"),
    1: ("#playful", "#confident"),
    2: ("#restless", "#curious"),
    3: ("#cool", "#confident"),
    4: ("#warm", "#sensual"),
    5: ("#energized", "#fresh"),
    6: ("#loose", "#joyful"),
    7: ("#focused", "#calm"),
    8: ("#bright", "#awake"),
    9: ("#relieved", "#light"),
    10: ("#steady", "#devoted"),
    11: ("#free", "#flowing"),
    12: ("#cathartic", "#uplifted"),
    13: ("#smooth", "#easy"),
    14: ("#wonder", "#tender"),
    15: ("#inviting", "#warm"),
    16: ("#groovy", "#bold"),
    17: ("#proud", "#electric"),
    18: ("#joyful", "#explosive"),
}


def make_alternatives(base: str) -> AltGlosses:
    tokens = [t.surface for t in tokenize_gloss(base)]
    shorter = " ".join(tokens[:-1])
    base_alt = " ".join(tokens[1:] + tokens[:1])
    longer = " ".join(tokens + ["[hold]"])
    return AltGlosses(shorter=shorter, base_alt=base_alt, longer=longer)


NOISE_TOKENS = ["oh", "yeah", "la", "mm", "hey"]


def main() -> None:
    rng = random.Random(20240615)
    SONG_DIR.mkdir(parents=True, exist_ok=True)

    lyrics_rows = []
    flat_lines = []
    for label, lines in SECTIONS:
        lyrics_rows.append(f"[{label}]")
        lyrics_rows.extend(lines)
        flat_lines.extend(lines)
    lyrics_text = "\n".join(lyrics_rows) + "\n"

    total_words = sum(len(line.split()) for line in flat_lines)
    assert len(flat_lines) == 19, len(flat_lines)
    assert total_words == 105, total_words

    # ground-truth word timings: 250 ms line margin, 1000 ms between lines
    words = []
    line_word_spans = []
    t = 1500
    for line in flat_lines:
        starts = []
        for surface in line.split():
            duration = rng.randint(280, 430)
            words.append({"surface": surface, "start_ms": t, "duration_ms": duration})
            starts.append((t, duration))
            t += duration + rng.randint(60, 120)
        line_word_spans.append((starts[0][0], starts[-1][0] + starts[-1][1]))
        t += 1000  # inter-line gap
    duration_ms = t + 1500

    # subtitle cues: envelope +-250 ms margin, then seeded jitter and noise
    cues = []
    for index, line in enumerate(flat_lines):
        w_start, w_end = line_word_spans[index]
        start = w_start - 250 + rng.randint(-200, 200)
        end = w_end + 250 + rng.randint(-200, 200)
        tokens = line.split()
        budget = int(0.4 * len(tokens)) - 1  # keep similarity safely above 0.6
        noised = []
        replaced = 0
        for token in tokens:
            if replaced < budget and rng.random() < 0.10:
                noised.append(rng.choice(NOISE_TOKENS))
                replaced += 1
            else:
                noised.append(token)
        cues.append((start, end, " ".join(noised)))

    vtt_blocks = ["WEBVTT"]
    for start, end, text in cues:
        vtt_blocks.append(f"{_stamp(start)} --> {_stamp(end)}\n{text}")
    vtt_text = "\n\n".join(vtt_blocks) + "\n"

    (SONG_DIR / "lyrics.txt").write_text(lyrics_text, encoding="utf-8")
    (SONG_DIR / "description.txt").write_text(DESCRIPTION + "\n", encoding="utf-8")
    (SONG_DIR / "words.json").write_text(
        json.dumps(words, indent=1), encoding="utf-8"
    )
    (SONG_DIR / "subs.vtt").write_text(vtt_text, encoding="utf-8")
    (SONG_DIR / "meta.json").write_text(
        json.dumps(
            {
                "title": TITLE,
                "artist": ARTIST,
                "video_url": "https://video.example/night-drive",
                "duration_ms": duration_ms,
            },
            indent=1,
        ),
        encoding="utf-8",
    )

    # mock LLM table for the analysis chain
    doc = parse_lyrics(lyrics_text)
    batch_lines = [
        BatchLine(i, section, text) for i, (section, text) in enumerate(doc.flat_lines())
    ]
    metadata = {
        "title": TITLE,
        "artist": ARTIST,
        "description": DESCRIPTION,
        "sign_language": SIGN_LANGUAGE,
        "nickname": NICKNAME,
        "proficiency": PROFICIENCY,
    }
    notes = {
        i: NOTES.get(i, ChallengeNote(i, ChallengeKind.NONE)) for i in range(19)
    }
    guides = {i: (MOODS[i], GUIDE_TEXTS[i]) for i in range(19)}
    alternatives = {i: make_alternatives(BASE_GLOSSES[i]) for i in range(19)}
    table = build_analysis_mock_table(
        batch_lines, metadata, SIGN_LANGUAGE, notes, BASE_GLOSSES, guides, alternatives
    )
    (ROOT / "fixtures" / "mock_llm.json").write_text(
        json.dumps(table, indent=1, sort_keys=True), encoding="utf-8"
    )
    print(f"wrote {SONG_DIR} ({total_words} words, {len(cues)} cues, "
          f"{len(table)} mock entries, duration {duration_ms} ms)")


def _stamp(ms: int) -> str:
    s, millis = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d}.{millis:03d}"


if __name__ == "__main__":
    main()
