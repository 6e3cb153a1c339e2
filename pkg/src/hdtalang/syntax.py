"""Text notation for conclists, step letters, ipomsets, tipomsets and idwords.

Grammar (whitespace is insignificant inside braces)::

    conclist  := label ('<' label)*  |  ''
    letter    := 'id{' conclist '}'
               | ('start'|'starter') '{' conclist '}'            # starts every event
               | ('start'|'starter') '{carrier:' conclist ';' 'start:' names '}'
               | ('term'|'terminator') '{' conclist '}'         # terminates every event
               | ('term'|'terminator') '{carrier:' conclist ';' 'end:' names '}'
    names     := name (',' name)*     name := label | label '#' k   (k-th occurrence)
    ipomset   := '{events:' ev (',' ev)* ';' 'prec:' chains ';' 'evord:' chains ';'
                 'S:' ids ';' 'T:' ids '}'
               | word                  # e.g. "ab", or "a.b" for longer labels
               | '[' label ('||' label)* ']'
    ev        := id ':' label ( '[' rat ',' rat ']' )?
    chains    := (id ('<' id)*) (',' ...)*    # each chain contributes its pairs
    tipomset  := ipomset-with-intervals '@' rat
    idword    := (letter | rat)+             # tokens separated by whitespace
    rat       := integer | decimal | p '/' q

Relations are closed transitively on parse.  Formatting prints full
relations, so parse(format(x)) reproduces ``x`` exactly.
"""

from __future__ import annotations

import re

from .ipomsets import IpomsetError, START, TERM, Conclist, Ipomset, StepLetter, transitive_closure
from .timed import DelayWord, IdWord, Tipomset, as_rational, format_rational, normalize_idword


class SyntaxErr(ValueError):
    """Raised on malformed notation."""


_LETTER_RE = re.compile(r"^\s*(id|start|starter|term|terminator)\s*\{(.*)\}\s*$", re.S)
_TOKEN_RE = re.compile(r"[A-Za-z_]+\s*\{[^}]*\}|[^\s]+")


# ---------------------------------------------------------------------------
# letters


def format_letter(letter: StepLetter) -> str:
    c = letter.carrier
    if letter.kind == START or letter.kind == TERM:
        if len(letter.moved) == len(c):
            return f"{letter.kind}{{{c}}}"
        names = ",".join(c.position_name(i) for i in sorted(letter.moved))
        key = "start" if letter.kind == START else "end"
        return f"{letter.kind}{{carrier: {c}; {key}: {names}}}"
    return f"id{{{c}}}"


def parse_conclist(text: str) -> Conclist:
    try:
        return Conclist.of(text)
    except IpomsetError as exc:
        raise SyntaxErr(str(exc)) from exc


def parse_letter(text: str) -> StepLetter:
    m = _LETTER_RE.match(text)
    if not m:
        raise SyntaxErr(f"not a step letter: {text!r}")
    head, body = m.group(1), m.group(2).strip()
    kind = {"id": "id", "start": START, "starter": START, "term": TERM, "terminator": TERM}[head]
    try:
        if ":" not in body:
            carrier = Conclist.of(body)
            if kind == "id":
                return StepLetter.identity(carrier)
            return StepLetter(carrier, kind, frozenset(range(len(carrier))))
        fields = _fields(body)
        carrier = Conclist.of(fields.pop("carrier", ""))
        key = "start" if kind == START else "end"
        names = [n for n in re.split(r"[,\s]+", fields.pop(key, "")) if n]
        if fields or kind == "id":
            raise SyntaxErr(f"unexpected fields in letter {text!r}")
        return StepLetter(carrier, kind, carrier.resolve(names))
    except IpomsetError as exc:
        raise SyntaxErr(f"{text!r}: {exc}") from exc


def _fields(body: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition(":")
        if not sep:
            raise SyntaxErr(f"expected 'key: value', got {part!r}")
        key = key.strip()
        if key in out:
            raise SyntaxErr(f"duplicate field {key!r}")
        out[key] = value.strip()
    return out


# ---------------------------------------------------------------------------
# ipomsets and tipomsets


def _event_name(i: int) -> str:
    return f"x{i + 1}"


def _format_body(p: Ipomset, intervals=None) -> str:
    evs = []
    for x in p.events:
        item = f"{_event_name(x)}:{p.labels[x]}"
        if intervals is not None:
            s, e = intervals[x]
            item += f"[{format_rational(s)},{format_rational(e)}]"
        evs.append(item)

    def rel(pairs):
        return ", ".join(f"{_event_name(a)}<{_event_name(b)}" for a, b in sorted(pairs))

    def ids(es):
        return ", ".join(_event_name(e) for e in sorted(es))

    return (
        f"{{events: {', '.join(evs)}; prec: {rel(p.prec)}; evord: {rel(p.evord)}; "
        f"S: {ids(p.sources)}; T: {ids(p.targets)}}}"
    )


def format_ipomset(p: Ipomset) -> str:
    return _format_body(p)


def format_compact(p: Ipomset) -> str:
    """Short form for words and interface-free discrete ipomsets, else full."""
    if not p.sources and not p.targets and len(p):
        c = p.canonical()
        if c.is_word:
            order = sorted(c.events, key=lambda e: sum((z, e) in c.prec for z in c.events))
            labels = [c.labels[e] for e in order]
            return "".join(labels) if all(len(a) == 1 for a in labels) else ".".join(labels)
        if c.is_discrete:
            return "[" + "||".join(c.labels[e] for e in c.evsort(c.events)) + "]"
    return format_ipomset(p)


def format_tipomset(t: Tipomset) -> str:
    body = _format_body(t.ipomset, [t.interval(x) for x in t.ipomset.events])
    return f"{body} @{format_rational(t.duration)}"


_EVENT_RE = re.compile(r"^([^:\s]+)\s*:\s*([^\[\s]+)\s*(?:\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\])?$")


# commas outside interval brackets
_EVENT_SPLIT_RE = re.compile(r",(?![^\[]*\])")


def _parse_body(text: str, timed: bool):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise SyntaxErr(f"expected '{{...}}': {text!r}")
    fields = _fields(text[1:-1])
    unknown = set(fields) - {"events", "prec", "evord", "S", "T"}
    if unknown:
        raise SyntaxErr(f"unknown fields {sorted(unknown)}")
    names: dict[str, int] = {}
    labels: list[str] = []
    intervals = []
    for item in [s.strip() for s in _EVENT_SPLIT_RE.split(fields.get("events", "")) if s.strip()]:
        m = _EVENT_RE.match(item)
        if not m:
            raise SyntaxErr(f"bad event {item!r}")
        name, label, s, e = m.groups()
        if name in names:
            raise SyntaxErr(f"duplicate event {name!r}")
        if timed and s is None:
            raise SyntaxErr(f"event {name!r} needs an interval [start,end]")
        if not timed and s is not None:
            raise SyntaxErr(f"untimed event {name!r} carries an interval")
        names[name] = len(labels)
        labels.append(label)
        if timed:
            intervals.append((as_rational(s), as_rational(e)))

    def lookup(n: str) -> int:
        n = n.strip()
        if n not in names:
            raise SyntaxErr(f"unknown event {n!r}")
        return names[n]

    def chains(text: str) -> frozenset:
        pairs = set()
        for chain in [c for c in text.split(",") if c.strip()]:
            ids = [lookup(n) for n in chain.split("<")]
            pairs.update(zip(ids, ids[1:]))
        return transitive_closure(pairs)

    def idset(text: str) -> frozenset:
        return frozenset(lookup(n) for n in text.split(",") if n.strip())

    try:
        p = Ipomset(
            tuple(labels),
            chains(fields.get("prec", "")),
            chains(fields.get("evord", "")),
            idset(fields.get("S", "")),
            idset(fields.get("T", "")),
        )
    except IpomsetError as exc:
        raise SyntaxErr(str(exc)) from exc
    return p, intervals


def parse_ipomset(text: str) -> Ipomset:
    text = text.strip()
    if text.startswith("{"):
        return _parse_body(text, timed=False)[0]
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        labels = [a.strip() for a in inner.split("||")] if inner else []
        if any(not a for a in labels):
            raise SyntaxErr(f"bad parallel term {text!r}")
        return Ipomset.discrete(Conclist(tuple(labels)))
    if not text:
        return Ipomset(())
    if not re.fullmatch(r"[A-Za-z0-9_.]+", text):
        raise SyntaxErr(f"not an ipomset: {text!r}")
    labels = text.split(".") if "." in text else list(text)
    if any(not a for a in labels):
        raise SyntaxErr(f"bad word {text!r}")
    return Ipomset.word(labels)


def parse_tipomset(text: str) -> Tipomset:
    text = text.strip()
    body, sep, dur = text.rpartition("@")
    if not sep:
        raise SyntaxErr("tipomset needs a duration '@d'")
    p, intervals = _parse_body(body, timed=True)
    try:
        return Tipomset(p, tuple(s for s, _ in intervals), tuple(e for _, e in intervals), as_rational(dur))
    except ValueError as exc:
        raise SyntaxErr(str(exc)) from exc


# ---------------------------------------------------------------------------
# word-level notation


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def parse_tokens(text: str) -> list:
    """Letters and delays of an idword, in order, without normalizing."""
    out: list = []
    for tok in tokenize(text):
        if "{" in tok:
            out.append(parse_letter(tok))
        else:
            try:
                out.append(as_rational(tok))
            except ValueError as exc:
                raise SyntaxErr(f"bad idword token {tok!r}") from exc
    return out


def parse_idword(text: str) -> IdWord:
    """Parse and normalize; leading and trailing identities fix the boundary."""
    toks = parse_tokens(text)
    letters = [t for t in toks if isinstance(t, StepLetter)]
    left = letters[0].source if letters else Conclist()
    right = letters[-1].target if letters else Conclist()
    try:
        return normalize_idword(toks, left, right)
    except ValueError as exc:
        raise SyntaxErr(str(exc)) from exc


def format_idword(w: IdWord) -> str:
    out = []
    for tok in w.tokens():
        out.append(format_letter(tok) if isinstance(tok, StepLetter) else format_rational(tok))
    return " ".join(out)


def parse_delay_word(text: str) -> DelayWord:
    return DelayWord.from_tokens(text.split())


def parse_letters(text: str) -> list[StepLetter]:
    toks = parse_tokens(text)
    if any(not isinstance(t, StepLetter) for t in toks):
        raise SyntaxErr("step sequences contain letters only")
    return toks


__all__ = [
    "SyntaxErr",
    "format_compact",
    "format_idword",
    "format_ipomset",
    "format_letter",
    "format_tipomset",
    "parse_conclist",
    "parse_delay_word",
    "parse_idword",
    "parse_ipomset",
    "parse_letter",
    "parse_letters",
    "parse_tipomset",
    "parse_tokens",
    "tokenize",
]
