"""Line-oriented lexers for Java and Python comment extraction.

These are state machines, not parsers: they only track the states needed to
place comments correctly (string/char/text-block literals, block comments,
bracket continuations), so they stay robust on uncompilable files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_JAVA_CONTROL = {
    "if", "else", "for", "while", "do", "switch", "try", "catch",
    "finally", "synchronized",
}
_JAVA_TYPE_DECLS = {"class", "interface", "enum", "record", "@interface"}

# Compound headers end a "single statement"; scope openers are the subset the
# block-level heuristic recognizes (methods/functions, loops, conditionals,
# try), so class bodies are never taken as a comment's segment.
_PY_COMPOUND = {
    "def", "async", "class", "if", "elif", "else", "for", "while",
    "try", "except", "finally", "with", "match", "case",
}
_PY_SCOPE_OPENERS = _PY_COMPOUND - {"class", "match", "case"}


@dataclass
class LineInfo:
    number: int  # 1-based
    raw: str
    code: str = ""  # source text with comments removed
    has_code: bool = False
    blank: bool = True  # neither code nor comment content
    indent: int = 0  # leading whitespace width (tabs expanded to 8)
    brace_depth_before: int = 0
    brace_depth_after: int = 0
    brace_depth_min: int = 0
    paren_depth_before: int = 0
    paren_depth_after: int = 0
    is_continued: bool = False  # begins inside a continuation
    continues_next: bool = False  # leaves a continuation open
    opens_block: bool = False  # scope-opener (block-level heuristic target)
    is_compound_header: bool = False  # any block header (incl. class)


@dataclass
class RawComment:
    start_line: int
    end_line: int
    start_col: int
    text: str
    kind: str  # "line" | "block"
    trailing: bool  # code precedes the delimiter on the start line
    code_after: bool = False  # code follows the close on the end line


@dataclass
class FileAnalysis:
    lines: list[LineInfo]
    comments: list[RawComment]

    def line(self, number: int) -> LineInfo | None:
        if 1 <= number <= len(self.lines):
            return self.lines[number - 1]
        return None


def _clean_block_body(body: str) -> str:
    """Strip decoration from a block-comment body: per-line leading ``*``."""
    cleaned = []
    for ln in body.split("\n"):
        s = ln.strip()
        if s.startswith("*"):
            s = s[1:].strip()
        cleaned.append(s)
    while cleaned and not cleaned[0]:
        cleaned.pop(0)
    while cleaned and not cleaned[-1]:
        cleaned.pop()
    return "\n".join(cleaned)


# ---------------------------------------------------------------------------
# Java


def _java_opener(info: LineInfo) -> bool:
    # A block stays open at EOL iff the depth ends above the line's minimum.
    if not info.has_code or info.brace_depth_after <= info.brace_depth_min:
        return False
    head = info.code.lstrip(" \t}")
    first = head.split("(")[0].split()[0] if head.split() else ""
    if first in _JAVA_TYPE_DECLS:
        return False
    if first in _JAVA_CONTROL:
        return True
    # Method-ish: a parenthesized signature opening a brace.
    if "(" in head and ")" in head:
        tokens = set(head.replace("(", " ").replace(")", " ").split())
        return not (tokens & _JAVA_TYPE_DECLS)
    return False


def lex_java(lines: list[str]) -> FileAnalysis:
    infos: list[LineInfo] = []
    comments: list[RawComment] = []

    in_block = False  # inside /* ... */ across lines
    in_text = False  # inside a """ text block across lines
    block_start = (0, 0)
    block_trailing = False
    block_body: list[str] = []
    brace_depth = 0
    paren_depth = 0

    for number, raw in enumerate(lines, start=1):
        info = LineInfo(number=number, raw=raw)
        info.brace_depth_before = brace_depth
        info.brace_depth_min = brace_depth
        info.paren_depth_before = paren_depth
        info.is_continued = paren_depth > 0 or in_text
        expanded = raw.expandtabs(8)
        info.indent = len(expanded) - len(expanded.lstrip())
        code_chars: list[str] = []
        saw_comment = bool(in_block)
        closed_comment: RawComment | None = None

        def emit_code(text: str) -> None:
            nonlocal closed_comment
            code_chars.append(text)
            if closed_comment is not None and text.strip():
                closed_comment.code_after = True

        i = 0
        n = len(raw)
        if in_block:
            state = "block"
        elif in_text:
            state = "textblock"
        else:
            state = "code"

        while i < n:
            if state == "block":
                end = raw.find("*/", i)
                saw_comment = True
                if end == -1:
                    block_body.append(raw[i:])
                    i = n
                else:
                    block_body.append(raw[i:end])
                    body = "\n".join(block_body)
                    # Javadoc starts /** (an empty /**/ has an empty body).
                    if not body.startswith("*"):
                        closed_comment = RawComment(
                            start_line=block_start[0],
                            end_line=number,
                            start_col=block_start[1],
                            text=_clean_block_body(body),
                            kind="block",
                            trailing=block_trailing,
                        )
                        comments.append(closed_comment)
                    in_block = False
                    block_body = []
                    state = "code"
                    i = end + 2
                continue

            ch = raw[i]
            two = raw[i : i + 2]
            if state == "code":
                if two == "//":
                    saw_comment = True
                    comments.append(
                        RawComment(
                            start_line=number,
                            end_line=number,
                            start_col=i,
                            text=raw[i + 2 :].strip(),
                            kind="line",
                            trailing=bool("".join(code_chars).strip()),
                        )
                    )
                    i = n
                elif two == "/*":
                    saw_comment = True
                    in_block = True
                    block_start = (number, i)
                    block_trailing = bool("".join(code_chars).strip())
                    block_body = []
                    state = "block"
                    i += 2
                elif raw[i : i + 3] == '"""':
                    emit_code('"""')
                    state = "textblock"
                    in_text = True
                    i += 3
                elif ch == '"':
                    emit_code(ch)
                    state = "string"
                    i += 1
                elif ch == "'":
                    emit_code(ch)
                    state = "char"
                    i += 1
                else:
                    if ch == "{":
                        brace_depth += 1
                    elif ch == "}":
                        brace_depth -= 1
                        info.brace_depth_min = min(info.brace_depth_min, brace_depth)
                    elif ch == "(":
                        paren_depth += 1
                    elif ch == ")":
                        paren_depth = max(paren_depth - 1, 0)
                    emit_code(ch)
                    i += 1
            elif state in ("string", "char"):
                quote = '"' if state == "string" else "'"
                if ch == "\\" and i + 1 < n:
                    emit_code(raw[i : i + 2])
                    i += 2
                elif ch == quote:
                    emit_code(ch)
                    state = "code"
                    i += 1
                else:
                    emit_code(ch)
                    i += 1
            else:  # textblock
                if ch == "\\" and i + 1 < n:
                    emit_code(raw[i : i + 2])
                    i += 2
                elif raw[i : i + 3] == '"""':
                    emit_code('"""')
                    state = "code"
                    in_text = False
                    i += 3
                else:
                    emit_code(ch)
                    i += 1

        # Java strings and chars do not span lines; text blocks do.
        if state in ("string", "char"):
            state = "code"

        info.code = "".join(code_chars)
        info.has_code = bool(info.code.strip())
        info.blank = not info.has_code and not saw_comment
        info.brace_depth_after = brace_depth
        info.paren_depth_after = paren_depth
        info.continues_next = paren_depth > 0 or in_text
        info.opens_block = _java_opener(info)
        info.is_compound_header = info.opens_block
        infos.append(info)

    return FileAnalysis(lines=infos, comments=comments)


# ---------------------------------------------------------------------------
# Python


def _py_header_kind(code: str) -> tuple[bool, bool]:
    """(is_compound_header, opens_block) for a comment-stripped code line."""
    stripped = code.strip()
    if not stripped or not stripped.rstrip().endswith(":"):
        return False, False
    first = stripped.split()[0].rstrip(":")
    if first not in _PY_COMPOUND:
        return False, False
    if first == "async":
        rest = stripped.split(None, 1)
        nxt = rest[1].split()[0].rstrip(":") if len(rest) > 1 else ""
        return True, nxt in _PY_SCOPE_OPENERS
    return True, first in _PY_SCOPE_OPENERS


def lex_python(lines: list[str]) -> FileAnalysis:
    infos: list[LineInfo] = []
    comments: list[RawComment] = []

    triple: str | None = None  # '"""' or "'''" while inside one
    string_carry: str | None = None  # quote of a backslash-continued string
    bracket_depth = 0
    backslash_pending = False

    for number, raw in enumerate(lines, start=1):
        info = LineInfo(number=number, raw=raw)
        info.is_continued = (
            bool(triple) or bool(string_carry) or bracket_depth > 0 or backslash_pending
        )
        info.paren_depth_before = bracket_depth
        expanded = raw.expandtabs(8)
        info.indent = len(expanded) - len(expanded.lstrip())
        backslash_pending = False
        code_chars: list[str] = []
        saw_comment = False

        i = 0
        n = len(raw)
        if triple:
            state = "triple"
        elif string_carry:
            state, quote, string_carry = "string", string_carry, None
        else:
            state, quote = "code", ""

        while i < n:
            ch = raw[i]
            if state == "triple":
                if ch == "\\" and i + 1 < n:
                    code_chars.append(raw[i : i + 2])
                    i += 2
                elif raw[i : i + 3] == triple:
                    code_chars.append(triple)  # type: ignore[arg-type]
                    i += 3
                    triple = None
                    state = "code"
                else:
                    code_chars.append(ch)
                    i += 1
            elif state == "string":
                if ch == "\\" and i + 1 < n:
                    code_chars.append(raw[i : i + 2])
                    i += 2
                elif ch == quote:
                    code_chars.append(ch)
                    state = "code"
                    i += 1
                else:
                    code_chars.append(ch)
                    i += 1
            else:  # code
                if ch == "#":
                    saw_comment = True
                    comments.append(
                        RawComment(
                            start_line=number,
                            end_line=number,
                            start_col=i,
                            text=raw[i + 1 :].strip(),
                            kind="line",
                            trailing=bool("".join(code_chars).strip()),
                        )
                    )
                    i = n
                elif raw[i : i + 3] in ('"""', "'''"):
                    triple = raw[i : i + 3]
                    code_chars.append(triple)
                    state = "triple"
                    i += 3
                elif ch in "\"'":
                    quote = ch
                    code_chars.append(ch)
                    state = "string"
                    i += 1
                else:
                    if ch in "([{":
                        bracket_depth += 1
                    elif ch in ")]}":
                        bracket_depth = max(bracket_depth - 1, 0)
                    elif ch == "\\" and i == n - 1:
                        backslash_pending = True
                    code_chars.append(ch)
                    i += 1

        if state == "string":
            # A single-quoted string survives EOL only via a trailing backslash.
            if raw.endswith("\\"):
                string_carry = quote
            state = "code"

        info.code = "".join(code_chars)
        info.has_code = bool(info.code.strip())
        info.blank = not info.has_code and not saw_comment
        info.paren_depth_after = bracket_depth
        info.continues_next = (
            bool(triple) or bool(string_carry) or bracket_depth > 0 or backslash_pending
        )
        if info.has_code and not info.is_continued:
            info.is_compound_header, info.opens_block = _py_header_kind(info.code)
        infos.append(info)

    return FileAnalysis(lines=infos, comments=comments)
