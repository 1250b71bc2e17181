"""Endorsement policy expressions.

Grammar::

    policy   := Sig('<org>.<role>')
              | OutOf(<n>, policy, ...)
              | And(policy, ...) | Or(policy, ...) | Majority(policy, ...)

``And``, ``Or`` and ``Majority`` are sugar for ``OutOf`` with n equal to the
child count, 1, and floor(count / 2) + 1. Printing always emits the
``OutOf`` form, so ``parse_policy(print_policy(p)) == p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Set, Tuple, Union

from ..core.base import ArityError, PolicySyntaxError
from ..core.enums import Role

MAX_DEPTH = 16

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z_]*)|(?P<int>\d+)|(?P<str>'[^']*'|\"[^\"]*\")|(?P<punct>[(),]))"
)


@dataclass(frozen=True)
class SignaturePolicy:
    org_id: str
    role: Role

    @property
    def principal(self) -> str:
        return f"{self.org_id}.{self.role.value}"


@dataclass(frozen=True)
class NOutOf:
    n: int
    children: Tuple["EndorsementPolicy", ...]


EndorsementPolicy = Union[SignaturePolicy, NOutOf]


def signature(principal: str) -> SignaturePolicy:
    """``'fishfarm.org.peer'`` -> SignaturePolicy('fishfarm.org', PEER)."""
    org_id, _, role = principal.rpartition(".")
    if not org_id:
        raise ValueError(f"principal {principal!r} lacks an organization")
    return SignaturePolicy(org_id, Role(role))


def n_out_of(n: int, children: Iterable[EndorsementPolicy]) -> NOutOf:
    children = tuple(children)
    if not 1 <= n <= len(children):
        raise ArityError(f"OutOf({n}) over {len(children)} children")
    return NOutOf(n, children)


def all_of(*children: EndorsementPolicy) -> NOutOf:
    return n_out_of(len(children), children)


def any_of(*children: EndorsementPolicy) -> NOutOf:
    return n_out_of(1, children)


def majority(*children: EndorsementPolicy) -> NOutOf:
    return n_out_of(len(children) // 2 + 1, children)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if match is None:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise PolicySyntaxError(f"unexpected character {text[start]!r}", start)
            kind = match.lastgroup
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.index = 0

    def _peek(self) -> Tuple[str, str, int]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("eof", "", len(self.text))

    def _next(self) -> Tuple[str, str, int]:
        token = self._peek()
        self.index += 1
        return token

    def _expect(self, value: str) -> None:
        kind, text, pos = self._next()
        if kind != "punct" or text != value:
            raise PolicySyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> EndorsementPolicy:
        policy = self._expr(1)
        kind, text, pos = self._peek()
        if kind != "eof":
            raise PolicySyntaxError(f"unexpected trailing {text!r}", pos)
        return policy

    def _children(self, depth: int) -> List[EndorsementPolicy]:
        children = [self._expr(depth + 1)]
        while self._peek()[1] == ",":
            self._next()
            children.append(self._expr(depth + 1))
        return children

    def _expr(self, depth: int) -> EndorsementPolicy:
        kind, name, pos = self._next()
        if depth > MAX_DEPTH:
            raise PolicySyntaxError(f"policy nests deeper than {MAX_DEPTH}", pos)
        if kind != "ident":
            raise PolicySyntaxError(f"expected policy operator, found {name or 'end of input'!r}", pos)
        self._expect("(")
        if name == "Sig":
            skind, literal, spos = self._next()
            if skind != "str":
                raise PolicySyntaxError("Sig expects a quoted 'org.role'", spos)
            try:
                policy: EndorsementPolicy = signature(literal[1:-1])
            except ValueError as e:
                raise PolicySyntaxError(str(e), spos) from e
            self._expect(")")
            return policy
        if name == "OutOf":
            nkind, number, npos = self._next()
            if nkind != "int":
                raise PolicySyntaxError("OutOf expects a count first", npos)
            self._expect(",")
            children = self._children(depth)
            self._expect(")")
            return n_out_of(int(number), children)
        if name in ("And", "Or", "Majority"):
            children = self._children(depth)
            self._expect(")")
            return {"And": all_of, "Or": any_of, "Majority": majority}[name](*children)
        raise PolicySyntaxError(f"unknown operator {name!r}", pos)


def parse_policy(text: str) -> EndorsementPolicy:
    """Parse a policy expression.

    Raises:
        PolicySyntaxError: With the offending character position
        ArityError: When an OutOf count is outside 1..len(children)
    """
    return _Parser(text).parse()


def print_policy(policy: EndorsementPolicy) -> str:
    if isinstance(policy, SignaturePolicy):
        return f"Sig('{policy.principal}')"
    inner = ", ".join(print_policy(c) for c in policy.children)
    return f"OutOf({policy.n}, {inner})"


def policy_depth(policy: EndorsementPolicy) -> int:
    if isinstance(policy, SignaturePolicy):
        return 1
    return 1 + max(policy_depth(c) for c in policy.children)


def _satisfied(policy: EndorsementPolicy, principals: Set[Tuple[str, Role]]) -> bool:
    if isinstance(policy, SignaturePolicy):
        return (policy.org_id, policy.role) in principals
    count = 0
    for child in policy.children:
        if _satisfied(child, principals):
            count += 1
            if count >= policy.n:
                return True
    return False


def evaluate_policy(policy: EndorsementPolicy, endorsers: Iterable) -> bool:
    """True iff the endorser identities satisfy the tree.

    Endorsers are ValidatedIdentity values; duplicates collapse, and one
    identity satisfies every leaf naming its (org, role).
    """
    principals = {(e.org_id, e.role) for e in set(endorsers)}
    return _satisfied(policy, principals)
