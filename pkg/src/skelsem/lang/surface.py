"""Surface syntax for the While dialects.

Expression grammar (base):
    e ::= INT | "-" INT | IDENT | e "+" e | e "-" INT | e "=" e
        | "not" e | "(" e ")"
with `+` left-associative, `=` non-associative and loosest, unary
operators tightest.  `e - k` is sugar for `e + (-k)` and only a literal
right operand is accepted; general subtraction is rejected.

Statement grammar (base):
    s ::= "skip" | IDENT ":=" e | s ";" s
        | "if" e "then" s "else" s "end" | "while" e "do" s "end"
`;` parses right-associated.

The extended dialect adds `in`, `ref e`, `! e` to expressions and
`out e`, `throw`, `try s catch s end`, `e <- e` to statements.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError
from ..terms import BaseTerm, Ctor, Term

KEYWORDS = {
    "skip", "if", "then", "else", "end", "while", "do", "not",
    "in", "out", "throw", "try", "catch", "ref", "true", "false",
}

SYMBOLS = [":=", "<-", "+", "-", "=", "(", ")", ";", "!"]


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def lex(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


def lit(n: int) -> Term:
    return Ctor("const", (BaseTerm("lit", n),))


def var(name: str) -> Term:
    return Ctor("var", (BaseTerm("ident", name),))


class Parser:
    def __init__(self, source: str, ext: bool = False):
        self.tokens = lex(source)
        self.pos = 0
        self.ext = ext

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, text: str) -> Token:
        tok = self.peek()
        if tok.kind != kind or tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}")
        return self.next()

    def at(self, kind: str, text: str) -> bool:
        tok = self.peek()
        return tok.kind == kind and tok.text == text

    # -- expressions ----------------------------------------------------

    def expr(self) -> Term:
        left = self.expr_add()
        if self.at("sym", "="):
            self.next()
            right = self.expr_add()
            left = Ctor("=", (left, right))
            if self.at("sym", "="):
                self.fail("'=' is non-associative; parenthesize")
        return left

    def expr_add(self) -> Term:
        left = self.expr_unary()
        while True:
            if self.at("sym", "+"):
                self.next()
                left = Ctor("+", (left, self.expr_unary()))
            elif self.at("sym", "-"):
                self.next()
                tok = self.peek()
                if tok.kind != "int":
                    self.fail("only a literal may follow '-'")
                self.next()
                left = Ctor("+", (left, lit(-int(tok.text))))
            else:
                return left

    def expr_unary(self) -> Term:
        if self.at("kw", "not"):
            self.next()
            return Ctor("not", (self.expr_unary(),))
        if self.ext and self.at("kw", "ref"):
            self.next()
            return Ctor("ref", (self.expr_unary(),))
        if self.ext and self.at("sym", "!"):
            self.next()
            return Ctor("!", (self.expr_unary(),))
        return self.expr_atom()

    def expr_atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return lit(int(tok.text))
        if tok.kind == "sym" and tok.text == "-":
            self.next()
            num = self.peek()
            if num.kind != "int":
                self.fail("expected an integer literal after '-'")
            self.next()
            return lit(-int(num.text))
        if tok.kind == "ident":
            self.next()
            return var(tok.text)
        if self.ext and tok.kind == "kw" and tok.text == "in":
            self.next()
            return Ctor("in", ())
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            inner = self.expr()
            self.expect("sym", ")")
            return inner
        self.fail(f"expected an expression, found {tok.text!r}")

    # -- statements -------------------------------------------------------

    def stmt(self) -> Term:
        parts = [self.stmt_single()]
        while self.at("sym", ";"):
            self.next()
            parts.append(self.stmt_single())
        node = parts[-1]
        for part in reversed(parts[:-1]):
            node = Ctor(";", (part, node))
        return node

    def stmt_single(self) -> Term:
        tok = self.peek()
        if tok.kind == "kw":
            if tok.text == "skip":
                self.next()
                return Ctor("skip", ())
            if tok.text == "if":
                self.next()
                cond = self.expr()
                self.expect("kw", "then")
                then = self.stmt()
                self.expect("kw", "else")
                other = self.stmt()
                self.expect("kw", "end")
                return Ctor("if", (cond, then, other))
            if tok.text == "while":
                self.next()
                cond = self.expr()
                self.expect("kw", "do")
                body = self.stmt()
                self.expect("kw", "end")
                return Ctor("while", (cond, body))
            if self.ext and tok.text == "throw":
                self.next()
                return Ctor("throw", ())
            if self.ext and tok.text == "out":
                self.next()
                return Ctor("out", (self.expr(),))
            if self.ext and tok.text == "try":
                self.next()
                guarded = self.stmt()
                self.expect("kw", "catch")
                handler = self.stmt()
                self.expect("kw", "end")
                return Ctor("try", (guarded, handler))
        if tok.kind == "ident" and self._lookahead_is(":="):
            self.next()
            self.expect("sym", ":=")
            return Ctor(":=", (BaseTerm("ident", tok.text), self.expr()))
        if self.ext:
            target = self.expr()
            if self.at("sym", "<-"):
                self.next()
                return Ctor("<-", (target, self.expr()))
            self.fail("expected '<-' after expression statement")
        self.fail(f"expected a statement, found {tok.text!r}")

    def _lookahead_is(self, sym: str) -> bool:
        nxt = self.tokens[self.pos + 1]
        return nxt.kind == "sym" and nxt.text == sym


def parse_program(source: str, ext: bool = False) -> Term:
    """Parse a statement; trailing input is an error."""
    p = Parser(source, ext=ext)
    t = p.stmt()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    return t


def parse_term(source: str, ext: bool = False) -> Term:
    """Parse a statement or, failing that, an expression."""
    try:
        return parse_program(source, ext=ext)
    except ParseError:
        p = Parser(source, ext=ext)
        t = p.expr()
        if p.peek().kind != "eof":
            p.fail(f"trailing input {p.peek().text!r}")
        return t


# -- printing ---------------------------------------------------------------

_EQ, _ADD, _UNARY, _ATOM = 0, 1, 2, 3


def _pe(t: Term, level: int) -> str:
    text, mine = _expr_text(t)
    if mine < level:
        return f"({text})"
    return text


def _expr_text(t: Term):
    assert isinstance(t, Ctor), f"not an expression: {t!r}"
    if t.name == "const":
        return str(t.args[0].payload), _ATOM
    if t.name == "var":
        return t.args[0].payload, _ATOM
    if t.name == "in":
        return "in", _ATOM
    if t.name == "+":
        lhs, rhs = t.args
        if isinstance(rhs, Ctor) and rhs.name == "const" and rhs.args[0].payload < 0:
            return f"{_pe(lhs, _ADD)} - {-rhs.args[0].payload}", _ADD
        return f"{_pe(lhs, _ADD)} + {_pe(rhs, _UNARY)}", _ADD
    if t.name == "=":
        return f"{_pe(t.args[0], _ADD)} = {_pe(t.args[1], _ADD)}", _EQ
    if t.name == "not":
        return f"not {_pe(t.args[0], _UNARY)}", _UNARY
    if t.name == "ref":
        return f"ref {_pe(t.args[0], _UNARY)}", _UNARY
    if t.name == "!":
        return f"! {_pe(t.args[0], _UNARY)}", _UNARY
    raise ValueError(f"not an expression constructor: {t.name!r}")


def print_expr(t: Term) -> str:
    return _expr_text(t)[0]


def print_stmt(t: Term) -> str:
    assert isinstance(t, Ctor), f"not a statement: {t!r}"
    if t.name == "skip":
        return "skip"
    if t.name == "throw":
        return "throw"
    if t.name == ":=":
        return f"{t.args[0].payload} := {print_expr(t.args[1])}"
    if t.name == ";":
        # `;` re-parses right-associated; left-nested chains print flat.
        return f"{print_stmt(t.args[0])} ; {print_stmt(t.args[1])}"
    if t.name == "if":
        c, a, b = t.args
        return f"if {print_expr(c)} then {print_stmt(a)} else {print_stmt(b)} end"
    if t.name == "while":
        c, body = t.args
        return f"while {print_expr(c)} do {print_stmt(body)} end"
    if t.name == "out":
        return f"out {print_expr(t.args[0])}"
    if t.name == "try":
        a, b = t.args
        return f"try {print_stmt(a)} catch {print_stmt(b)} end"
    if t.name == "<-":
        return f"{print_expr(t.args[0])} <- {print_expr(t.args[1])}"
    raise ValueError(f"not a statement constructor: {t.name!r}")


_STMT_CTORS = {"skip", ":=", ";", "if", "while", "out", "throw", "try", "<-"}


def print_term(t: Term) -> str:
    """Surface form of a closed program or expression term; base-term
    leaves print as their payload."""
    if isinstance(t, BaseTerm):
        return str(t.payload)
    if isinstance(t, Ctor) and t.name in _STMT_CTORS:
        return print_stmt(t)
    return print_expr(t)
