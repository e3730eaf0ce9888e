"""Command-line front end: batch evaluation of .rho files and a small REPL."""

from __future__ import annotations

import argparse
import sys

from .terms import OPERATOR_TAGS, PHI, PSI, iter_subterms, free_vars
from .gates import Gate
from .evaluator import (ReductionConfig, normalize, reduction_graph,
                        default_max_steps)
from .syntax import Parser, ParseError, show, show_type
from . import explicit
from .typecheck import RhoTypeError, infer_type, typed_normalize

EXIT_OK, EXIT_LIMIT, EXIT_ERROR = 0, 2, 3

GATES = [g.value for g in Gate] + ["auto"]


def has_operators(t) -> bool:
    return any(s.tag in OPERATOR_TAGS or s.tag in (PHI, PSI)
               for s, _ in iter_subterms(t))


def pick_gate(name, t):
    """'auto' means ConfStrat on plain terms, ConfStratLin once strategy
    operators show up."""
    if name != "auto":
        return Gate.parse(name)
    return Gate.CONFSTRATLIN if has_operators(t) else Gate.CONFSTRAT


class Session:
    """Evaluation state shared by batch mode and the REPL."""

    def __init__(self, opts, out=sys.stdout, err=sys.stderr):
        self.o = opts
        self.out, self.err = out, err
        self.sig = None
        self.var_types = {}

    def parse(self, text):
        p = Parser(text, sig=self.sig, expand_traverse=self.o.expand_traverse)
        p.var_types.update(self.var_types)
        src = p.parse_file()
        if p.closed:
            # an explicit declaration closes the signature for later input
            self.sig = src.sig
        self.var_types = dict(src.var_types)
        return src

    def ctx(self, src):
        c = dict(self.var_types)
        c.update(src.free_annotations)
        return c

    def say(self, s=""):
        print(s, file=self.out)

    # -- one term ---------------------------------------------------------

    def run_term(self, t, src):
        o = self.o
        if o.graph:
            g = reduction_graph(t, pick_gate(o.strategy, t),
                                node_limit=o.nodes, depth_limit=o.depth)
            self.out.write(g.to_dot())
            return EXIT_OK
        if o.typed:
            return self.run_typed(t, src)
        gate = pick_gate(o.strategy, t)
        cfg = ReductionConfig(gate=gate, max_steps=o.max_steps, trace=o.trace)
        res = normalize(t, cfg)
        if o.trace:
            for i, info in enumerate(res.trace or (), 1):
                self.say(info.line(i))
        self.say(show(res.term))
        code = EXIT_OK if res.kind == "NormalForm" else EXIT_LIMIT
        if code == EXIT_LIMIT:
            print("step limit reached after %d steps" % res.steps, file=self.err)
        if o.debruijn:
            code = max(code, self.run_debruijn(t, gate))
        return code

    def run_typed(self, t, src):
        o = self.o
        sig = src.sig
        ctx = self.ctx(src)
        gate = "none" if o.strategy == "auto" else o.strategy
        res = typed_normalize(ctx, t, sig, gate=gate, max_steps=o.max_steps,
                              trace=o.trace)
        if o.trace:
            for i, info in enumerate(res.trace or (), 1):
                self.say(info.line(i))
        self.say("%s : %s" % (show(res.term), show_type(res.type)))
        if res.kind != "NormalForm":
            print("step limit reached after %d steps" % res.steps, file=self.err)
            return EXIT_LIMIT
        return EXIT_OK

    def run_debruijn(self, t, gate):
        if has_operators(t):
            print("error: --debruijn needs a term without strategy operators",
                  file=self.err)
            return EXIT_ERROR
        if gate not in (Gate.NONE, Gate.STRICT, Gate.CONFSTRAT):
            gate = Gate.CONFSTRAT
        ref = sorted(free_vars(t))
        d = explicit.to_debruijn(t, ref)
        r = explicit.rhosigma_normalize(d, gate, max_steps=self.o.max_steps)
        self.say("debruijn: %s" % explicit.show_db(d))
        self.say("explicit: %s" % explicit.show_db(r.term))
        return EXIT_OK if r.kind == "NormalForm" else EXIT_LIMIT

    # -- whole inputs -----------------------------------------------------

    def run_text(self, text):
        try:
            src = self.parse(text)
        except ParseError as e:
            print("parse error: %s" % e, file=self.err)
            return EXIT_ERROR
        code = EXIT_OK
        for t in src.terms:
            try:
                code = max(code, self.run_term(t, src))
            except RhoTypeError as e:
                print("type error: %s" % e, file=self.err)
                return EXIT_ERROR
            except ValueError as e:
                print("error: %s" % e, file=self.err)
                return EXIT_ERROR
        return code

    def command(self, line):
        """REPL meta command; returns False on :q."""
        cmd, _, rest = line.partition(" ")
        if cmd == ":q":
            return False
        try:
            src = self.parse(rest)
            if cmd == ":t":
                for t in src.terms:
                    ty = infer_type(self.ctx(src), t, src.sig)
                    self.say("%s : %s" % (show(t), show_type(ty)))
            elif cmd == ":g":
                for t in src.terms:
                    g = reduction_graph(t, pick_gate(self.o.strategy, t),
                                        node_limit=self.o.nodes,
                                        depth_limit=self.o.depth)
                    self.out.write(g.to_dot())
            else:
                print("unknown command %s (try :t, :g, :q)" % cmd, file=self.err)
        except (ParseError, RhoTypeError, ValueError) as e:
            print("error: %s" % e, file=self.err)
        return True


def repl(sess, stream=sys.stdin):
    tty = stream.isatty()
    while True:
        if tty:
            sess.out.write("rho> ")
            sess.out.flush()
        line = stream.readline()
        if not line:
            return EXIT_OK
        line = line.strip()
        if not line:
            continue
        if line.startswith(":"):
            if not sess.command(line):
                return EXIT_OK
        else:
            sess.run_text(line)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="rho", description="Evaluate rewriting-calculus terms.")
    ap.add_argument("file", nargs="?", help=".rho source file ('-' for stdin)")
    ap.add_argument("-e", "--expr", help="evaluate this text instead of a file")
    ap.add_argument("--strategy", default="auto", choices=GATES,
                    help="Fire gate (default: auto)")
    ap.add_argument("--max-steps", type=int, default=None)
    ap.add_argument("--trace", action="store_true")
    ap.add_argument("--typed", action="store_true")
    ap.add_argument("--debruijn", action="store_true",
                    help="also evaluate through explicit substitutions")
    ap.add_argument("--graph", action="store_true",
                    help="print the reduction graph in DOT")
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--expand-traverse", action="store_true",
                    help="expand phi/psi over the declared signature")
    return ap


def main(argv=None, stdin=None, stdout=None, stderr=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    opts = build_parser().parse_args(argv)
    if opts.max_steps is None:
        opts.max_steps = default_max_steps()
    sess = Session(opts, stdout, stderr)
    if opts.expr is not None:
        return sess.run_text(opts.expr)
    if opts.file is None:
        return repl(sess, stdin)
    if opts.file == "-":
        return sess.run_text(stdin.read())
    try:
        with open(opts.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print("error: %s" % e, file=stderr)
        return EXIT_ERROR
    return sess.run_text(text)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
