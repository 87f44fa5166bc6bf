"""
Command dispatch over a resolved workspace.

Every verdict comes straight from the library call it names; the runner
only formats. Exit codes: 0 success or true, 1 false or refuted. Errors
propagate as RegulusError for the caller to map to exit code 2.
"""
import itertools
import json
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

from api.workspace import ModelEnv, Workspace
from core.calculus import GraphicalTerm
from core.cq import contains, emit_formula
from core.errors import NotAFunction, RegulusError, ResolutionError, SlotOutOfRange
from core.frb import Relation, compose_rel, leq_rel, port_label, substitute
from core.syncat import SyntacticCategory
from utils.analytics import CheckReport
from utils.visualization import emit_dot

logger = logging.getLogger(__name__)

FORMATS = ("text", "dot", "json")


class CommandResult(NamedTuple):
    exit_code: int
    output: str


def relation_record(rel: Relation) -> Dict:
    return {
        'inner': [str(ctx) for ctx in rel.inner],
        'outer': str(rel.outer),
        'blocks': [{'type': str(t), 'ports': [port_label(rel.port(g)) for g in members]}
                   for t, members in zip(rel.block_types, rel.blocks)],
        'support': [str(s) for s in rel.support],
        'white_dot': [str(s) for s in rel.white_dot],
    }


class Runner:
    def __init__(self, workspace: Workspace, max_enum: int = 4096, show_progress: bool = False):
        """
        Run commands against declarations of one program

        Args:
            workspace: resolved program
            max_enum: enumeration budget for universal-property checks
            show_progress: show progress bars on long enumerations
        """
        self.ws = workspace
        self.max_enum = max_enum
        self.show_progress = show_progress
        self.commands: Dict[str, Callable[..., CommandResult]] = {
            'show': self.show,
            'compose': self.compose,
            'substitute': self.substitute,
            'leq': self.leq,
            'eval': self.eval,
            'entail': self.entail,
            'contain': self.contain,
            'emit-formula': self.emit_formula,
            'emit-dot': self.emit_dot,
            'syncat-check': self.syncat_check,
            'syncat-pullback': self.syncat_pullback,
            'syncat-image': self.syncat_image,
        }

    def run(self, command: str, args: Sequence[str], model: Optional[str] = None,
            fmt: str = "text") -> CommandResult:
        if command not in self.commands:
            raise ResolutionError(f"unknown command {command}; expected one of {sorted(self.commands)}")
        if fmt not in FORMATS:
            raise ResolutionError(f"unknown format {fmt}")
        logger.debug("running %s %s", command, " ".join(args))
        return self.commands[command](list(args), model=model, fmt=fmt)

    @staticmethod
    def _arity(args: List[str], n: int, usage: str) -> None:
        if len(args) != n:
            raise ResolutionError(f"usage: {usage}")

    def _relation_output(self, rel: Relation, fmt: str) -> CommandResult:
        if fmt == "dot":
            return CommandResult(0, emit_dot(rel))
        if fmt == "json":
            return CommandResult(0, json.dumps(relation_record(rel), indent=2))
        return CommandResult(0, str(rel))

    def _verdict(self, value: bool, fmt: str, detail: Optional[str] = None) -> CommandResult:
        if fmt == "json":
            text = json.dumps({'result': value, 'detail': detail})
        else:
            text = "true" if value else "false"
            if detail:
                text += f"\n{detail}"
        return CommandResult(0 if value else 1, text)

    def _bound(self, term: GraphicalTerm, env: ModelEnv) -> GraphicalTerm:
        return term.bind(env.predicates)

    def _category(self, env: ModelEnv) -> SyntacticCategory:
        return SyntacticCategory(env.calc, self.max_enum, self.show_progress)

    def _map(self, env: ModelEnv, name: str):
        if name not in env.maps:
            raise ResolutionError(f"no map named {name} in model {env.name}")
        return env.maps[name]

    def show(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 1, "show NAME")
        name = args[0]
        if name in self.ws.relations:
            return self._relation_output(self.ws.relations[name], fmt)
        if name in self.ws.terms:
            term = self.ws.terms[name]
            if fmt == "dot":
                return CommandResult(0, emit_dot(term))
            return CommandResult(0, str(term))
        if name in self.ws.contexts:
            return CommandResult(0, str(self.ws.contexts[name]))
        raise ResolutionError(f"nothing named {name}")

    def compose(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 2, "compose FIRST SECOND")
        return self._relation_output(
            compose_rel(self.ws.relation(args[0]), self.ws.relation(args[1])), fmt)

    def substitute(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 3, "substitute OUTER SLOT INNER")
        try:
            slot = int(args[1]) - 1
        except ValueError:
            raise SlotOutOfRange(f"slot must be a number, got {args[1]}")
        return self._relation_output(
            substitute(self.ws.relation(args[0]), slot, self.ws.relation(args[2])), fmt)

    def leq(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 2, "leq FIRST SECOND")
        return self._verdict(leq_rel(self.ws.relation(args[0]), self.ws.relation(args[1])), fmt)

    def eval(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 1, "eval TERM [--model M]")
        env = self.ws.model(model)
        value = env.calc.eval_term(self._bound(self.ws.term(args[0]), env))
        if fmt == "json":
            return CommandResult(0, json.dumps({'context': str(value.context),
                                                'tuples': [list(row) for row in value.tuples]}))
        return CommandResult(0, str(value))

    def entail(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 2, "entail TERM TERM [--model M]")
        env = self.ws.model(model)
        left = env.calc.eval_term(self._bound(self.ws.term(args[0]), env))
        right = env.calc.eval_term(self._bound(self.ws.term(args[1]), env))
        return self._verdict(env.calc.entails(left, right), fmt)

    def contain(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 2, "contain TERM TERM")
        witness = contains(self.ws.term(args[0]), self.ws.term(args[1]))
        return self._verdict(witness is not None, fmt, str(witness) if witness else None)

    def emit_formula(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 1, "emit-formula TERM")
        return CommandResult(0, str(emit_formula(self.ws.term(args[0]))))

    def emit_dot(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 1, "emit-dot NAME")
        name = args[0]
        if name in self.ws.terms:
            return CommandResult(0, emit_dot(self.ws.terms[name]))
        return CommandResult(0, emit_dot(self.ws.relation(name)))

    def syncat_pullback(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 2, "syncat-pullback MAP MAP [--model M]")
        env = self.ws.model(model)
        cat = self._category(env)
        square = cat.pullback_syn(self._map(env, args[0]), self._map(env, args[1]))
        if fmt == "json":
            return CommandResult(0, json.dumps({'apex': str(square.apex.predicate),
                                                'p1': str(square.p1.theta),
                                                'p2': str(square.p2.theta)}))
        return CommandResult(0, f"apex {square.apex}\np1 {square.p1.theta}\np2 {square.p2.theta}")

    def syncat_image(self, args, model=None, fmt="text") -> CommandResult:
        self._arity(args, 1, "syncat-image MAP [--model M]")
        env = self.ws.model(model)
        cat = self._category(env)
        f = self._map(env, args[0])
        parts = cat.image_factorize_syn(f)
        kind = cat.classify_syn(f)
        if fmt == "json":
            return CommandResult(0, json.dumps({'image': str(parts.image.predicate),
                                                'mono': kind.mono, 'reg_epi': kind.reg_epi}))
        return CommandResult(0, f"image {parts.image.predicate}\nmono {kind.mono}\nreg_epi {kind.reg_epi}")

    def syncat_check(self, args, model=None, fmt="text") -> CommandResult:
        """Run the regular-category checks over every predicate and map of a model"""
        self._arity(args, 0, "syncat-check [--model M]")
        env = self.ws.model(model)
        cat = self._category(env)
        report = CheckReport(f"regular-category checks for model {env.name}")

        def run_check(check: str, subject: str, fn: Callable[[], bool]) -> None:
            try:
                report.add(check, subject, fn())
            except RegulusError as exc:
                report.add(check, subject, False, f"{type(exc).__name__}: {exc}")

        for name in sorted(env.predicates):
            obj = env.object(name)
            run_check("terminal", name, lambda: cat.check_terminal(obj))
            kind = cat.classify_syn(cat.id_syn(obj))
            report.add("identity", name, kind.mono and kind.reg_epi)

        functions = {}
        for name in sorted(env.maps):
            try:
                functions[name] = cat.certify(env.maps[name], search_witness=True)
            except NotAFunction as exc:
                report.add("function", name, False, str(exc))
                continue
            report.add("function", name, True)
            kind = cat.classify_syn(functions[name])
            report.add("classify", name, True, f"mono={kind.mono} reg_epi={kind.reg_epi}")
            run_check("image", name, lambda: cat.check_image(functions[name]))

        contexts = [env.predicates[name].context for name in sorted(env.predicates)]
        for (a, f), (b, g) in itertools.combinations(sorted(functions.items()), 2):
            subject = f"{a},{b}"
            if f.dst == g.dst:
                run_check("pullback", subject, lambda: cat.check_pullback(f, g, contexts=contexts))
                run_check("pullback-stability", subject, lambda: cat.check_pullback_stability(f, g))
            if f.src == g.src and f.dst == g.dst:
                run_check("equalizer", subject, lambda: cat.check_equalizer(f, g))

        text = report.to_json() if fmt == "json" else report.to_text()
        return CommandResult(0 if report.all_passed else 1, text)
