#!/usr/bin/env python3
import argparse
import logging
import sys

import pendulum
import singer

from spectral_models import bicomplex, codec, filtered, lattice, model_check, tot, verify
from spectral_models.bicomplex import BiMap, Bicomplex
from spectral_models.codec import InputError
from spectral_models.config import RunConfig
from spectral_models.filtered import ChainMap, FilteredComplex, InvalidComplex
from spectral_models.linalg import FieldMismatch, is_invertible
from spectral_models.model_check import FlavorMismatch, SSet
from spectral_models.report import FAIL, PASS, bidegrees, page_json
from spectral_models.tot import WindowCoverage, WindowTooSmall

EXIT_PASS = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2

PREDICATES = ("weq", "fib", "acyclic-fib", "effective-mono")
LATTICE_OPS = ("join", "meet", "leq", "alpha", "beta")

# Errors that mean the input, not the program, is at fault.
INPUT_ERRORS = (InputError, InvalidComplex, FlavorMismatch, FieldMismatch, WindowTooSmall, WindowCoverage)


def build_parser():
    parser = argparse.ArgumentParser(prog="spectral-models",
                                     description="Spectral sequences of filtered complexes and bicomplexes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="Q or Fp:N")
    common.add_argument("--r", type=int, help="page or model structure index")
    common.add_argument("--s-set", dest="s_set", help="comma separated S, e.g. 0,1,3")
    common.add_argument("--window", help="lo:hi[:margin]")
    common.add_argument("--flavor", choices=model_check.FLAVORS, help="default: read from the document")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--config", help="JSON file with defaults for any flag")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging")

    commands = parser.add_subparsers(dest="command")
    commands.required = True

    pages = commands.add_parser("pages", parents=[common], help="pages of a complex or bicomplex")
    pages.add_argument("inputs", nargs=1, metavar="INPUT")

    check = commands.add_parser("check", parents=[common], help="run a model structure predicate on a map")
    check.add_argument("inputs", nargs=1, metavar="INPUT")
    check.add_argument("predicate", choices=PREDICATES)

    cone = commands.add_parser("cone", parents=[common], help="r-cone of a chain map or of a bicomplex")
    cone.add_argument("inputs", nargs=1, metavar="INPUT")

    tot_cmd = commands.add_parser("tot", parents=[common], help="totalizations of a bicomplex")
    tot_cmd.add_argument("inputs", nargs=1, metavar="INPUT")

    ladjoint = commands.add_parser("ladjoint", parents=[common], help="the adjoint bicomplex of a filtered complex")
    ladjoint.add_argument("inputs", nargs=1, metavar="INPUT")
    ladjoint.add_argument("--right", action="store_true", help="build the right adjoint instead")

    lat = commands.add_parser("lattice", parents=[common], help="operations of the lattice of S-sets")
    lat.add_argument("op", choices=LATTICE_OPS)
    lat.add_argument("inputs", nargs="+", metavar="OPERAND",
                     help="sets as 0,1,3; lower sets as JSON, e.g. [[1],[0,1]]")

    ver = commands.add_parser("verify", parents=[common], help="run the verification suites")
    ver.add_argument("suite", choices=("all",) + verify.SUITES)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--cases", type=int)
    ver.add_argument("--jobs", type=int)
    ver.add_argument("--lattice-bound", dest="lattice_bound", type=int)
    return parser


def parse_args(argv):
    return build_parser().parse_args(argv)


# Commands

def _load(config, flavor=None):
    return codec.load(config.inputs[0], config.field, flavor or config.flavor)


def _module(value):
    if isinstance(value, (FilteredComplex, ChainMap)):
        return filtered
    return bicomplex


def cmd_pages(config):
    A = _load(config)
    if not isinstance(A, (FilteredComplex, Bicomplex)):
        raise InputError("pages needs a complex, got a map", config.inputs[0])
    table = _module(A).page(A, config.r)
    return {"command": "pages", "r": config.r, "page": page_json(table)}, EXIT_PASS


def _s_set(config, flavor):
    try:
        return SSet(config.s_set.elements, flavor)
    except ValueError as e:
        raise InputError(str(e), "--s-set")


def _weq_failures(f, r):
    return bidegrees(key for key, m in _module(f).page_map(f, r + 1).items() if not is_invertible(m))


def cmd_check(config):
    f = _load(config)
    if not isinstance(f, (ChainMap, BiMap)):
        raise InputError("check needs a morphism (a document with source and target)", config.inputs[0])
    flavor = model_check.flavor_of(f)
    predicate = config.extra.get("predicate")
    verdict = {"command": "check", "predicate": predicate, "flavor": flavor}
    if predicate == "weq":
        failing = _weq_failures(f, config.r)
        verdict.update({"r": config.r, "holds": not failing, "failing_bidegrees": failing})
    elif predicate in ("fib", "acyclic-fib"):
        S = _s_set(config, flavor)
        failures = model_check.fibration_failures(f, S)
        verdict.update({"S": S.to_list(),
                        "failing_bidegrees": {str(s): bidegrees(keys) for s, keys in sorted(failures.items())}})
        holds = not failures
        if predicate == "acyclic-fib":
            weq = _weq_failures(f, S.r)
            verdict["weq_failing_bidegrees"] = weq
            holds = holds and not weq
        verdict["holds"] = holds
    else:
        verdict["holds"] = _module(f).is_effective_mono(f)
    verdict["status"] = PASS if verdict["holds"] else FAIL
    return verdict, EXIT_PASS if verdict["holds"] else EXIT_FINDINGS


def cmd_cone(config):
    value = _load(config)
    r = config.r
    if isinstance(value, ChainMap):
        C, _, _ = filtered.cone(value, r)
        acyclic = filtered.is_r_acyclic(C, r)
        page = filtered.page(C, r + 1)
    elif isinstance(value, Bicomplex):
        C = bicomplex.cone(value, r)
        acyclic = bicomplex.is_r_acyclic(C, r)
        page = bicomplex.page(C, r + 1)
    else:
        raise InputError("cone needs a chain map or a bicomplex", config.inputs[0])
    return {"command": "cone", "r": r, "cone": codec.encode(C),
            "r_acyclic": acyclic, "next_page": page_json(page)}, EXIT_PASS


def cmd_tot(config):
    B = _load(config, codec.FLAVOR_BICOMPLEX)
    if not isinstance(B, Bicomplex):
        raise InputError("tot needs a bicomplex", config.inputs[0])
    return {"command": "tot", "tot_pi": codec.encode(tot.tot_pi(B)),
            "tot_oplus": codec.encode(tot.tot_oplus(B))}, EXIT_PASS


def cmd_ladjoint(config):
    A = _load(config, codec.FLAVOR_FILTERED)
    if not isinstance(A, FilteredComplex):
        raise InputError("ladjoint needs a filtered complex", config.inputs[0])
    window = config.window or tot.Window.around(A, config.r)
    build = tot.r_adjoint if config.extra.get("right") else tot.l_adjoint
    truncated = build(A, window)
    return {"command": "ladjoint", "window": window.to_dict(),
            "stable_tail": truncated.stable_tail.to_dict(),
            "body": codec.encode(truncated.body)}, EXIT_PASS


def _lattice_operand(text):
    if text.strip().startswith("["):
        return codec.parse_json(text, "operand")
    try:
        return lattice.element(v for v in text.split(",") if v.strip())
    except ValueError as e:
        raise InputError(str(e), "operand {!r}".format(text))


def cmd_lattice(config):
    op = config.extra.get("op")
    operands = [_lattice_operand(x) for x in config.inputs]
    arity = 1 if op in ("alpha", "beta") else 2
    if len(operands) != arity:
        raise InputError("{} takes {} operand(s), got {}".format(op, arity, len(operands)))
    try:
        if op == "join":
            result = lattice.to_list(lattice.join(*operands))
        elif op == "meet":
            result = lattice.to_list(lattice.meet(*operands))
        elif op == "leq":
            result = lattice.leq(*operands)
        elif op == "alpha":
            result = lattice.lower_set_to_list(lattice.alpha(operands[0]))
        else:
            result = lattice.to_list(lattice.beta(operands[0]))
    except (ValueError, TypeError, lattice.MalformedLowerSet) as e:
        raise InputError(str(e), "operands")
    return {"command": "lattice", "op": op, "operands": config.inputs, "result": result}, EXIT_PASS


def cmd_verify(config):
    report = verify.run(config.extra.get("suite"), config)
    return report, EXIT_PASS if report["status"] == PASS else EXIT_FINDINGS


COMMANDS = {"pages": cmd_pages, "check": cmd_check, "cone": cmd_cone, "tot": cmd_tot,
            "ladjoint": cmd_ladjoint, "lattice": cmd_lattice, "verify": cmd_verify}


def write_report(report, out=None):
    text = codec.dumps(report) + "\n"
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _main(config):
    started = pendulum.utcnow()
    singer.log_info("Running %s with %r", config.command, config)
    report, code = COMMANDS[config.command](config)
    write_report(report, config.out)
    singer.log_info("Finished %s in %ss, exit code %s", config.command,
                    (pendulum.utcnow() - started).total_seconds(), code)
    return code


def _usage_error(e):
    sys.stderr.write("spectral-models: {}\n".format(e))
    sys.exit(EXIT_USAGE)


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)

    try:
        config = RunConfig.from_args(args)
    except INPUT_ERRORS + (ValueError,) as e:
        _usage_error(e)
    config.extra.update({k: getattr(args, k) for k in ("predicate", "op", "suite", "right") if hasattr(args, k)})
    if config.verbose:
        singer.get_logger().setLevel(logging.DEBUG)

    try:
        code = _main(config)
    except INPUT_ERRORS as e:
        _usage_error(e)
    except Exception as e:
        singer.log_critical(e)
        raise e
    sys.exit(code)


if __name__ == "__main__":
    main()
