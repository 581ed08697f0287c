"""Pass/fail records produced by the verification procedures."""
import singer


PASS = "pass"
FAIL = "fail"


def run_check(name, fn):
    """Evaluate fn() in isolation.

    fn returns a bool or (bool, witness). An exception is recorded as a
    failed check carrying the exception text.
    """
    try:
        result = fn()
    except Exception as e:
        singer.log_warning("Check %s raised %s: %s", name, type(e).__name__, e)
        return {"check": name, "status": FAIL, "error": "{}: {}".format(type(e).__name__, e)}
    if isinstance(result, tuple):
        ok, witness = result
    else:
        ok, witness = result, None
    entry = {"check": name, "status": PASS if ok else FAIL}
    if witness is not None:
        entry["witness"] = witness
    if not ok:
        singer.log_warning("Check %s failed", name)
    return entry


def overall(checks):
    return PASS if all(c["status"] == PASS for c in checks) else FAIL


def bidegrees(keys):
    return [list(k) for k in sorted(keys)]


def page_json(table):
    """Dims and differentials of a PageTable."""
    return {"r": table.r,
            "entries": [{"p": p, "q": q, "dim": d} for (p, q), d in table.dims().items()],
            "differentials": [{"from": list(key), "to": list(table.target(key)), "matrix": m.to_lists()}
                              for key, m in sorted(table.differentials.items())]}


def matrices_json(matrices):
    return [{"at": list(key), "matrix": m.to_lists()} for key, m in sorted(matrices.items())]
