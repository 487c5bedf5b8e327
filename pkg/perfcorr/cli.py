#!/usr/bin/env python3
"""
Batch command line for perfcorr.

Every analysis reads named objects from a workspace JSON file and prints a
JSON report on stdout. Exit codes: 0 affirmative verdict, 1 negative
verdict, 2 error (with a JSON message on stderr).
"""
import argparse
import json
import logging
import sys

from pydantic import ValidationError

from . import config
from .bipartite import entanglement, hardy_check, hardy_search, reduced_states, schmidt
from .correlation import (
    check_equivalences_mixed,
    check_equivalences_vector,
    is_perfectly_correlated,
    perfectly_correlative_domain,
)
from .errors import PerfCorrError
from .joint_dist import commutative_domain, compatibility_conditions, joint_distribution, successive_measurement
from .linalg_core import matrix_to_json
from .measurement import measure, precisely_measures, sample_measurements, von_neumann_model
from .models import MeasurementOrder, clean_json
from .povm_dilation import joint_dilate, naimark_dilate, povm_perfectly_correlated
from .verifier import list_suites, replay_failure, run_all, run_suite
from .workspace import dump_objects, load_workspace

logger = logging.getLogger(__name__)

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _summary(verdict) -> str:
    if verdict.correlated:
        return "perfectly correlated"
    w = verdict.witness
    return f"not perfectly correlated: cross term at ({w.lambda_:.6g}, {w.mu:.6g}) has magnitude {w.magnitude:.3e}"


def cmd_correlate(args, ws):
    s = ws.state(args.state)
    if args.povm:
        verdict = povm_perfectly_correlated(ws.povm(args.x), ws.povm(args.y), s, ws.tol)
        report = {'verdict': verdict.to_json()}
    else:
        x, y = ws.observable(args.x), ws.observable(args.y)
        verdict = is_perfectly_correlated(x, y, s, ws.tol)
        check = check_equivalences_vector if s.is_vector else check_equivalences_mixed
        report = {'verdict': verdict.to_json(), 'characterizations': check(x, y, s, ws.tol).to_json()}
    print(_summary(verdict), file=sys.stderr)
    return report, EXIT_YES if verdict.correlated else EXIT_NO


def cmd_domain(args, ws):
    x, y = ws.observable(args.x), ws.observable(args.y)
    domain = perfectly_correlative_domain(x, y, ws.tol)
    report = {'domain': domain.to_json(), 'commutative_domain': commutative_domain(x, y, ws.tol).to_json()}
    return report, EXIT_YES if domain.dim > 0 else EXIT_NO


def cmd_jointdist(args, ws):
    x, y, s = ws.observable(args.x), ws.observable(args.y), ws.state(args.state)
    record = joint_distribution(x, y, s, ws.tol)
    report = {'joint_distribution': record.to_json(),
              'compatibility': compatibility_conditions(x, y, s, ws.tol).to_json()}
    if args.samples:
        report['successive'] = {order.value: successive_measurement(x, y, s, order, args.samples, args.seed,
                                                                    ws.tol).to_json()
                                for order in MeasurementOrder}
    return report, EXIT_YES if record.present else EXIT_NO


def cmd_schmidt(args, ws):
    s = ws.state(args.state)
    dims = tuple(args.dims)
    decomposition = schmidt(s, dims, ws.tol)
    rho1, rho2 = reduced_states(s.vector, dims)
    report = {
        'schmidt': decomposition.to_json(),
        'entanglement': entanglement(s, dims, args.base, ws.tol),
        'base': args.base,
        'reduced_states': [matrix_to_json(rho1), matrix_to_json(rho2)],
    }
    return report, EXIT_YES


def cmd_hardy(args, ws):
    s = ws.state(args.state)
    if args.search:
        found = hardy_search(s, args.resolution, args.seed, tol=ws.tol)
        if found is None:
            return {'found': False}, EXIT_NO
        u1, d1, u2, d2 = found
    else:
        if not (args.u and args.d):
            raise PerfCorrError("hardy needs --u and --d unless --search is given")
        u1, d1 = ws.observable(args.u), ws.observable(args.d)
        u2 = ws.observable(args.u2) if args.u2 else None
        d2 = ws.observable(args.d2) if args.d2 else None
    report = hardy_check(s, u1, d1, u2, d2, ws.tol)
    out = {'found': True, 'report': report.to_json()}
    if args.search:
        out['observables'] = {name: matrix_to_json(obs.matrix) for name, obs in zip(('U1', 'D1', 'U2', 'D2'), found)}
    return out, EXIT_YES if report.verdict == 'nonlocality_witnessed' else EXIT_NO


def cmd_dilate(args, ws):
    p1 = ws.povm(args.povm1)
    if args.povm2:
        joint = joint_dilate(p1, ws.povm(args.povm2), ws.tol)
        return {'joint_dilation': joint.to_json()}, EXIT_YES
    return {'dilation': naimark_dilate(p1, ws.tol).to_json()}, EXIT_YES


def cmd_measure(args, ws):
    mp, s = ws.process(args.process), ws.state(args.state)
    report = {'outcomes': [r.to_json() for r in measure(mp, s, ws.tol)]}
    if args.samples:
        report['sampled'] = sample_measurements(mp, s, args.samples, args.seed, ws.tol).to_json()
    return report, EXIT_YES


def cmd_vnmodel(args, ws):
    a = ws.observable(args.observable)
    mp = von_neumann_model(a, tol=ws.tol)
    report = {'process': mp.to_json(), 'workspace': dump_objects(**{f"{args.observable}_model": mp})}
    if args.state:
        s = ws.state(args.state)
        report['outcomes'] = [r.to_json() for r in measure(mp, s, ws.tol)]
        report['precise'] = precisely_measures(mp, a, s, ws.tol).to_json()
    return report, EXIT_YES


def cmd_verify(args, ws):
    if args.suite.lower() == 'all':
        results = run_all(args.trials, args.seed)
        return {'suites': [r.to_json() for r in results]}, EXIT_YES if all(r.passed for r in results) else EXIT_NO
    result = run_suite(args.suite, args.trials, args.seed, args.dims)
    return result.to_json(), EXIT_YES if result.passed else EXIT_NO


def cmd_replay(args, ws):
    with open(args.failure, 'r', encoding='utf-8') as f:
        failure = replay_failure(f.read())
    if failure is None:
        return {'reproduced': False}, EXIT_YES
    return {'reproduced': True, 'failure': failure.to_json()}, EXIT_NO


def cmd_list_suites(args, ws):
    return {'suites': list_suites()}, EXIT_YES


COMMANDS = {
    'correlate': cmd_correlate,
    'domain': cmd_domain,
    'jointdist': cmd_jointdist,
    'schmidt': cmd_schmidt,
    'hardy': cmd_hardy,
    'dilate': cmd_dilate,
    'measure': cmd_measure,
    'vnmodel': cmd_vnmodel,
    'verify': cmd_verify,
    'replay': cmd_replay,
    'list-suites': cmd_list_suites,
}

NEEDS_WORKSPACE = {'correlate', 'domain', 'jointdist', 'schmidt', 'hardy', 'dilate', 'measure', 'vnmodel'}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='perfcorr', description='Perfect correlation analyses on workspace files')
    parser.add_argument('--log-level', default=config.LOG_LEVEL, help='Logging level (default: %(default)s)')
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name, help_text, workspace=True):
        p = sub.add_parser(name, help=help_text)
        if workspace:
            p.add_argument('--workspace', '-w', required=True, help='Workspace JSON file')
        p.add_argument('--out', help='Also write the JSON report to this file')
        return p

    p = command('correlate', 'Decide perfect correlation of two observables (or POVMs) in a state')
    p.add_argument('--x', required=True)
    p.add_argument('--y', required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--povm', action='store_true', help='Treat --x and --y as POVM names')

    p = command('domain', 'Perfectly correlative domain {X=Y} and commutative domain')
    p.add_argument('--x', required=True)
    p.add_argument('--y', required=True)

    p = command('jointdist', 'Joint probability distribution of two observables')
    p.add_argument('--x', required=True)
    p.add_argument('--y', required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--samples', type=int, default=0, help='Also simulate successive measurements')
    p.add_argument('--seed', type=int, default=config.DEFAULT_SEED)

    p = command('schmidt', 'Schmidt decomposition and entanglement of a bipartite pure state')
    p.add_argument('--state', required=True)
    p.add_argument('--dims', type=int, nargs=2, required=True, metavar=('D1', 'D2'))
    p.add_argument('--base', default=config.ENTROPY_BASE, choices=['e', '2'])

    p = command('hardy', "Hardy's conditions for a two-qubit state")
    p.add_argument('--state', required=True)
    p.add_argument('--u')
    p.add_argument('--d')
    p.add_argument('--u2')
    p.add_argument('--d2')
    p.add_argument('--search', action='store_true', help='Search for observables satisfying the conditions')
    p.add_argument('--resolution', type=int, default=64)
    p.add_argument('--seed', type=int, default=config.DEFAULT_SEED)

    p = command('dilate', 'Naimark dilation of a POVM, or joint dilation of two')
    p.add_argument('--povm1', required=True)
    p.add_argument('--povm2')

    p = command('measure', 'Outcome probabilities and conditional states of a measuring process')
    p.add_argument('--process', required=True)
    p.add_argument('--state', required=True)
    p.add_argument('--samples', type=int, default=0)
    p.add_argument('--seed', type=int, default=config.DEFAULT_SEED)

    p = command('vnmodel', 'Repeatable measuring process for a nondegenerate observable')
    p.add_argument('--observable', required=True)
    p.add_argument('--state', help='Also measure this state and test precise measurement')

    p = command('verify', 'Run a theorem suite (or "all")', workspace=False)
    p.add_argument('--suite', required=True)
    p.add_argument('--trials', type=int, default=config.DEFAULT_TRIALS)
    p.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    p.add_argument('--dims', type=int, nargs='+')

    p = command('replay', 'Replay a serialized suite failure', workspace=False)
    p.add_argument('--failure', required=True, help='JSON file holding a failure record')

    command('list-suites', 'List registered theorem suites', workspace=False)
    return parser


def _emit(report, out_path=None):
    text = json.dumps(clean_json(report), sort_keys=True)
    print(text)
    if out_path:
        with open(out_path, 'w') as f:
            json.dump(clean_json(report), f, indent=2, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config.configure_logging(args.log_level)
    try:
        ws = load_workspace(args.workspace) if args.command in NEEDS_WORKSPACE else None
        report, code = COMMANDS[args.command](args, ws)
    except (PerfCorrError, ValidationError, OSError, json.JSONDecodeError) as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(json.dumps({'error': str(e), 'type': type(e).__name__}), file=sys.stderr)
        return EXIT_ERROR
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
