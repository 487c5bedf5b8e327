"""
Workspace files: one JSON document holding the named observables, states,
POVMs, measuring processes and instruments an analysis refers to.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from .errors import PerfCorrError, WorkspaceError
from .linalg_core import ToleranceProfile, matrix_from_json, matrix_to_json, resolve_tol, vector_from_json
from .measurement import Instrument, MeasuringProcess
from .models import WorkspaceFile
from .spectral import HermitianObservable, Povm
from .states import QuantumState

logger = logging.getLogger(__name__)


class Workspace:
    """Resolves names in a validated workspace file into numerical objects"""

    def __init__(self, data: WorkspaceFile, tol: Optional[ToleranceProfile] = None):
        self.data = data
        self.tol = resolve_tol(tol)

    def _lookup(self, kind: str, name: str):
        table = getattr(self.data, kind)
        if name not in table:
            known = ', '.join(sorted(table)) or 'none'
            raise WorkspaceError(f"Unknown {kind[:-1]} '{name}' (known: {known})")
        return table[name]

    def _build(self, kind: str, name: str, build):
        spec = self._lookup(kind, name)
        try:
            return build(spec)
        except PerfCorrError as e:
            raise type(e)(f"{kind[:-1]} '{name}': {e}") from e

    def observable(self, name: str) -> HermitianObservable:
        return self._build('observables', name, lambda s: HermitianObservable(matrix_from_json(s.matrix), self.tol))

    def state(self, name: str) -> QuantumState:
        def build(s):
            if s.vector is not None:
                return QuantumState(vector=vector_from_json(s.vector), tol=self.tol)
            return QuantumState(density=matrix_from_json(s.density), tol=self.tol)
        return self._build('states', name, build)

    def povm(self, name: str) -> Povm:
        return self._build('povms', name,
                           lambda s: Povm([(o.label, matrix_from_json(o.effect)) for o in s.outcomes], self.tol))

    def process(self, name: str) -> MeasuringProcess:
        def build(s):
            mp = MeasuringProcess(vector_from_json(s.probe_state), matrix_from_json(s.interaction),
                                  matrix_from_json(s.meter), self.tol)
            if mp.probe_dim != s.probe_dim:
                raise WorkspaceError(f"probe_dim {s.probe_dim} does not match a probe state of length {mp.probe_dim}")
            return mp
        return self._build('processes', name, build)

    def instrument(self, name: str) -> Instrument:
        return self._build('instruments', name, lambda s: Instrument(
            [(o.label, [matrix_from_json(k) for k in o.kraus]) for o in s.outcomes], self.tol))

    def names(self) -> Dict[str, list]:
        return {kind: sorted(getattr(self.data, kind))
                for kind in ('observables', 'states', 'povms', 'processes', 'instruments')}

    def check_all(self) -> Dict[str, Any]:
        """Build every named object; returns {'valid': bool, 'errors': [...]}"""
        errors = []
        builders = {'observables': self.observable, 'states': self.state, 'povms': self.povm,
                    'processes': self.process, 'instruments': self.instrument}
        for kind, names in self.names().items():
            for name in names:
                try:
                    builders[kind](name)
                except PerfCorrError as e:
                    errors.append({'kind': kind[:-1], 'name': name, 'type': type(e).__name__, 'error': str(e)})
        return {'valid': not errors, 'errors': errors}


def parse_workspace(raw: Union[str, Dict[str, Any]], tol: Optional[ToleranceProfile] = None) -> Workspace:
    """
    Validate a workspace document.

    Raises:
        WorkspaceError: on malformed JSON or a document that fails the schema
    """
    try:
        data = json.loads(raw) if isinstance(raw, str) else raw
        return Workspace(WorkspaceFile.parse_obj(data), tol)
    except json.JSONDecodeError as e:
        raise WorkspaceError(f"Workspace is not valid JSON: {e}") from e
    except ValidationError as e:
        raise WorkspaceError(f"Workspace does not match the schema: {e}") from e


def load_workspace(path: Union[str, Path], tol: Optional[ToleranceProfile] = None) -> Workspace:
    path = Path(path)
    try:
        raw = path.read_text(encoding='utf-8')
    except OSError as e:
        raise WorkspaceError(f"Cannot read workspace {path}: {e}") from e
    logger.debug("Loaded workspace %s", path)
    return parse_workspace(raw, tol)


def dump_objects(**objects) -> Dict[str, Any]:
    """Workspace document holding the given objects under their keyword names"""
    doc: Dict[str, Any] = {'version': '1', 'observables': {}, 'states': {}, 'povms': {},
                           'processes': {}, 'instruments': {}}
    for name, obj in objects.items():
        if isinstance(obj, HermitianObservable):
            doc['observables'][name] = {'matrix': matrix_to_json(obj.matrix)}
        elif isinstance(obj, QuantumState):
            doc['states'][name] = obj.to_json()
        elif isinstance(obj, Povm):
            doc['povms'][name] = {'outcomes': obj.to_json()['outcomes']}
        elif isinstance(obj, MeasuringProcess):
            doc['processes'][name] = obj.to_json()
        elif isinstance(obj, Instrument):
            doc['instruments'][name] = obj.to_json()
        else:
            raise WorkspaceError(f"Cannot store {type(obj).__name__} '{name}' in a workspace")
    return doc
