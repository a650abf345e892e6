"""
Módulo de utilitários de entrada e saída.
Centraliza a leitura e escrita de nuvens de pontos (CSV), filtrações,
barcodes e módulos em grade (JSON), traços de otimização e configurações.

Floats vão para JSON via ``repr`` (ida e volta exata) e para CSV com 17
dígitos significativos. Índices de vértices e células começam em 0.
"""

from typing import Any, Dict, List, Sequence, Union
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from persistlab.constants import CSV_FLOAT_FORMAT
from persistlab.exceptions import InputFormatError, InvalidParametersError
from persistlab.f2linalg import F2Matrix
from persistlab.filtration import (
    MonotoneFiltration,
    PointCloud,
    complex_from_simplices,
    validate_monotone,
)
from persistlab.forms import RunConfigForm
from persistlab.liftdiff import LiftedBarcode, PersJacobian
from persistlab.multigrid import Grid, GridModule, SignedBarcode
from persistlab.persistence1 import Bar, Barcode

logger = logging.getLogger(__name__)

INFINITY = "inf"


# =============================================================================
# JSON genérico
# =============================================================================


def read_json(path) -> Any:
    """Lê um arquivo JSON convertendo falhas em InputFormatError."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise InputFormatError(f"não foi possível ler {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputFormatError(f"JSON inválido em {path}: {e}") from e


def write_json(payload: Any, path) -> Path:
    """Escreve JSON com floats em representação exata."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, allow_nan=False)
        handle.write("\n")
    return path


def _require(payload: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(payload, dict) or key not in payload:
        raise InputFormatError(f"{where}: campo obrigatório '{key}' ausente")
    return payload[key]


def _grade(value: Sequence[float]) -> List[float]:
    return [float(v) for v in value]


def _parse_grade(raw: Any, n: int, where: str) -> tuple:
    values = raw if isinstance(raw, list) else [raw]
    try:
        grade = tuple(float(v) for v in values)
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"{where}: valor não numérico {raw!r}") from e
    if len(grade) != n or isinstance(raw, bool):
        raise InputFormatError(f"{where}: esperado {n} componente(s), recebido {raw!r}")
    return grade


# =============================================================================
# Nuvens de pontos (CSV)
# =============================================================================


def read_points_csv(path) -> PointCloud:
    """
    Lê uma nuvem de pontos de um CSV, uma linha por ponto.
    Uma linha de cabeçalho não numérica é ignorada.
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except FileNotFoundError as e:
        raise InputFormatError(f"arquivo não encontrado: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InputFormatError(f"CSV inválido em {path}: {e}") from e

    values = frame.apply(pd.to_numeric, errors="coerce")
    if len(values) and values.iloc[0].isna().all():
        values = values.iloc[1:]
    if values.isna().any().any():
        raise InputFormatError(f"{path}: entradas não numéricas ou linhas incompletas")
    logger.info(f"Lidos {len(values)} pontos de {path}")
    return PointCloud(values.to_numpy(dtype=np.float64).reshape(len(values), frame.shape[1]))


def write_points_csv(cloud: PointCloud, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [f"x{i}" for i in range(cloud.d)]
    pd.DataFrame(cloud.points, columns=columns).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def write_trace_csv(state, path) -> Path:
    """Salva o traço ``step,F,grad_norm,sup_norm`` de uma descida."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


# =============================================================================
# Filtrações
# =============================================================================


def filtration_to_dict(filtration: MonotoneFiltration) -> Dict[str, Any]:
    return {
        "n": filtration.n,
        "simplices": [
            {"verts": list(simplex), "value": _grade(filtration.values[sid])}
            for sid, simplex in enumerate(filtration.complex.simplices)
        ],
    }


def filtration_from_dict(payload: Dict[str, Any]) -> MonotoneFiltration:
    """
    Reconstrói uma filtração. Todas as faces precisam estar listadas;
    a monotonicidade é verificada por validate_monotone.
    """
    n = _require(payload, "n", "filtração")
    entries = _require(payload, "simplices", "filtração")
    if not isinstance(n, int) or n < 1 or not isinstance(entries, list):
        raise InputFormatError("filtração: 'n' deve ser inteiro positivo e 'simplices' uma lista")

    values: Dict[tuple, tuple] = {}
    for k, entry in enumerate(entries):
        raw = _require(entry, "verts", f"simplexo {k}")
        try:
            simplex = tuple(sorted(int(v) for v in raw))
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"simplexo {k}: vértices inválidos {raw!r}") from e
        if not simplex or len(set(simplex)) != len(simplex) or simplex[0] < 0:
            raise InputFormatError(f"simplexo {k}: vértices inválidos {raw!r}")
        if simplex in values:
            raise InputFormatError(f"simplexo {list(simplex)} repetido")
        values[simplex] = _parse_grade(_require(entry, "value", f"simplexo {k}"), n, f"simplexo {k}")

    complex = complex_from_simplices(values.keys())
    missing = [s for s in complex.simplices if s not in values]
    if missing:
        raise InputFormatError(f"faces sem valor de filtração: {[list(s) for s in missing[:5]]}")
    return validate_monotone([values[s] for s in complex.simplices], complex)


def read_filtration_json(path) -> MonotoneFiltration:
    return filtration_from_dict(read_json(path))


def write_filtration_json(filtration: MonotoneFiltration, path) -> Path:
    return write_json(filtration_to_dict(filtration), path)


# =============================================================================
# Barcodes
# =============================================================================


def _bar_to_dict(bar: Bar) -> Dict[str, Any]:
    return {
        "birth": _grade(bar.birth),
        "death": INFINITY if bar.is_infinite else _grade(bar.death),
        "sign": bar.sign,
    }


def _bar_from_dict(entry: Dict[str, Any], n: int, where: str) -> Bar:
    birth = _parse_grade(_require(entry, "birth", where), n, where)
    raw_death = _require(entry, "death", where)
    death = None if raw_death == INFINITY else _parse_grade(raw_death, n, where)
    sign = entry.get("sign", 1)
    try:
        return Bar(birth, death, sign)
    except InvalidParametersError as e:
        raise InputFormatError(f"{where}: {e}") from e


def barcode_to_dict(B: Union[Barcode, SignedBarcode]) -> Dict[str, Any]:
    signed = isinstance(B, SignedBarcode)
    return {"n": B.n, "signed": signed, "bars": [_bar_to_dict(bar) for bar in B.bars]}


def barcode_from_dict(payload: Dict[str, Any]) -> Union[Barcode, SignedBarcode]:
    n = _require(payload, "n", "barcode")
    entries = _require(payload, "bars", "barcode")
    if not isinstance(n, int) or n < 1 or not isinstance(entries, list):
        raise InputFormatError("barcode: 'n' deve ser inteiro positivo e 'bars' uma lista")
    bars = [_bar_from_dict(entry, n, f"barra {k}") for k, entry in enumerate(entries)]
    if payload.get("signed", False):
        return SignedBarcode(
            n,
            tuple(b for b in bars if b.sign > 0),
            tuple(b for b in bars if b.sign < 0),
        )
    if any(b.sign < 0 for b in bars):
        raise InputFormatError("barcode sem sinal contém barras negativas")
    return Barcode(n, tuple(bars))


def read_barcode_json(path) -> Union[Barcode, SignedBarcode]:
    return barcode_from_dict(read_json(path))


def write_barcode_json(B: Union[Barcode, SignedBarcode], path) -> Path:
    return write_json(barcode_to_dict(B), path)


# =============================================================================
# Vetores levantados e jacobianas
# =============================================================================


def lifted_to_dict(v: LiftedBarcode) -> Dict[str, Any]:
    return {"n": v.n, "k": v.k, "signed": v.signed, "coords": [float(c) for c in v.coords]}


def lifted_from_dict(payload: Dict[str, Any]) -> LiftedBarcode:
    """Os blocos só são validados por unlift."""
    n = _require(payload, "n", "vetor levantado")
    k = _require(payload, "k", "vetor levantado")
    if not isinstance(n, int) or not isinstance(k, int) or n < 1 or k < 0:
        raise InputFormatError("vetor levantado: 'n' e 'k' devem ser inteiros válidos")
    try:
        coords = np.asarray(_require(payload, "coords", "vetor levantado"), dtype=np.float64).reshape(-1)
    except (TypeError, ValueError) as e:
        raise InputFormatError("vetor levantado: coordenadas não numéricas") from e
    return LiftedBarcode(n, k, coords, bool(payload.get("signed", False)))


def read_lifted_json(path) -> LiftedBarcode:
    return lifted_from_dict(read_json(path))


def write_lifted_json(v: LiftedBarcode, path) -> Path:
    return write_json(lifted_to_dict(v), path)


def write_jacobian_csv(J: PersJacobian, path) -> Path:
    """Jacobiana linha a linha, uma coluna por coordenada da nuvem."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(J.matrix).to_csv(path, index=False, header=False, float_format=CSV_FLOAT_FORMAT)
    return path


# =============================================================================
# Módulos em grade
# =============================================================================


def module_to_dict(M: GridModule) -> Dict[str, Any]:
    arrows = []
    for cell in M.grid.cells():
        for axis in range(M.grid.n):
            if M.grid.step(cell, axis) is None:
                continue
            matrix = M.arrow(cell, axis)
            if matrix.rows and matrix.cols:
                arrows.append({"from": list(cell), "axis": axis, "matrix": matrix.to_dense().tolist()})
    payload = {"sizes": list(M.grid.sizes), "dims": M.dims.tolist(), "arrows": arrows}
    if M.grid.coords is not None:
        payload["coords"] = [list(axis) for axis in M.grid.coords]
    return payload


def module_from_dict(payload: Dict[str, Any]) -> GridModule:
    """
    Reconstrói um GridModule. ``dims`` é o array aninhado indexado pelas
    células; setas ausentes são nulas. Não verifica comutatividade.
    """
    sizes = _require(payload, "sizes", "módulo")
    raw_dims = _require(payload, "dims", "módulo")
    try:
        grid = Grid(tuple(sizes), payload.get("coords"))
        dims = np.asarray(raw_dims, dtype=np.int64).reshape(grid.sizes)
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"módulo: tamanhos ou dimensões inválidos: {e}") from e
    except InvalidParametersError as e:
        raise InputFormatError(f"módulo: {e}") from e

    arrows = {}
    for k, entry in enumerate(payload.get("arrows", [])):
        where = f"seta {k}"
        try:
            cell = tuple(int(c) for c in _require(entry, "from", where))
            axis = int(_require(entry, "axis", where))
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"{where}: célula ou eixo inválido") from e
        target = grid.step(cell, axis) if grid.contains(cell) and 0 <= axis < grid.n else None
        if target is None:
            raise InputFormatError(f"{where}: nenhuma seta sai de {list(cell)} no eixo {axis}")
        shape = (int(dims[target]), int(dims[cell]))
        try:
            dense = np.asarray(_require(entry, "matrix", where), dtype=np.int64).reshape(shape)
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"{where}: matriz incompatível com o formato {shape}") from e
        arrows[(cell, axis)] = F2Matrix.from_dense(dense)
    return GridModule(grid, dims, arrows)


def read_module_json(path) -> GridModule:
    return module_from_dict(read_json(path))


def write_module_json(M: GridModule, path) -> Path:
    return write_json(module_to_dict(M), path)


# =============================================================================
# Configuração de execução
# =============================================================================


def load_run_config(path_or_payload) -> Dict[str, Any]:
    """
    Carrega e valida a configuração do otimizador.
    A variável de ambiente PERSISTLAB_SEED sobrescreve a semente.
    """
    payload = path_or_payload if isinstance(path_or_payload, dict) else read_json(path_or_payload)
    if not isinstance(payload, dict):
        raise InputFormatError("a configuração deve ser um objeto JSON")
    form = RunConfigForm(data=payload)
    if not form.is_valid():
        errors = "; ".join(f"{field}: {' '.join(msgs)}" for field, msgs in form.errors.items())
        raise InputFormatError(f"configuração inválida: {errors}")
    return dict(form.cleaned_data)
