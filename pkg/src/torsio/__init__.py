"""Reidemeister torsion forms of knot exteriors and mutation experiments."""

from importlib import resources

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled knot-table file such as ``"trefoil.json"``."""
    return resources.files(__package__) / "data" / name


def resolve_path(name_or_path):
    """A file path as given, or a bundled entry by name (``"trefoil"``, ``"kt_conway"``)."""
    from pathlib import Path
    p = Path(name_or_path)
    if p.exists():
        return p
    for cand in (f"{name_or_path}.json", f"{name_or_path}_pair.json"):
        q = Path(str(data_path(cand)))
        if q.exists():
            return q
    raise FileNotFoundError(f"no knot file or bundled entry named {name_or_path!r}")
