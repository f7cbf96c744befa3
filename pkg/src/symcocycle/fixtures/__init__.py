"""Bundled group fixtures (.mtab files) and a path helper."""

from importlib import resources


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture, e.g. fixture_path('g64_149.mtab')."""
    ref = resources.files(__package__) / name
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled fixture named {name}")
    return str(ref)


def fixture_names() -> list[str]:
    return sorted(
        entry.name
        for entry in resources.files(__package__).iterdir()
        if entry.name.endswith((".mtab", ".perm"))
    )
