import ast
from pathlib import Path

APPS = Path(__file__).resolve().parents[2]
NETWORK_MODULES = {"requests", "httpx", "urllib3", "aiohttp", "http.client", "urllib.request", "socket"}


def imported_modules(path):
    tree = ast.parse(path.read_text(encoding="utf-8"))
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            yield from (alias.name for alias in node.names)
        elif isinstance(node, ast.ImportFrom) and node.module:
            yield node.module


def test_only_endpoint_client_touches_the_network():
    offenders = []
    for path in APPS.rglob("*.py"):
        if path.name == "endpoint.py" and path.parent.name == "adapters":
            continue
        if "tests" in path.parts:
            continue
        for module in imported_modules(path):
            if module in NETWORK_MODULES or module.split(".")[0] in {"requests", "httpx", "aiohttp"}:
                offenders.append(f"{path.relative_to(APPS)}: {module}")
    assert offenders == []
