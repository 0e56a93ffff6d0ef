import os
from pathlib import Path


def demo_dir(name):
    out = Path(os.environ.get("CURVEFLOW_OUT", "demo-out")) / name
    out.mkdir(parents=True, exist_ok=True)
    return out
