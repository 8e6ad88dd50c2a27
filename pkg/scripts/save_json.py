import hashlib
import json
import math
import os
import platform

import numpy as np

from i18n.i18n import I18nAuto

i18n = I18nAuto()

PACKAGE_VERSION = "1.0.0"


def to_jsonable(obj):
    """Converte numpy, complexos e nao-finitos para tipos aceitos pelo json."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def export_json(report, destination):
    """Grava o relatorio com chaves ordenadas, para que reexecucoes gerem o mesmo arquivo."""
    folder = os.path.dirname(destination)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(destination, "w", encoding="utf-8", newline="\n") as file:
        json.dump(to_jsonable(report), file, ensure_ascii=False, indent=4, sort_keys=True)
        file.write("\n")
    return destination


def config_digest(config):
    """sha256 do config em forma canonica (chaves ordenadas, sem espacos)."""
    canonical = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(config, out_dir, seed, command, outputs=()):
    # Sem timestamp: duas execucoes iguais produzem o mesmo manifest.
    manifest = {
        "command": command,
        "config_sha256": config_digest(config),
        "seed": int(seed),
        "versions": {
            "package": PACKAGE_VERSION,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    path = export_json(manifest, os.path.join(out_dir, "manifest.json"))
    print(i18n("Manifest saved to {}").format(path))
    return path
