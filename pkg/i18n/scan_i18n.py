import ast
import glob
import json
import os
from collections import OrderedDict

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
STANDARD_FILE = os.path.join(ROOT, "i18n", "locale", "en_US.json")
SKIPPED_DIRS = ("examples", "tests", "output")


def extract_i18n_strings(node):
    """String literals passed to i18n(...) anywhere below ``node``."""
    i18n_strings = []

    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "i18n"
    ):
        for arg in node.args:
            if isinstance(arg, ast.Constant) and isinstance(arg.value, str):
                i18n_strings.append(arg.value)

    for child_node in ast.iter_child_nodes(node):
        i18n_strings.extend(extract_i18n_strings(child_node))

    return i18n_strings


def scan_keys(root=ROOT):
    """Sorted unique i18n keys of every .py file under ``root`` that uses I18nAuto."""
    strings = []
    for filename in glob.iglob(os.path.join(root, "**", "*.py"), recursive=True):
        relative = os.path.relpath(filename, root)
        if relative.split(os.sep)[0] in SKIPPED_DIRS:
            continue
        with open(filename, "r", encoding="utf-8") as f:
            code = f.read()
        if "I18nAuto" in code:
            strings.extend(extract_i18n_strings(ast.parse(code)))
    return sorted(set(strings))


def sync_locale(path, keys, identity=False):
    """
    Add missing keys and drop unused ones in the catalog at ``path``.

    New keys map to themselves. With ``identity`` every entry is reset to its key
    (the en_US catalog). Returns (missing, unused).
    """
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as f:
            lang_data = json.load(f, object_pairs_hook=OrderedDict)
    else:
        lang_data = OrderedDict()
    missing = sorted(set(keys) - set(lang_data))
    unused = sorted(set(lang_data) - set(keys))
    updated = OrderedDict((key, key if identity else lang_data.get(key, key)) for key in sorted(keys))
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(updated, f, ensure_ascii=False, indent=4, sort_keys=True)
        f.write("\n")
    return missing, unused


if __name__ == "__main__":
    code_keys = scan_keys()
    print("Total unique:", len(code_keys))
    locale_dir = os.path.dirname(STANDARD_FILE)
    for name in sorted(os.listdir(locale_dir)) if os.path.isdir(locale_dir) else ["en_US.json"]:
        if not name.endswith(".json"):
            continue
        path = os.path.join(locale_dir, name)
        missing, unused = sync_locale(path, code_keys, identity=path == STANDARD_FILE)
        print(name, "missing keys:", len(missing), "unused keys:", len(unused))
        for key in missing:
            print("\t+", key)
        for key in unused:
            print("\t-", key)
