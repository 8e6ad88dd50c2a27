import ast
import json

from i18n.i18n import I18nAuto
from i18n.scan_i18n import STANDARD_FILE, extract_i18n_strings, scan_keys, sync_locale


def test_english_is_identity():
    i18n = I18nAuto("en_US")
    assert i18n("Report saved to {}") == "Report saved to {}"


def test_portuguese_catalog():
    i18n = I18nAuto("pt_BR")
    assert i18n("FAIL") == "FALHOU"
    assert i18n("not a key") == "not a key"


def test_unknown_language_falls_back():
    assert I18nAuto("xx_XX").language == "en_US"


def test_catalogs_cover_the_code():
    keys = scan_keys()
    assert "Report saved to {}" in keys
    with open(STANDARD_FILE, encoding="utf-8") as f:
        english = json.load(f)
    assert sorted(english) == keys
    with open(STANDARD_FILE.replace("en_US", "pt_BR"), encoding="utf-8") as f:
        assert sorted(json.load(f)) == keys


def test_extract_strings():
    tree = ast.parse('print(i18n("a {}").format(1))\nother("b")\ni18n(name)')
    assert extract_i18n_strings(tree) == ["a {}"]


def test_sync_locale(tmp_path):
    path = tmp_path / "locale" / "xx_XX.json"
    path.parent.mkdir()
    path.write_text(json.dumps({"old": "velho", "kept": "mantido"}), encoding="utf-8")
    missing, unused = sync_locale(str(path), ["kept", "new"])
    assert missing == ["new"]
    assert unused == ["old"]
    assert json.loads(path.read_text(encoding="utf-8")) == {"kept": "mantido", "new": "new"}
    sync_locale(str(path), ["kept", "new"], identity=True)
    assert json.loads(path.read_text(encoding="utf-8")) == {"kept": "kept", "new": "new"}
