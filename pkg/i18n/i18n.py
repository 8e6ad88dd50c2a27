import json
import locale
import os

LOCALE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "locale")


def locale_path(language):
    return os.path.join(LOCALE_DIR, f"{language}.json")


def load_language_list(language):
    with open(locale_path(language), "r", encoding="utf-8") as f:
        language_list = json.load(f)
    return language_list


def system_language():
    language = os.environ.get("RIBAUCOUR_LANG")
    if language:
        return language
    try:
        language = locale.getlocale()[0]
    except ValueError:
        language = None
    return language or "en_US"


class I18nAuto:
    def __init__(self, language=None):
        if language in ["Auto", None]:
            language = system_language()
        if not os.path.exists(locale_path(language)):
            language = "en_US"
        self.language = language
        # sem catalogo en_US as chaves servem de mensagem
        self.language_map = load_language_list(language) if os.path.exists(locale_path(language)) else {}

    def __call__(self, key):
        return self.language_map.get(key, key)

    def __repr__(self):
        return "Use Language: " + self.language
