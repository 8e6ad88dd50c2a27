import os
import sys

# scripts.* e i18n.* importam a partir da raiz, como no main.py
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# mensagens em ingles nos testes, qualquer que seja o locale da maquina
os.environ["RIBAUCOUR_LANG"] = "en_US"
