# tests/conftest.py
# Aggiunge la directory principale del progetto al path, come fanno gli script.

import os
import sys

from hypothesis import settings

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")
