import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "pqwalk.settings")
django.setup()
