import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Curveflow.settings')
django.setup()
