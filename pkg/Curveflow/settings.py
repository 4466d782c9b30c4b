"""
Django settings for Curveflow project.

Every value can be overridden from the environment or from Curveflow/.env;
the defaults run the engine and its test-suite without any .env file.
"""
import os
from decouple import config, Csv
from dotenv import load_dotenv
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# Load .env from the 'Curveflow' subdirectory
load_dotenv(os.path.join(BASE_DIR, 'Curveflow', '.env'))

SECRET_KEY = config("SECRET_KEY", default="curveflow-local-development-key")
DEBUG = config("DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost,127.0.0.1,testserver", cast=Csv())


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'Curveflowapp',
    'corsheaders'
]

MIDDLEWARE = [
    'corsheaders.middleware.CorsMiddleware',
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

CORS_ALLOWED_ORIGINS = config("CORS_ALLOWED_ORIGINS", default="", cast=Csv())

ROOT_URLCONF = 'Curveflow.urls'

WSGI_APPLICATION = 'Curveflow.wsgi.application'

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
}

# Flat files are the only persistence; no database is configured.
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Curve flow engine

CURVEFLOW_OUTPUT_DIR = config("CURVEFLOW_OUTPUT_DIR", default="out")
CURVEFLOW_DELTA_POLE = config("CURVEFLOW_DELTA_POLE", default=1e-6, cast=float)
CURVEFLOW_EPS_CONVEX = config("CURVEFLOW_EPS_CONVEX", default=1e-10, cast=float)
CURVEFLOW_STENCIL_ORDER = config("CURVEFLOW_STENCIL_ORDER", default=4, cast=int)
CURVEFLOW_LOG_LEVEL = config("CURVEFLOW_LOG_LEVEL", default="INFO")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
    },
    'handlers': {
        'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
    },
    'loggers': {
        'Curveflowapp': {'handlers': ['console'], 'level': CURVEFLOW_LOG_LEVEL, 'propagate': False},
    },
}
