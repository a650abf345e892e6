"""
Django settings for the persistlab project.

Only the management commands are used: no database, no HTTP stack. Every
tunable reads an environment variable with a default.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Sem views nem sessões: a chave só existe porque o Django exige uma
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'persistlab-insecure-local-key')

DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'persistlab',
]

DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Logging
# Logger "persistlab" vai para stderr; stdout fica reservado para resultados

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'persistlab': {
            'handlers': ['stderr'],
            'level': os.environ.get('PERSISTLAB_LOG_LEVEL', 'INFO'),
        },
    },
}


# Pipeline de persistência

_seed = os.environ.get('PERSISTLAB_SEED')
PERSISTLAB_SEED = int(_seed) if _seed not in (None, '') else None

PERSISTLAB_RIPS_MAXDIM = int(os.environ.get('PERSISTLAB_RIPS_MAXDIM', 2))

PERSISTLAB_INDECOMPOSABLE_CAP = int(os.environ.get('PERSISTLAB_INDECOMPOSABLE_CAP', 30))

PERSISTLAB_GRAD_TOLERANCE = float(os.environ.get('PERSISTLAB_GRAD_TOLERANCE', 1e-6))
