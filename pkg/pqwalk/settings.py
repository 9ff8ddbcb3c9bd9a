"""
Django settings for pqwalk project.

The project has no database and serves no HTTP traffic: Django provides the
app registry, settings, logging configuration, management commands and the
test runner.
"""

from pathlib import Path
import environ
import os

# Initialize environment variables
env = environ.Env(
    DEBUG=(bool, False),
    PQWALK_TOL=(float, 1e-10),
    PQWALK_EIGEN_ONE_TOL=(float, 1e-8),
    PQWALK_SEED=(int, 0),
    PQWALK_RANDOM_STATES=(int, 20),
    PQWALK_MAX_STEPS=(int, 20000),
    OQRW_MAX_KMAX=(int, 12),
)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Read .env file
environ.Env.read_env(os.path.join(BASE_DIR, '.env'))

# Nothing is signed; Django still refuses to start without a key.
SECRET_KEY = env('SECRET_KEY', default='pqwalk-local-only')

DEBUG = env('DEBUG')

ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=[])


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Third-party apps
    'rest_framework',
    'django_rq',

    # Local apps
    'core',
    'qchannels',
    'pq',
    'oqrw',
    'stationary',
    'cli',
]

# No models are persisted.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Numerical defaults
# Structural checks (Hermiticity, trace preservation, PSD, PQ pattern)
PQWALK_TOL = env('PQWALK_TOL')
# |lambda - 1| threshold used to count fixed points
PQWALK_EIGEN_ONE_TOL = env('PQWALK_EIGEN_ONE_TOL')
# Seed and size of the random density family used by accessibility and recurrence evidence
PQWALK_SEED = env('PQWALK_SEED')
PQWALK_RANDOM_STATES = env('PQWALK_RANDOM_STATES')
# Upper bound for --steps / --horizon
PQWALK_MAX_STEPS = env('PQWALK_MAX_STEPS')
# First-return enumeration visits alpha_{2k} words per k; 12 keeps it under a second
OQRW_MAX_KMAX = env('OQRW_MAX_KMAX')


# Logging Configuration
# Console logging always, rotating files under logs/ in development

PQWALK_APPS = ['core', 'qchannels', 'pq', 'oqrw', 'stationary', 'cli']

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': env('PQWALK_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        }
        for app in PQWALK_APPS
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}

# Add file logging only in development
if DEBUG:
    LOGS_DIR = BASE_DIR / 'logs'
    LOGS_DIR.mkdir(exist_ok=True)

    LOGGING['handlers']['file'] = {
        'level': 'DEBUG',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': LOGS_DIR / 'pqwalk.log',
        'maxBytes': 1024 * 1024 * 15,  # 15MB
        'backupCount': 10,
        'formatter': 'verbose',
    }

    for logger_name in PQWALK_APPS:
        LOGGING['loggers'][logger_name]['handlers'] = ['file', 'console']
        LOGGING['loggers'][logger_name]['level'] = 'DEBUG'


# Django RQ Configuration
# `repro <suite> --enqueue` puts long reproduction runs on this queue
RQ_QUEUES = {
    'default': {
        'URL': env('REDIS_URL', default='redis://localhost:6379/0'),
        'DEFAULT_TIMEOUT': 3600,
    },
}
