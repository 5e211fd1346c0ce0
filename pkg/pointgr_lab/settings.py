"""
Django settings for the pointgr_lab project.

The project hosts a single application, ``pointgr``, which implements the
graph residual point-cloud network together with its data tooling, trainer
and command-line surface. There is no web front end: Django provides the
settings layer, logging, management commands, forms and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/stable/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('PGR_SECRET_KEY', 'pointgr-lab-local-key')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',  # Serializers and JSON rendering for reports
    'pointgr',  # Point cloud network, data tooling and trainer
]

MIDDLEWARE = []


# Database
# Nothing in pointgr is stored in a database; the test suite uses
# SimpleTestCase only.

DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Point-GR engine settings
# PGR_PRECISION selects the numeric precision of the engine (f32 or f64).
POINTGR = {
    'PRECISION': os.environ.get('PGR_PRECISION', 'f32'),
    'CHECK_FINITE': True,  # NaN/Inf after any op is an error
    'BN_MOMENTUM': 0.9,
    'BN_EPS': 1e-5,
    'LEAKY_SLOPE': 0.2,
    'BLOCK_MIN_POINTS': 100,  # Scene blocks with fewer points are discarded
    'KNN_CHUNK_ROWS': 1024,  # Row chunk for the brute-force distance matrix
}


# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'pointgr.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': os.environ.get('PGR_LOG_LEVEL', 'WARNING'),
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console', 'file'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'pointgr': {
            'handlers': ['file', 'console'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}

# Django REST Framework: only serializers and the JSON renderer are used
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
}
