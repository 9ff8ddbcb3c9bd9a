from django.apps import AppConfig


class PqConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'pq'
    verbose_name = 'PQ-channels'
