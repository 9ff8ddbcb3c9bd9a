from django.apps import AppConfig


class OqrwConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'oqrw'
    verbose_name = 'Open quantum random walks'
