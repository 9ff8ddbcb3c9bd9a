from django.apps import AppConfig


class QChannelsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'qchannels'
    verbose_name = 'Kraus-form channels'
