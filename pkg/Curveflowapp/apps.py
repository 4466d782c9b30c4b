from django.apps import AppConfig

class CurveflowappConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'Curveflowapp'
    verbose_name = 'Curve flow engine'
