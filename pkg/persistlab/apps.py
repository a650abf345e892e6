from django.apps import AppConfig


class PersistlabConfig(AppConfig):
    name = "persistlab"
    verbose_name = "Persistence pipeline"
