"""
Formulário de validação da configuração de execução do otimizador.
Chaves desconhecidas são ignoradas; chaves ausentes recebem o default.
"""

from django import forms
from django.conf import settings

from persistlab.constants import (
    EXPERIMENT_DEGREE,
    EXPERIMENT_MIN_POINTS,
    NOISE_SIGMA,
    SCHEDULE_GAMMA_MAX,
    SCHEDULE_GAMMA_MIN,
)

RUN_DEFAULTS = {
    "seed": 0,
    "steps": 100,
    "alpha0": None,
    "gamma": None,
    "sigma": NOISE_SIGMA,
    "lambda": 1.0,
    "r": 30,
    "degree": EXPERIMENT_DEGREE,
    "bound": None,
}


class RunConfigForm(forms.Form):
    """Valida o JSON de configuração do comando optimize."""

    seed = forms.IntegerField(required=False, min_value=0)
    steps = forms.IntegerField(required=False, min_value=0)
    alpha0 = forms.FloatField(required=False)
    gamma = forms.FloatField(required=False)
    sigma = forms.FloatField(required=False, min_value=0.0)
    r = forms.IntegerField(required=False, min_value=EXPERIMENT_MIN_POINTS)
    degree = forms.IntegerField(required=False, min_value=0)
    bound = forms.FloatField(required=False)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # "lambda" é palavra reservada e não pode ser atributo de classe
        self.fields["lambda"] = forms.FloatField(required=False, min_value=0.0)

    def clean_alpha0(self):
        alpha0 = self.cleaned_data.get("alpha0")
        if alpha0 is not None and alpha0 <= 0:
            raise forms.ValidationError("alpha0 deve ser positivo.")
        return alpha0

    def clean_gamma(self):
        gamma = self.cleaned_data.get("gamma")
        if gamma is not None and not SCHEDULE_GAMMA_MIN < gamma <= SCHEDULE_GAMMA_MAX:
            raise forms.ValidationError(
                f"gamma deve estar em ({SCHEDULE_GAMMA_MIN}, {SCHEDULE_GAMMA_MAX}]."
            )
        return gamma

    def clean_bound(self):
        bound = self.cleaned_data.get("bound")
        if bound is not None and bound <= 0:
            raise forms.ValidationError("bound deve ser positivo.")
        return bound

    def clean(self):
        cleaned = super().clean()
        for key, default in RUN_DEFAULTS.items():
            if cleaned.get(key) is None:
                cleaned[key] = default
        seed = getattr(settings, "PERSISTLAB_SEED", None)
        if seed is not None:
            cleaned["seed"] = int(seed)
        return cleaned
