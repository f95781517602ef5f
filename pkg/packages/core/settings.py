"""
Configuración de maxker leída de variables de entorno.

- MAXKER_BUDGET: máximo de tuplas/palabras que un barrido exhaustivo puede visitar
- MAXKER_ORDER_CAP: tope de iteraciones para el orden multiplicativo de B
- MAXKER_EXTENSION_CAP: orden máximo de una extensión usada para contar raíces
- MAXKER_DB_URL: destino de persistencia
"""

from __future__ import annotations

import os
from typing import Mapping, Optional

from pydantic import BaseModel, Field, ValidationError

from errors import PreconditionError


DEFAULT_BUDGET = 2**20
DEFAULT_ORDER_CAP = 10**6
DEFAULT_EXTENSION_CAP = 2**40
DEFAULT_DB_URL = "sqlite:///maxker.db"


class Settings(BaseModel):
    budget: int = Field(default=DEFAULT_BUDGET, ge=1)
    order_cap: int = Field(default=DEFAULT_ORDER_CAP, ge=1)
    extension_cap: int = Field(default=DEFAULT_EXTENSION_CAP, ge=2)
    db_url: str = DEFAULT_DB_URL


_ENV_KEYS = {
    "budget": "MAXKER_BUDGET",
    "order_cap": "MAXKER_ORDER_CAP",
    "extension_cap": "MAXKER_EXTENSION_CAP",
    "db_url": "MAXKER_DB_URL",
}


def load_settings(environ: Optional[Mapping[str, str]] = None, **overrides: object) -> Settings:
    env = os.environ if environ is None else environ
    values: dict[str, object] = {}
    for attr, key in _ENV_KEYS.items():
        raw = env.get(key)
        if raw is not None and raw.strip():
            values[attr] = raw.strip()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as exc:
        raise PreconditionError(f"configuración inválida: {exc.errors()[0]['msg']}") from exc


__all__ = [
    "Settings",
    "load_settings",
    "DEFAULT_BUDGET",
    "DEFAULT_ORDER_CAP",
    "DEFAULT_EXTENSION_CAP",
    "DEFAULT_DB_URL",
]
