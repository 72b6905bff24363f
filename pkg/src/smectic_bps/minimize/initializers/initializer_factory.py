"""Initializer factory for selecting a starting field by tag."""

from typing import Dict, Optional, Type

from ...errors import ConfigError
from .ansatz_initializer import AnsatzInitializer
from .base_initializer import BaseInitializer
from .linear_initializer import LinearInitializer
from .random_initializer import RandomInitializer


class InitializerFactory:
    """Factory class for creating cell-problem initializers."""

    def __init__(self):
        self._initializers: Dict[str, Type[BaseInitializer]] = {
            "ansatz": AnsatzInitializer,
            "linear": LinearInitializer,
            "random": RandomInitializer,
        }

    def get_available_initializers(self) -> Dict[str, Dict]:
        """Name and description of every registered initializer."""
        listing = {}
        for tag in self._initializers:
            listing[tag] = self.create_initializer(tag, seed=0).describe()
        return listing

    def create_initializer(self, tag: str, seed: Optional[int] = None) -> BaseInitializer:
        """Create an initializer instance; 'random' needs a seed."""
        key = tag.lower()
        if key not in self._initializers:
            raise ConfigError(f"Unknown initializer '{tag}'. Available initializers: {list(self._initializers)}")
        if key == "random":
            if seed is None:
                raise ConfigError("The random initializer needs an explicit seed")
            return RandomInitializer(seed)
        return self._initializers[key]()
