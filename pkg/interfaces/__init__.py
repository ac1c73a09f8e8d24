import re
from abc import ABC, abstractmethod
from importlib import import_module
from typing import Type, TypeVar


class Interface(ABC):
    """Metaclass for interfaces.

    Parameters
    ----------
    ABC : _abc.ABCMeta
        Abstract base class.
    """

    @abstractmethod
    def __init__(self, module_settings: dict):
        """Initialize the interface.

        Parameters
        ----------
        module_settings : dict
            Module settings.
        """
        pass


T = TypeVar("T", bound="Interface")


class InterfaceFactory:
    def __init__(self, settings: dict):
        self.settings = settings["interfaces"]

    @staticmethod
    def interface_name(interface_class: type) -> str:
        """Settings key of an interface class, e.g. LinearSolver -> linear_solver."""
        return re.sub(r"(?<!^)(?=[A-Z])", "_", interface_class.__name__).lower()

    def get_interface(self, interface_class: Type[T]) -> T:
        interface_name = self.interface_name(interface_class)
        try:
            interface_settings = self.settings[interface_name]
            module_name = interface_settings["module"]
            module_settings = interface_settings[module_name]
            class_name = module_settings["class"]
        except KeyError as error:
            raise ValueError(
                f"Missing setting {error} for interface: {interface_name}"
            ) from error
        module = import_module(f"interfaces.{interface_name}.{module_name}")
        implementation = getattr(module, class_name)
        if not issubclass(implementation, interface_class):
            raise TypeError(
                f"Invalid {interface_name} implementation: {class_name}"
            )
        return implementation(module_settings)
