from abc import ABC, abstractmethod
from typing import Any


class AbstractHandler(ABC):
    @abstractmethod
    def do_process(self, *args: Any, **kwargs: Any) -> Any:
        pass
