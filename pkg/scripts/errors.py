"""Excecoes do pacote. Cada classe carrega o codigo de saida usado pelo CLI."""


class RibaucourError(Exception):
    exit_code = 3


class ConfigError(RibaucourError):
    exit_code = 2


class ExprSyntaxError(ConfigError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class NumericalError(RibaucourError):
    exit_code = 3


class PoleSignal(NumericalError):
    def __init__(self, location, message="pole encountered"):
        super().__init__(f"{message} near z = {location}")
        self.location = location


class QuadratureError(NumericalError):
    pass


class PathError(NumericalError):
    pass


class OrderError(NumericalError):
    pass


class RiccatiError(NumericalError):
    pass


class DegenerateError(NumericalError):
    pass


class MeshError(NumericalError):
    pass
