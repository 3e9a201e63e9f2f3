class MotivicaError(Exception):
    pass


class MotivicaParserError(MotivicaError):
    pass


class MotivicaAtlasError(MotivicaError):
    pass


class MotivicaValidationError(MotivicaError):
    pass


class MotivicaMorphismError(MotivicaValidationError):
    pass


class MotivicaComplexError(MotivicaValidationError):
    pass


class MotivicaExpressionError(MotivicaValidationError):
    pass


class MotivicaPresentationError(MotivicaValidationError):
    pass


class MotivicaBlowupError(MotivicaValidationError):
    pass


class MotivicaVerificationError(MotivicaValidationError):
    pass
