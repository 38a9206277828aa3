"""
exceptions.py - Hierarquia de exceções do tablescout

Cada exceção expõe o atributo de classe ``code`` com o nome da condição de erro
usado nas mensagens da linha de comando e no manifesto de lote.
"""


class TableScoutException(Exception):
    """Exceção base para erros do tablescout."""

    code = "TableScoutError"

    def __str__(self):
        message = super().__str__()
        return f"{self.code}: {message}" if message else self.code


class RasterException(TableScoutException):
    """Exceção base para erros de leitura, escrita e recorte de imagens."""

    code = "RasterError"


class ImageNotFoundException(RasterException, FileNotFoundError):
    """Exceção para arquivo de imagem inexistente."""

    code = "FileNotFound"


class UnsupportedFormatException(RasterException):
    """Exceção para formato de imagem não suportado."""

    code = "UnsupportedFormat"


class CorruptImageException(RasterException):
    """Exceção para imagem corrompida (dimensões ou contagem de pixels inválidas)."""

    code = "CorruptImage"


class OutOfBoundsException(RasterException):
    """Exceção para retângulo fora dos limites da imagem."""

    code = "OutOfBounds"


class EmptyBandException(TableScoutException):
    """Exceção para faixa de linha sem nenhum pixel de tinta."""

    code = "EmptyBand"


class NoTextLineException(TableScoutException):
    """Exceção para página sem nenhuma linha com lacunas."""

    code = "NoTextLine"


class AlphaOutOfRangeException(TableScoutException):
    """Exceção para coeficientes alpha fora dos intervalos abertos permitidos."""

    code = "AlphaOutOfRange"


class SpecOverflowException(TableScoutException):
    """Exceção para especificação de página sintética que não cabe na página."""

    code = "SpecOverflow"


class EmptyCorpusException(TableScoutException):
    """Exceção para avaliação sem nenhuma página."""

    code = "EmptyCorpus"


class MissingTruthException(TableScoutException):
    """Exceção para relatório sem arquivo de verdade correspondente."""

    code = "MissingTruth"


class ConfigException(TableScoutException):
    """Exceção para arquivo ou valor de configuração inválido."""

    code = "InvalidConfig"


class MissingReportException(TableScoutException):
    """Exceção para arquivo de verdade sem relatório correspondente."""

    code = "MissingReport"


class MalformedReportException(TableScoutException):
    """Exceção para relatório ou verdade em JSON inválido ou incompleto."""

    code = "MalformedReport"
