"""Hierarquia de exceções do HeavenMorph.

Todas as falhas previstas derivam de `HeavenMorphError`, o que permite ao controller
separar erros de configuração (abortam a suíte) de falhas por amostra (ficam no relatório).
"""

from typing import Iterable, Optional


class HeavenMorphError(Exception):
    """Base de todas as exceções do pacote."""


class EvaluationError(HeavenMorphError):
    """Falha ao avaliar uma expressão, jet ou função de carta."""


class DomainError(EvaluationError, ValueError):
    """Ponto fora do domínio de uma operação (ramo de log/sqrt, divisão por ~0, guarda)."""


class SingularMetric(DomainError):
    """Métrica degenerada (determinante ~0) no ponto avaliado."""


class IntervalViolation(DomainError):
    """Ponto onde t²S − 6 = 0 na construção de Calderbank."""


class OutOfDomain(DomainError):
    """Solução ou ponto fora da caixa/guarda declarada."""


class IncidenceAtInfinity(DomainError):
    """|z1 + z2 j| abaixo de ε: o ponto de incidência está no infinito."""


class NearZeroQuaternion(DomainError):
    """Tentativa de inverter um quatérnio de norma ≤ ε."""


class UnboundVariable(EvaluationError):
    """Variável da expressão sem valor no ambiente."""

    def __init__(self, name: str) -> None:
        super().__init__(f"Variable '{name}' is not bound")
        self.name = name


class ExpressionSyntaxError(HeavenMorphError, SyntaxError):
    """Erro de sintaxe com offset em bytes e conjunto de tokens esperados."""

    def __init__(self, message: str, offset: int, expected: Optional[Iterable[str]] = None) -> None:
        self.expected = tuple(sorted(expected or ()))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")
        self.msg = message
        self.offset = offset


class DimensionError(HeavenMorphError):
    """Jets ou arrays com dimensões de base incompatíveis."""


class DegenerateSpan(HeavenMorphError):
    """Campos que deveriam gerar uma distribuição são linearmente dependentes."""


class NotSubmersive(HeavenMorphError):
    """A diferencial da aplicação não é sobrejetiva no ponto."""


class NotHorizontallyConformal(HeavenMorphError):
    """O resíduo de conformidade horizontal excede a tolerância."""


class NotAlmostComplex(HeavenMorphError):
    """J² ≠ −Id no ponto."""


class SingularJacobian(HeavenMorphError):
    """Jacobiano numericamente singular durante Newton."""


class NoConvergence(HeavenMorphError):
    """Newton não convergiu no número máximo de iterações."""


class ContactViolation(HeavenMorphError):
    """A superfície não satisfaz a condição de contato."""


class ConfigError(HeavenMorphError):
    """Documento de configuração inválido (chave desconhecida, campo ausente, tipo errado)."""


class ReportWriteError(HeavenMorphError):
    """Falha de E/S ao gravar o relatório."""


# Falhas de uma amostra isolada: ficam registradas no relatório sem abortar a verificação.
# np.linalg.LinAlgError deriva de ValueError.
SAMPLE_ERRORS = (HeavenMorphError, ArithmeticError, ValueError)
