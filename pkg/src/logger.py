import threading
from typing import Any, Optional
from src.config_manager import ConfigManager
from colorama import Fore


class Logger:
    """Saída de console com níveis, tags de três letras e cores.

    O nível inicial vem da chave "debug_level" de conf.yaml (ou do argumento ``level``); nomes
    desconhecidos caem em INFO. As verificações rodam em threads, então cada mensagem é escrita
    sob um lock compartilhado por todas as instâncias.

    Attributes:
        level (int): Nível mínimo exibido.
        show_tag (bool): Exibe ou não as tags nas mensagens.
    """

    LEVELS = {"VERBOSE": 0, "DEBUG": 1, "INFO": 2, "LOG": 3, "WARNING": 4, "ERROR": 5, "EXCEPTION": 6, "FATAL": 7, "OFF": 8}
    TAGS = ("VRB", "DBG", "INF", "LOG", "WRN", "ERR", "EXC", "FTL", "OFF")
    COLORS = (Fore.CYAN, Fore.WHITE, Fore.GREEN, Fore.MAGENTA, Fore.YELLOW, Fore.RED, Fore.RED, Fore.RED, Fore.BLACK)

    _lock = threading.Lock()

    def __init__(self, config_manager: Optional[ConfigManager] = None, level: Optional[str] = None) -> None:
        """Define o nível inicial.

        Args:
            config_manager (Optional[ConfigManager]): Fonte de "debug_level"; criado se omitido e
            ``level`` também faltar.
            level (Optional[str]): Nível explícito; tem prioridade sobre conf.yaml.
        """
        if level is None:
            config_manager = config_manager or ConfigManager()
            level = (config_manager.get("conf") or {}).get("debug_level", "INFO")
        self.level = self._code(level)
        self.show_tag = True

    @classmethod
    def _code(cls, level: Any, default: int = 2) -> int:
        return cls.LEVELS.get(str(level).upper(), default)

    def set_level(self, level: str) -> None:
        """Muda o nível mínimo exibido.

        Args:
            level (str): Novo nível ("VERBOSE", "DEBUG", "INFO", "LOG", "WARNING", "ERROR",
            "EXCEPTION", "FATAL", "OFF"). Nomes desconhecidos mantêm o nível atual.
        """
        self.level = self._code(level, self.level)

    def enable_tags(self) -> None:
        """Passa a prefixar as mensagens com a tag do nível."""
        self.show_tag = True

    def disable_tags(self) -> None:
        """Omite as tags; a cor do nível continua."""
        self.show_tag = False

    def is_enabled(self, level: str) -> bool:
        """Indica se mensagens de ``level`` seriam exibidas."""
        return self._code(level) >= self.level

    def print(self, message: str, level: str = "INFO", show_tag: Optional[bool] = None) -> None:
        """Escreve ``message`` sem nova linha se ``level`` estiver habilitado.

        Args:
            message (str): Texto da mensagem.
            level (str): Nível da mensagem.
            show_tag (Optional[bool]): Sobrepõe ``show_tag`` apenas para esta mensagem.
        """
        code = self._code(level)
        if code < self.level:
            return
        tagged = self.show_tag if show_tag is None else show_tag
        text = f"{self.COLORS[code]}[{self.TAGS[code]}] {message}" if tagged else f"{self.COLORS[code]}{message}"
        with self._lock:
            print(text, end=f"{Fore.RESET}")

    def println(self, message: str, level: str = "INFO", show_tag: Optional[bool] = None) -> None:
        """Como ``print``, terminando a mensagem com nova linha.

        Args:
            message (str): Texto da mensagem.
            level (str): Nível da mensagem.
            show_tag (Optional[bool]): Sobrepõe ``show_tag`` apenas para esta mensagem.
        """
        self.print(message + "\n", level, show_tag)

    def print_separator(self, level: str = "INFO", show_tag: Optional[bool] = None, sep_type: str = "-=", size: int = 40) -> None:
        """Linha separadora, p.ex. entre suítes.

        Args:
            level (str): Nível da linha.
            show_tag (Optional[bool]): Sobrepõe ``show_tag`` apenas para esta linha.
            sep_type (str): Padrão repetido ("-=", "=", "-", ".").
            size (int): Quantas vezes o padrão se repete.
        """
        self.println(sep_type * size, level, show_tag)

    def check_result(self, check: Any) -> None:
        """Uma linha por verificação: PASS em INFO, FAIL em WARNING.

        Args:
            check (Check): Resultado com name, passed, max_residual, tolerance, sample_count e errors.
        """
        status = "PASS" if check.passed else "FAIL"
        self.println(f"{status} {check.name}: max_residual {check.max_residual:.3e} "
                     f"(tol {check.tolerance:.1e}, {check.sample_count} samples, {len(check.errors)} errors)",
                     "INFO" if check.passed else "WARNING")

    def failure(self, context: str, error: BaseException, level: str = "ERROR") -> None:
        """Registra uma exceção com o nome da classe, que é o mesmo ``kind`` gravado no relatório.

        Args:
            context (str): O que estava sendo feito, p.ex. "Building hspace 'h'".
            error (BaseException): Exceção capturada.
            level (str): Nível da mensagem; falhas por amostra usam DEBUG.
        """
        self.println(f"{context}: {type(error).__name__}: {error}", level)
