import os
import yaml
from typing import Any, Dict, List

from src.errors import ConfigError

DEFAULT_CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")
SUITES_DIR = "suites"


class ConfigManager:
    """Configuração do HeavenMorph lida de arquivos YAML.

    Cada ``<nome>.yaml`` do diretório vira uma entrada de ``configs`` (conf, library). As suítes
    de verificação ficam em ``<config_dir>/suites`` e só são lidas sob demanda.

    Attributes:
        config_dir (str): Diretório de configuração; por padrão o ``config/`` do repositório,
        independente do diretório de trabalho.
        configs (Dict[str, Any]): Conteúdo de cada arquivo, indexado pelo nome sem extensão.
    """

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR) -> None:
        self.config_dir = config_dir
        self.configs: Dict[str, Any] = {}
        self.load_configs()

    def load_configs(self) -> None:
        """Lê todos os YAML do diretório.

        Raises:
            FileNotFoundError: Se o diretório não existir.
            ConfigError: Se algum arquivo não for YAML válido.
        """
        if not os.path.exists(self.config_dir):
            raise FileNotFoundError(f"Diretório '{self.config_dir}' não encontrado.")

        for file_name in sorted(os.listdir(self.config_dir)):
            stem, ext = os.path.splitext(file_name)
            if ext in (".yaml", ".yml"):
                self.configs[stem] = self._read(os.path.join(self.config_dir, file_name))

    @staticmethod
    def _read(path: str) -> Any:
        with open(path, "r", encoding="utf-8") as file:
            try:
                return yaml.safe_load(file)
            except yaml.YAMLError as e:
                raise ConfigError(f"YAML inválido em '{path}': {e}") from e

    def get(self, config_name: str) -> Dict[str, Any]:
        """Conteúdo de ``<config_name>.yaml``; KeyError se não houver."""
        config = self.configs.get(config_name)
        if config is None:
            raise KeyError(f"Configuração '{config_name}' não encontrada.")
        return config

    def setting(self, *path: str, default: Any = None) -> Any:
        """Valor aninhado de conf.yaml, p.ex. ``setting("newton", "max_iterations")``; ``default`` se faltar."""
        node: Any = self.configs.get("conf") or {}
        for key in path:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node

    def suite_names(self) -> List[str]:
        """Nomes das suítes embutidas, em ordem alfabética."""
        suites_dir = os.path.join(self.config_dir, SUITES_DIR)
        if not os.path.isdir(suites_dir):
            return []
        return sorted(os.path.splitext(f)[0] for f in os.listdir(suites_dir) if f.endswith((".yaml", ".yml")))

    def get_suite(self, suite_name: str) -> Dict[str, Any]:
        """Suíte embutida ``suites/<suite_name>.yaml``.

        Raises:
            KeyError: Se a suíte não existir; a mensagem lista as disponíveis.
        """
        path = os.path.join(self.config_dir, SUITES_DIR, f"{suite_name}.yaml")
        if not os.path.exists(path):
            raise KeyError(f"Suíte '{suite_name}' não encontrada. Disponíveis: {', '.join(self.suite_names())}")
        return self.load_document(path)

    @classmethod
    def load_document(cls, path: str) -> Dict[str, Any]:
        """Documento de suíte do usuário.

        Raises:
            FileNotFoundError: Se o arquivo não existir.
            ConfigError: Se o YAML for inválido ou o nível superior não for um mapeamento.
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"Arquivo de configuração '{path}' não encontrado.")
        document = cls._read(path)
        if not isinstance(document, dict):
            raise ConfigError(f"O documento '{path}' deve ser um mapeamento no nível superior.")
        return document

    def reload(self) -> None:
        """Descarta o que foi lido e relê o diretório."""
        self.configs.clear()
        self.load_configs()
