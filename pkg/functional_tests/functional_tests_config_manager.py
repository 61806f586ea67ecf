import sys
import os

# Adiciona a pasta pai ao sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))


from src.config_manager import ConfigManager

config_manager = ConfigManager()

# Get and print sampling settings and tolerances from the configuration
conf = config_manager.get("conf")
print(f"Samples per check: {conf['sampling']['count']} (scrambled: {conf['sampling']['scramble']})")
print(f"Default tolerance: {conf['tolerances']['default']}")
print(f"Newton iterations: {config_manager.setting('newton', 'max_iterations')}")

# Built-in suites
for name in config_manager.suite_names():
    suite = config_manager.get_suite(name)
    print(f"Suite {name}: {len(suite.get('check') or [])} checks, includes {suite.get('include', [])}")
