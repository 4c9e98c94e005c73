from mdivw.cli.configuration_manager import ConfigurationManager, RunConfig

__all__ = ["ConfigurationManager", "RunConfig"]
