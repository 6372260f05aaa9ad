import logging
import os
from logging.handlers import RotatingFileHandler


class Logger:
    """
    Simulator logger for progress, warnings and debug information.
    Implements a singleton pattern so every module shares one 'kiloswarm' logger.
    The console handler is attached at creation; the rotating file handler
    only once an output directory is known (see `configure`).
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Logger, cls).__new__(cls)
            cls._instance._initialize_logger()
        return cls._instance

    def _initialize_logger(self):
        """Initialize the logger with a console handler"""
        self.logger = logging.getLogger('kiloswarm')
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        self.file_handler = None

        self.console_handler = logging.StreamHandler()
        self.console_handler.setLevel(logging.INFO)
        self.console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        self.logger.addHandler(self.console_handler)

    def configure(self, log_dir=None, level='INFO'):
        """Set the console level and (re)attach the file handler under log_dir"""
        numeric = logging.getLevelName(str(level).upper())
        if not isinstance(numeric, int):
            raise ValueError(f"unknown log level '{level}'")
        self.console_handler.setLevel(numeric)

        if log_dir is None:
            return
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()
        os.makedirs(log_dir, exist_ok=True)
        self.file_handler = RotatingFileHandler(
            os.path.join(log_dir, 'kiloswarm.log'),
            maxBytes=5*1024*1024,  # 5MB max file size
            backupCount=5,
            encoding='utf-8',
        )
        self.file_handler.setLevel(logging.DEBUG)
        self.file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
        ))
        self.logger.addHandler(self.file_handler)

    def close(self):
        """Detach and close the file handler"""
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()
            self.file_handler = None

    def debug(self, message):
        """Log debug message"""
        self.logger.debug(message)

    def info(self, message):
        """Log info message"""
        self.logger.info(message)

    def warning(self, message):
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message, exc_info=None):
        """Log error message with optional exception info"""
        self.logger.error(message, exc_info=exc_info)

    def critical(self, message, exc_info=None):
        """Log critical message with optional exception info"""
        self.logger.critical(message, exc_info=exc_info)


# Create a singleton instance
logger = Logger()


# Convenience function to get the logger
def get_logger():
    return logger
