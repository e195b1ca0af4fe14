import logging
import logging.config
import uuid

version_info = (1, 0, 0)
__version__ = '.'.join(str(v) for v in version_info)


def serve(model, settings=None, log_config=None):
    """
    Serve predictions from a trained model over HTTP.

    :param sprockets.dfr.pipeline.Model model: the trained model bundle
    :param dict|None settings: optional configuration dictionary
        that will be passed through to
        :class:`sprockets.dfr.service.Application` as kwargs.
    :param dict|None log_config: optional logging configuration
        dictionary to use.  By default, a reasonable logging
        configuration is generated based on settings.  It is passed
        as-is to :func:`logging.config.dictConfig`.

    .. rubric:: settings['debug']

    Enables Tornado debug mode and the verbose logging format.

    .. rubric:: settings['port']

    The port number to listen on.  The default port is 8000.

    """
    from . import runner, service

    app_settings = {} if settings is None else settings.copy()
    debug_mode = bool(app_settings.get('debug', False))
    app_settings['debug'] = debug_mode
    if log_config is None:
        log_config = get_logging_config(debug_mode)
    logging.config.dictConfig(log_config)

    port_number = int(app_settings.pop('port', 8000))
    app = service.Application(model, **app_settings)
    runner.Runner(app).run(port_number)


class _RunIdFilter(logging.Filter):
    """Log filter that ensures that run-id is set on each record"""

    def __init__(self, run_id=None):
        super().__init__()
        self.run_id = run_id or uuid.uuid4().hex[:12]

    def filter(self, record):
        if not hasattr(record, 'run-id'):
            setattr(record, 'run-id', self.run_id)
        return 1


def get_logging_config(debug=False, run_id=None):
    """
    Build the logging configuration used by the command line tools.

    :param bool debug: use the verbose human-readable format at the
        ``DEBUG`` level instead of the structured ``INFO`` format
    :param str|None run_id: identifier attached to every structured
        record; a random one is generated when omitted
    :rtype: dict

    Records are always written to :data:`sys.stderr` since the
    standard output stream carries the JSON results.

    """
    if debug:
        return {
            'version': 1,
            'disable_existing_loggers': False,
            'incremental': False,
            'formatters': {
                'debug': {
                    'format': ('[%(asctime)s] %(levelname)-8s %(name)s: '
                               '%(message)s')
                },
            },
            'handlers': {
                'debug-console': {
                    'class': 'logging.StreamHandler',
                    'stream': 'ext://sys.stderr',
                    'level': 'DEBUG',
                    'formatter': 'debug',
                },
            },
            'root': {
                'level': 'DEBUG',
                'handlers': ['debug-console'],
            }
        }
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'incremental': False,
        'formatters': {
            'info': {
                'format': ('%(levelname)1.1s'
                           '[dfr@{}'
                           ' run_id="%(run-id)s"'
                           ' logger="%(name)s"'
                           ' process="%(process)s"'
                           ' line="%(lineno)d"'
                           ' function="%(funcName)s"'
                           ' module="%(module)s"'
                           '] %(message)s'.format(__version__))
            }
        },
        'filters': {
            'run-id': {
                '()': _RunIdFilter,
                'run_id': run_id,
            }
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'stream': 'ext://sys.stderr',
                'level': 'INFO',
                'formatter': 'info',
                'filters': ['run-id']
            }
        },
        'root': {
            'level': 'INFO',
            'handlers': ['console'],
        }
    }
