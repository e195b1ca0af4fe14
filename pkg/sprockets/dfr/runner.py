"""
Run the inference service until it is signalled to stop.

- :class:`.Runner`: binds the HTTP server and handles shutdown signals

"""
import logging
import signal

from tornado import httpserver, ioloop


class Runner:
    """
    HTTP service runner.

    :param tornado.web.Application app: the application to serve

    ``SIGTERM`` and ``SIGINT`` stop the HTTP server and then the IOLoop
    after at most :attr:`shutdown_limit` seconds.

    .. rubric:: Usage Example

    .. code-block:: python

       server = runner.Runner(service.Application(model))
       server.run(8000)

    """

    def __init__(self, app):
        self.application = app
        self.logger = logging.getLogger('Runner')
        self.server = None
        self.shutdown_limit = 5.0

    def start_server(self, port_number):
        """
        Create a HTTP server and start listening.

        The ``xheaders`` and ``max_body_size`` application settings are
        passed to :class:`tornado.httpserver.HTTPServer`.

        """
        signal.signal(signal.SIGTERM, self._on_signal)
        signal.signal(signal.SIGINT, self._on_signal)
        self.server = httpserver.HTTPServer(
            self.application,
            xheaders=self.application.settings.get('xheaders', True),
            max_body_size=self.application.settings.get('max_body_size'))
        self.logger.info('serving predictions on port %d', port_number)
        self.server.listen(port_number)

    def stop_server(self):
        """Stop the HTTP Server"""
        self.server.stop()

    def run(self, port_number):
        """Create the server and run the IOLoop until shutdown."""
        self.start_server(port_number)
        ioloop.IOLoop.current().start()

    def _on_signal(self, signo, frame):
        ioloop.IOLoop.current().add_callback_from_signal(self._shutdown)

    def _shutdown(self):
        self.logger.info('shutting down')
        self.stop_server()
        io_loop = ioloop.IOLoop.current()
        io_loop.add_timeout(io_loop.time() + self.shutdown_limit,
                            io_loop.stop)
        io_loop.add_callback(self._stop_when_idle)

    async def _stop_when_idle(self):
        await self.server.close_all_connections()
        ioloop.IOLoop.current().stop()
        self.logger.info('stopped IOLoop')
