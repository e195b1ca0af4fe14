"""
HTTP inference service for a trained model.

- :class:`ModelHandler`: JSON responses and error reporting for a model
- :class:`StatusHandler`: ``GET /status`` describes the model
- :class:`PredictionHandler`: ``POST /predict`` classifies one series
- :class:`Application`: routes, settings, and the access log

"""
import json
import logging
import sys
import traceback

import numpy as np
from tornado import log, web

import sprockets.dfr
from sprockets.dfr import errors, readout


class ModelHandler(web.RequestHandler):
    """
    Base handler with access to the served model.

    Errors are written as ``{"type", "message", "traceback"}``
    documents.  ``type`` is the exception class name or ``null``,
    ``traceback`` is only filled in when the ``serve_traceback``
    setting is enabled.  Client errors are logged as warnings and
    server errors as errors, tagged with the model's representation.

    """

    def initialize(self, model):
        self.model = model
        self.logger = logging.getLogger(self.__class__.__name__)

    @property
    def representation(self):
        return self.model.readout.rep_kind.tag.value

    def set_default_headers(self):
        self.set_header('Server', self.settings['server_header'])

    def reject(self, message):
        """Fail the request with a 400 for the active exception."""
        self.send_error(400, exc_info=sys.exc_info(), log_message=message)

    def write_error(self, status_code, **kwargs):
        exc_type, exc_value, exc_tb = kwargs.get('exc_info',
                                                 (None, None, None))
        log_function = (self.logger.warning if status_code < 500
                        else self.logger.error)
        log_function('%s %s on the %s model failed with %s: %s',
                     self.request.method, self.request.uri,
                     self.representation, status_code,
                     kwargs.get('log_message', self._reason))
        body = {'type': None, 'message': self._reason, 'traceback': None}
        if exc_value is not None:
            body['type'] = exc_type.__name__
            body['message'] = str(exc_value)
            if self.settings.get('serve_traceback', False):
                body['traceback'] = traceback.format_exception(
                    exc_type, exc_value, exc_tb)
        self.write_json(body)

    def write_json(self, document):
        self.set_header('Content-Type', 'application/json; charset=utf-8')
        self.finish(json.dumps(document).encode('utf-8'))


class StatusHandler(ModelHandler):

    def get(self):
        model = self.model
        self.write_json({
            'service': 'sprockets.dfr',
            'version': sprockets.dfr.__version__,
            'representation': model.readout.rep_kind.to_dict(),
            'classes': list(model.classes),
            'n_vars': model.n_vars,
            'n_nodes': model.params.n_nodes,
            't_max': model.t_max,
            'config': model.config.to_dict(),
        })


class PredictionHandler(ModelHandler):
    """
    Classify the series in the request body.

    The body is ``{"series": [[channel 0...], [channel 1...]]}``.  The
    response holds the label and the class scores; DRS models report
    the per-step vote counts instead of scores.

    """

    label = None

    def post(self):
        try:
            document = json.loads(self.request.body.decode('utf-8'))
            series = np.asarray(document['series'], dtype=np.float64)
        except (ValueError, KeyError, TypeError):
            self.reject('invalid request body')
            return
        try:
            rep = self.model.represent(series)
            if rep.is_sequence:
                counts = readout.vote(self.model.readout, rep)
                result = {'votes': dict(zip(self.model.classes,
                                            (int(c) for c in counts)))}
            else:
                scores = readout.scores(self.model.readout, rep)
                result = {'scores': dict(zip(self.model.classes,
                                             (float(s) for s in scores)))}
            self.label = readout.predict(self.model.readout, rep)
        except errors.DFRError as error:
            self.reject(str(error))
            return
        self.logger.debug('predicted %s for %d steps', self.label,
                          series.shape[-1])
        result['label'] = self.label
        self.write_json(result)


class Application(web.Application):
    """
    Tornado application serving one model.

    :param sprockets.dfr.pipeline.Model model: the model to serve
    :param settings: passed to :class:`tornado.web.Application`

    The ``Server`` header defaults to ``sprockets.dfr/<version>``.

    """

    def __init__(self, model, **settings):
        self.model = model
        settings.setdefault('server_header', 'sprockets.dfr/{}'.format(
            sprockets.dfr.__version__))
        handlers = [
            web.url(r'/status', StatusHandler, {'model': model}),
            web.url(r'/predict', PredictionHandler, {'model': model}),
        ]
        super().__init__(handlers, **settings)

    def log_request(self, handler):
        """
        Log each request with its status and, for predictions, the label.

        :param tornado.web.RequestHandler handler:

        """
        status = handler.get_status()
        if status < 400:
            log_level = logging.INFO
        elif status < 500:
            log_level = logging.WARNING
        else:
            log_level = logging.ERROR
        log.access_log.log(
            log_level, '%s %s %d label=%s (%.1f ms)',
            handler.request.method, handler.request.uri, status,
            getattr(handler, 'label', None) or '-',
            1000.0 * handler.request.request_time())
