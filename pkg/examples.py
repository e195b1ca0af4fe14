import json
import logging.config
import sys

import sprockets.dfr
from sprockets.dfr import dataset, pipeline

SYNTHETIC_CONFIG = {
    'theta': 0.25,
    'beta': 0.01,
    'lambda': 1.0,
    'm': 3,
    'gamma': 0.1,
    'eta': 1.0,
}


def run_example(representation='DPRR', seed=7, jobs=1):
    """
    Train and evaluate a small reservoir on synthetic sinusoids.

    :param str representation: representation kind to use
    :param int seed: seed of the synthetic dataset
    :param int jobs: worker processes
    :returns: the test split report
    :rtype: sprockets.dfr.pipeline.EvalReport

    """
    data = dataset.synth(n_classes=2, n_vars=2, n_train=60, n_test=60,
                         t_range=(20, 40), seed=seed)
    config = pipeline.ExperimentConfig.from_dict(
        SYNTHETIC_CONFIG, representation=representation, jobs=jobs)
    model = pipeline.fit(data, config)
    return pipeline.evaluate(model, data.test, jobs)


if __name__ == '__main__':
    logging.config.dictConfig(sprockets.dfr.get_logging_config(debug=True))
    for kind in ('LRS', 'DPRR'):
        report = run_example(kind)
        json.dump({'representation': kind, 'accuracy': report.accuracy},
                  sys.stdout)
        sys.stdout.write('\n')
