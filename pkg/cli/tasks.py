from django_rq import job
from django.core.management import call_command
import logging

logger = logging.getLogger('cli')


@job
def run_repro_suite(suite='all', out=None):
    """
    Wrapper task to run the repro management command on a worker.
    """
    logger.info(f"Starting queued task: repro {suite}")
    try:
        options = {'format': 'json'}
        if out:
            options['out'] = out
        call_command('repro', suite, **options)
        logger.info(f"Successfully completed queued task: repro {suite}")
    except SystemExit as e:
        logger.error(f"repro {suite} exited with status {e.code}")
    except Exception as e:
        logger.error(f"Failed to run repro {suite}: {str(e)}")
