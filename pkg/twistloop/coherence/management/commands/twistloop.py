import argparse

from django.core.management.base import BaseCommand

from ...cli import run


class Command(BaseCommand):
    help = "twistloop 하위 명령 실행 (예: manage.py twistloop coherence --datum A(1)_1 --mu 1,0)"

    def add_arguments(self, parser):
        parser.add_argument("argv", nargs=argparse.REMAINDER)

    def handle(self, *args, **options):
        outcome = run(options["argv"])
        if outcome.error:
            self.stderr.write(outcome.text, ending="")
        else:
            self.stdout.write(outcome.text, ending="")
        if outcome.status:
            raise SystemExit(outcome.status)
