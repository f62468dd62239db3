from backend.apps.cli.base import TracCommand
from backend.apps.ltl.formula import propositions, size, to_tree
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import simplify
from backend.apps.ltl.rendering import STYLES, render


class Command(TracCommand):
    help = "Parse a formula and print its simplified canonical form and syntax tree."

    def add_arguments(self, parser):
        parser.add_argument("formula", help='Formula in ascii syntax, e.g. "G(a -> F b)"')
        parser.add_argument("--style", choices=STYLES, default="ascii", help="Rendering of the summary line")

    def run(self, **options):
        phi = simplify(parse(options["formula"]))
        self.emit({
            "formula": render(phi),
            "ast": to_tree(phi),
            "size": size(phi),
            "propositions": sorted(propositions(phi)),
        })
        self.summary(render(phi, options["style"]))
