from backend.apps.cli.base import TracCommand, labeled_trace
from backend.apps.cli.factories import build_labeler, named_model
from backend.apps.cli.serializers import load_config
from backend.apps.monitoring.engine import MODES, Monitor
from backend.apps.predictive.estimator import estimate_risks
from backend.apps.predictive.patterns import pattern_names


class Command(TracCommand):
    help = "Estimate the risk of each configured constraint over the next steps of a trace."

    def add_arguments(self, parser):
        parser.add_argument("trace", help="JSONL trace file (the history so far)")
        parser.add_argument("config", help="Experiment config; the agent model produces continuations")
        parser.add_argument("--input", default="", help="Input of the next step")
        parser.add_argument("--k", type=int, help="Horizon; defaults to the config policy's")
        parser.add_argument("--m", type=int, help="Sample count; defaults to the config policy's")
        parser.add_argument("--pattern", choices=pattern_names(), help="Monitoring pattern; defaults to the config policy's")
        parser.add_argument("--seed", type=int, help="Defaults to the config's seed")
        parser.add_argument("--mode", choices=MODES, help="Monitor mode; defaults to the config's")

    def run(self, **options):
        config = load_config(options["config"])
        mode = options["mode"] or config.mode
        trace = labeled_trace(options["trace"], config)
        model = named_model(config, config.agent, "agent")
        labeler = build_labeler(config, trace)
        policy = config.policy

        monitor = Monitor(config.constraints, mode)
        current = {}
        for record in trace:
            current = monitor.observe(record)

        k = options["k"] or policy.k
        m = options["m"] or policy.m
        estimates = estimate_risks(
            list(monitor.states.values()),
            model,
            labeler,
            trace.steps,
            options["input"],
            pattern=options["pattern"] or policy.pattern,
            k=k,
            m=m,
            seed=config.seed if options["seed"] is None else options["seed"],
            current=current,
        )
        self.emit({
            "t": len(trace) + 1,
            "input": options["input"],
            "risks": [estimate.to_dict() for estimate in estimates.values()],
        })
        for estimate in estimates.values():
            flag = " (above threshold)" if estimate.probability >= policy.tau else ""
            self.summary(f"{estimate.constraint_id}: {estimate.probability:.3f} over m={m}, k={k}{flag}")
