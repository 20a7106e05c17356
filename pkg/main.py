import logging
import sys

from wavekit.cli.commands import main as cli_main
from wavekit.logging.event_logger import ShootingEventLogger
from wavekit.model.problem import Problem
from wavekit.wave.report import wave_report


def demo():
    """Threshold and wave of Example 1 with K = 1/4"""
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

    print("🌊 Travelling Wave Analysis Starting...")
    print("=" * 50)

    problem = Problem.from_sources(
        g="u^2 - u + K", f="0", D="(3/4 - u) * sqrt(u - u^2)", rho="sqrt(u - u^2)",
        name="example_1", params={'K': 0.25},
    )
    events = ShootingEventLogger()
    report = wave_report(problem, speed_offset=0.5, events=events)

    print(f"\n📊 Results:")
    print(f"Threshold speed c_hat: {report.c_hat:.6f}")
    print(f"Analytic bracket: [{report.bracket.lower:.6f}, {report.bracket.upper:.6f}]")
    print(f"Speed c: {report.c:.6f} -> existence {report.verdict.exists}, {report.classification.label}")

    events_df = events.get_dataframe()
    print(f"\n📈 Shooting attempts: {len(events_df)} in {events_df['case_id'].nunique()} cases")
    print(events_df['outcome'].value_counts())

    if report.profile is not None:
        print(f"\n🔍 Profile samples:")
        print(report.profile.get_dataframe().iloc[::20])
    return report


if __name__ == "__main__":
    if len(sys.argv) > 1:
        sys.exit(cli_main(sys.argv[1:]))
    demo()
