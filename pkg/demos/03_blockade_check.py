"""Is first-order blockade enough?  Second-order channels for Rb at n = 42.

Every dipole-allowed channel leading out of the manifolds is compared with the
smallest first-order shift it competes with.  With hydrogenic energies many of
these channels are exactly degenerate, which the check reports as an alarm.
"""
from rydtriad.blockade import check_negligibility
from rydtriad.coupling import Geometry
from rydtriad.errors import ResonanceAlarm
from rydtriad.hydrogenics import EnergyModel

geo = Geometry.collinear(5.0, "um")
report = check_negligibility(42, geo, EnergyModel.rubidium())
print("Rb quantum defects:", "passes" if report.passed else "fails")
for group, total in report.margin_sums.items():
    print(f"  summed margin, {group} channels: {total:.2e}")
worst = max(report.results, key=lambda r: r.margin)
print(f"  worst single channel {worst.channel.label}: margin {worst.margin:.2e}")
print(f"  recommended Rabi frequency {report.max_rabi_mhz:.2f} MHz, pi pulse {report.min_step_duration_us:.2f} us")

try:
    check_negligibility(42, geo, EnergyModel.hydrogenic())
except ResonanceAlarm as alarm:
    print(f"\nhydrogenic energies: {len(alarm.channels)} resonant channels, e.g. {alarm.channels[0].label}")
