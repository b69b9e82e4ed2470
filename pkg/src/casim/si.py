"""Memoryless third-order PA model and second-harmonic self-interference.

A two-tone input A1*cos(w1 t) + A2*cos(w2 t) through y = c1 x + c2 x^2 - c3 x^3
produces the classic harmonic/intermod spectrum; only the second harmonic of
the SI-causing carrier reaches the device's own receiver, attenuated by the
Tx-Rx coupling loss. Tone power is amplitude^2 / 2 throughout.
"""

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass
class PaCoefficients:
    c1: float                   # linear amplitude gain, sqrt(power gain)
    c2: float                   # second-order coefficient
    c3: float = 0.0             # third-order coefficient

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 < 0 or self.c3 < 0:
            raise ConfigError("PA coefficients need c1 > 0, c2 >= 0, c3 >= 0")

    @classmethod
    def from_power_gain(cls, gain, c2, c3=0.0):
        """Build from the linear power gain G (c1 = sqrt(G))."""
        return cls(math.sqrt(gain), c2, c3)

    @property
    def power_gain(self):
        return self.c1 ** 2


@dataclass
class ToneSpectrum:
    """Output tones as (frequency label, signed amplitude) pairs.

    The +/- intermod pairs share one amplitude and are listed once.
    """
    entries: list

    def amplitude(self, label):
        for name, amp in self.entries:
            if name == label:
                return amp
        raise KeyError(label)

    def power(self, label):
        """Tone power amplitude^2/2 for the labelled component."""
        return self.amplitude(label) ** 2 / 2.0

    def labels(self):
        return [name for name, _ in self.entries]


def pa_output_spectrum(a1, a2, coeffs):
    """Full two-tone output spectrum of the third-order PA.

    Rows (amplitudes, all exact):
      dc        c2 (A1^2 + A2^2) / 2
      w1        c1 A1 - (3/2) c3 (A1^3/2 + A1 A2^2)
      w2        c1 A2 - (3/2) c3 (A2^3/2 + A1^2 A2)
      2w_n      c2 A_n^2 / 2
      3w_n      -c3 A_n^3 / 4
      w1+-w2    c2 A1 A2
      2w1+-w2   -(3/4) c3 A1^2 A2
      2w2+-w1   -(3/4) c3 A1 A2^2
    """
    if a1 < 0 or a2 < 0:
        raise ValueError("tone amplitudes must be non-negative")
    c1, c2, c3 = coeffs.c1, coeffs.c2, coeffs.c3
    entries = [
        ("dc", 0.5 * c2 * (a1 ** 2 + a2 ** 2)),
        ("w1", c1 * a1 - 1.5 * c3 * (a1 ** 3 / 2.0 + a1 * a2 ** 2)),
        ("w2", c1 * a2 - 1.5 * c3 * (a2 ** 3 / 2.0 + a1 ** 2 * a2)),
        ("2w1", 0.5 * c2 * a1 ** 2),
        ("2w2", 0.5 * c2 * a2 ** 2),
        ("3w1", -0.25 * c3 * a1 ** 3),
        ("3w2", -0.25 * c3 * a2 ** 3),
        ("w1+-w2", c2 * a1 * a2),
        ("2w1+-w2", -0.75 * c3 * a1 ** 2 * a2),
        ("2w2+-w1", -0.75 * c3 * a1 * a2 ** 2),
    ]
    return ToneSpectrum(entries)


def cc_input_amplitude(per_rb_powers):
    """Equivalent tone amplitude of one CC: A^2/2 equals the summed RB powers."""
    total = 0.0
    for p in per_rb_powers:
        if p < 0:
            raise ValueError("RB powers must be non-negative")
        total += p
    return math.sqrt(2.0 * total)


def second_harmonic_tx_power(amplitude, c2):
    """Transmitter-output power of the 2nd harmonic: c2^2 A^4 / 8."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    return c2 ** 2 * amplitude ** 4 / 8.0


def si_at_receiver(p_2h, coupling_loss):
    """SI power at the receiver input after the Tx-Rx coupling loss (linear >= 1)."""
    if coupling_loss < 1.0:
        raise ValueError("coupling loss must be >= 1 in linear scale")
    return p_2h / coupling_loss


def sensitivity_degradation(p_si, noise):
    """Receiver sensitivity degradation in dB: 10 log10((p_SI + noise)/noise)."""
    if p_si < 0:
        raise ValueError("SI power must be non-negative")
    if noise <= 0:
        raise ValueError("noise power must be positive")
    return 10.0 * math.log10((p_si + noise) / noise)


def si_frequency_conflict(f_ul, f_dl, tolerance=0.0):
    """True when the UL carrier's 2nd harmonic lands on the DL frequency."""
    if f_ul <= 0 or f_dl <= 0:
        raise ValueError("frequencies must be positive")
    return abs(2.0 * f_ul - f_dl) <= tolerance


def scc_self_interference(scc_radiated_power, pa_gain, c2, coupling_loss):
    """SI power at the receiver input for one SCC's allocated (radiated) power.

    The harmonic model acts on the PA input tone, so the radiated CC power is
    referred back through the PA power gain before forming the amplitude.
    """
    p_in = scc_radiated_power / pa_gain
    amp = cc_input_amplitude([p_in])
    return si_at_receiver(second_harmonic_tx_power(amp, c2), coupling_loss)
