"""Walkthrough: total-variation denoising of a synthetic phantom.

A 96x96 phantom is corrupted with Gaussian noise and restored by the lifted
primal-dual iteration; the relaxation parameter gamma controls how fast the
iteration moves, and the restored SNR improves markedly over the noisy input.
Writes noisy.pgm and restored.pgm next to this script.
"""

import pathlib

from minlift import snr
from minlift.cli import denoise_run
from minlift.imaging import DenoiseParams, add_gaussian_noise, phantom, save_pgm

here = pathlib.Path(__file__).parent
original = phantom(96)
# gamma=0.99, lambda=(0.01, 0.05, 1e-4, 10); a tolerance below the default
# 1e-4 lets the restoration settle (the SNR gain keeps growing for a few
# dozen iterations after the loose stopping rule would have fired)
params = DenoiseParams(tol=1e-6)
noisy = add_gaussian_noise(original, params.noise_sigma, seed=0)

_, trace, restored, _ = denoise_run(noisy, params)
print(f"converged in {trace.iterations} iterations (status={trace.status})")
print(f"noisy SNR    = {snr(original, noisy):.2f} dB")
print(f"restored SNR = {snr(original, restored):.2f} dB")

save_pgm(noisy, here / "noisy.pgm")
save_pgm(restored, here / "restored.pgm")
print(f"wrote {here / 'noisy.pgm'} and {here / 'restored.pgm'}")
