#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace srm {

enum class WaveUnit { volt, ampere_per_meter, tesla };
const char* wave_unit_tag(WaveUnit u);
WaveUnit parse_wave_unit(const std::string& tag);

// Uniformly sampled time series with free-form metadata (N, B, P, coil id,
// rotation sense, ...).
struct Waveform {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> samples;
  WaveUnit unit = WaveUnit::volt;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return samples.size(); }
  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  void validate() const;
  // First index with t >= t_threshold (clamped to size()).
  std::size_t index_at(double time) const;
};

// Half the difference of two shots taken at opposite settings; strips the
// common mode. meta["diff_axis"] records which metadata keys differed.
Waveform difference_protocol(const Waveform& plus, const Waveform& minus);

// Baseline-subtracted cumulative trapezoid of an EMF record times -c,
// yielding magnetization in A/m. Baseline window is [base_lo, base_hi).
Waveform integrate_emf(const Waveform& emf, double coefficient, std::size_t base_lo,
                       std::size_t base_hi);

// Additive white Gaussian noise with RMS set by snr_db relative to the
// signal RMS. Infinite snr_db returns the input unchanged. Deterministic
// per seed (hand-rolled Box-Muller over mt19937_64).
Waveform add_noise(const Waveform& wave, double snr_db, std::uint64_t seed);

void write_waveform_csv(const std::string& path, const Waveform& w);
Waveform read_waveform_csv(const std::string& path);

}  // namespace srm
