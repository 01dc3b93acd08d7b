#include "srm/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "srm/errors.hpp"

namespace srm {

const char* wave_unit_tag(WaveUnit u) {
  switch (u) {
    case WaveUnit::volt: return "volt";
    case WaveUnit::ampere_per_meter: return "ampere_per_meter";
    case WaveUnit::tesla: return "tesla";
  }
  return "?";
}

WaveUnit parse_wave_unit(const std::string& tag) {
  if (tag == "volt") return WaveUnit::volt;
  if (tag == "ampere_per_meter") return WaveUnit::ampere_per_meter;
  if (tag == "tesla") return WaveUnit::tesla;
  throw ValidationError("unknown waveform unit: " + tag);
}

void Waveform::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("Waveform: dt must be positive and finite");
  if (samples.empty()) throw ValidationError("Waveform: no samples");
  if (!std::isfinite(t0)) throw ValidationError("Waveform: t0 must be finite");
  for (double s : samples)
    if (!std::isfinite(s)) throw ValidationError("Waveform: non-finite sample");
}

std::size_t Waveform::index_at(double time) const {
  if (time <= t0) return 0;
  const double k = std::ceil((time - t0) / dt - 1e-9);
  if (k >= static_cast<double>(size())) return size();
  return static_cast<std::size_t>(k);
}

namespace {

void require_matching_grids(const Waveform& a, const Waveform& b) {
  const double tol = 1e-9 * a.dt;
  if (a.size() != b.size() || std::fabs(a.dt - b.dt) > tol ||
      std::fabs(a.t0 - b.t0) > tol || a.unit != b.unit)
    throw ValidationError("difference_protocol: waveform grids or units do not match");
}

}  // namespace

Waveform difference_protocol(const Waveform& plus, const Waveform& minus) {
  plus.validate();
  minus.validate();
  require_matching_grids(plus, minus);
  Waveform out = plus;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.samples[i] = 0.5 * (plus.samples[i] - minus.samples[i]);
  std::string axis;
  for (const auto& [k, v] : plus.meta) {
    auto it = minus.meta.find(k);
    if (it != minus.meta.end() && it->second != v) {
      if (!axis.empty()) axis += ",";
      axis += k;
    }
  }
  out.meta["diff_axis"] = axis.empty() ? "unspecified" : axis;
  return out;
}

Waveform integrate_emf(const Waveform& emf, double coefficient, std::size_t base_lo,
                       std::size_t base_hi) {
  emf.validate();
  if (emf.unit != WaveUnit::volt)
    throw ValidationError("integrate_emf: input must be in volts");
  if (base_lo >= base_hi || base_hi > emf.size())
    throw ValidationError("integrate_emf: empty or out-of-range baseline window");
  double bias = 0.0;
  for (std::size_t i = base_lo; i < base_hi; ++i) bias += emf.samples[i];
  bias /= static_cast<double>(base_hi - base_lo);

  Waveform out = emf;
  out.unit = WaveUnit::ampere_per_meter;
  out.samples[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < emf.size(); ++i) {
    acc += 0.5 * emf.dt *
           ((emf.samples[i - 1] - bias) + (emf.samples[i] - bias));
    out.samples[i] = -coefficient * acc;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", coefficient);
  out.meta["coefficient"] = buf;
  return out;
}

Waveform add_noise(const Waveform& wave, double snr_db, std::uint64_t seed) {
  wave.validate();
  if (!std::isfinite(snr_db)) {
    if (std::isnan(snr_db)) throw ValidationError("add_noise: snr_db is NaN");
    return wave;  // infinite SNR sentinel
  }
  double ms = 0.0;
  for (double s : wave.samples) ms += s * s;
  const double rms = std::sqrt(ms / static_cast<double>(wave.size()));
  const double sigma = rms * std::pow(10.0, -snr_db / 20.0);

  Waveform out = wave;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // (0, 1]; never returns 0 so log() below is safe
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
  };
  double cached = 0.0;
  bool have_cached = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double z;
    if (have_cached) {
      z = cached;
      have_cached = false;
    } else {
      const double r = std::sqrt(-2.0 * std::log(uniform()));
      const double phi = 2.0 * M_PI * uniform();
      z = r * std::cos(phi);
      cached = r * std::sin(phi);
      have_cached = true;
    }
    out.samples[i] += sigma * z;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", snr_db);
  out.meta["snr_db"] = buf;
  out.meta["noise_seed"] = std::to_string(seed);
  return out;
}

void write_waveform_csv(const std::string& path, const Waveform& w) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "# unit=" << wave_unit_tag(w.unit) << "\n";
  for (const auto& [k, v] : w.meta) out << "# " << k << "=" << v << "\n";
  out << "time_s,value\n";
  char line[96];
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", w.t(i), w.samples[i]);
    out << line;
  }
  if (!out) throw Error("write failure on " + path);
}

Waveform read_waveform_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Waveform w;
  std::string line;
  std::vector<double> times;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t start = body.find_first_not_of(' ');
      if (start == std::string::npos) continue;
      body = body.substr(start);
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string val = body.substr(eq + 1);
      if (key == "unit")
        w.unit = parse_wave_unit(val);
      else
        w.meta[key] = val;
      continue;
    }
    if (!header_seen) {
      if (line.rfind("time_s", 0) != 0)
        throw ValidationError(path + ": expected 'time_s,value' header");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string tcol, vcol;
    if (!std::getline(row, tcol, ',') || !std::getline(row, vcol))
      throw ValidationError(path + ": malformed row '" + line + "'");
    times.push_back(std::stod(tcol));
    w.samples.push_back(std::stod(vcol));
  }
  if (w.samples.size() < 2)
    throw ValidationError(path + ": need at least two samples");
  w.t0 = times.front();
  w.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - w.t(i)) > 1e-6 * w.dt)
      throw ValidationError(path + ": non-uniform time grid");
  w.validate();
  return w;
}

}  // namespace srm
