#pragma once

#include <string>
#include <vector>

#include "srm/config.hpp"

namespace srm {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> outputs;
};

// Spectrum CSV + frequencies JSON (both methods side by side). With
// oracle_check, also cross-checks against the uncoupled brute-force
// spectrum and fails when the deviation exceeds 1e-10.
CommandResult cmd_spectrum(const RunConfig& cfg, bool oracle_check = false);

// Magnetization trace CSV + EMF waveform CSV for the configured channel,
// with optional noise injection.
CommandResult cmd_synthesize(const RunConfig& cfg);

// Fit of an EMF record (single file, or a plus/minus pair differenced
// first): writes the fit JSON and the integrated magnetization.
CommandResult cmd_fit(const RunConfig& cfg, const std::string& input,
                      const std::string& plus_path = "",
                      const std::string& minus_path = "");

// Coupling-coefficient report for the longitudinal and transverse coils.
CommandResult cmd_coil(const RunConfig& cfg);

// Model datasets for the named figure (fig2..fig5) plus a summary JSON of
// headline numbers with their expected ranges.
CommandResult cmd_reproduce(const RunConfig& cfg, const std::string& figure_tag);

// Transverse waveform family over N x B x P grids, with a manifest.
CommandResult cmd_sweep(const RunConfig& cfg, const std::vector<int>& n_list,
                        const std::vector<double>& b_list,
                        const std::vector<double>& p_list);

}  // namespace srm
