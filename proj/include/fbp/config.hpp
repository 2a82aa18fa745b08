#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fbp/data_model.hpp"
#include "fbp/outer.hpp"
#include "fbp/volterra.hpp"

namespace fbp {

class ConfigError : public InvalidData {
public:
  using InvalidData::InvalidData;
};

struct RunConfig {
  ProblemData problem;
  std::size_t n_time = 0, n_space = 0;
  bool sigma_certified = false;
  double sigma = 0.0;        // used when not certified
  double sigma_fraction = 1.0; // multiplies the certified horizon
  double norm_horizon = 0.0; // window for the sup-norms of f
  OuterOptions solver;
  ChiForm chi_form = ChiForm::corrected;
  std::size_t profile_cells = 4000;
  std::string out_dir;
  bool emit_field = false;
  double mms_sigma = 1.0;
  std::vector<std::pair<std::string, std::string>> echo; // keys as written
};

/// Flat "key = value" text with '#' comments.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

} // namespace fbp
