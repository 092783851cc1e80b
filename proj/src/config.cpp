#include "tacloc/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tacloc {
namespace {

constexpr double kDegToRad = 0.017453292519943295;
constexpr double kMmToM = 1e-3;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key +
                                "': '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) {
    throw std::invalid_argument("config: '" + key + "' must be an integer");
  }
  return static_cast<long>(v);
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(voxel_size > 0.0, "voxel_size must be positive");
  require(fpfh_radius > voxel_size, "fpfh_radius must exceed voxel_size");
  require(delta_d > 0.0, "delta_d must be positive");
  require(delta_alpha > 0.0 && delta_alpha <= 3.15,
          "delta_alpha must be in (0, 180] degrees");
  require(num_candidates > 0, "num_candidates must be positive");
  require(alpha_weight >= 0.0, "alpha_weight must be non-negative");
  require(num_initial_correspondences > 0,
          "num_initial_correspondences must be positive");
  require(refine_max_iters > 0, "refine_max_iters must be positive");
  require(refine_tol > 0.0, "refine_tol must be positive");
  require(contact_threshold >= 0.0, "contact_threshold must be non-negative");
  require(iss_gamma21 > 0.0 && iss_gamma21 < 1.0,
          "iss_gamma21 must be in (0, 1)");
  require(iss_gamma32 > 0.0 && iss_gamma32 < 1.0,
          "iss_gamma32 must be in (0, 1)");
  require(iss_salient_radius >= 0.0, "iss_salient_radius must be >= 0");
  require(iss_nms_radius >= 0.0, "iss_nms_radius must be >= 0");
  require(clique_budget > 0, "clique_budget must be positive");
  require(ransac_iters > 0, "ransac_iters must be positive");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;

  // Setters convert file units (mm, deg) into SI where applicable.
  const std::map<std::string, std::function<void(const std::string&)>> setters{
      {"voxel_size_mm",
       [&](const std::string& v) { cfg.voxel_size = kMmToM * parse_double("voxel_size_mm", v); }},
      {"fpfh_radius_mm",
       [&](const std::string& v) { cfg.fpfh_radius = kMmToM * parse_double("fpfh_radius_mm", v); }},
      {"delta_d_mm",
       [&](const std::string& v) { cfg.delta_d = kMmToM * parse_double("delta_d_mm", v); }},
      {"delta_alpha_deg",
       [&](const std::string& v) { cfg.delta_alpha = kDegToRad * parse_double("delta_alpha_deg", v); }},
      {"num_candidates",
       [&](const std::string& v) { cfg.num_candidates = static_cast<int>(parse_long("num_candidates", v)); }},
      {"alpha_weight",
       [&](const std::string& v) { cfg.alpha_weight = parse_double("alpha_weight", v); }},
      {"num_initial_correspondences",
       [&](const std::string& v) {
         cfg.num_initial_correspondences =
             static_cast<int>(parse_long("num_initial_correspondences", v));
       }},
      {"refine_max_iters",
       [&](const std::string& v) { cfg.refine_max_iters = static_cast<int>(parse_long("refine_max_iters", v)); }},
      {"refine_tol_mm",
       [&](const std::string& v) { cfg.refine_tol = kMmToM * parse_double("refine_tol_mm", v); }},
      {"contact_threshold_mm",
       [&](const std::string& v) { cfg.contact_threshold = kMmToM * parse_double("contact_threshold_mm", v); }},
      {"iss_salient_radius_mm",
       [&](const std::string& v) { cfg.iss_salient_radius = kMmToM * parse_double("iss_salient_radius_mm", v); }},
      {"iss_nms_radius_mm",
       [&](const std::string& v) { cfg.iss_nms_radius = kMmToM * parse_double("iss_nms_radius_mm", v); }},
      {"iss_gamma21",
       [&](const std::string& v) { cfg.iss_gamma21 = parse_double("iss_gamma21", v); }},
      {"iss_gamma32",
       [&](const std::string& v) { cfg.iss_gamma32 = parse_double("iss_gamma32", v); }},
      {"clique_budget",
       [&](const std::string& v) { cfg.clique_budget = parse_long("clique_budget", v); }},
      {"ransac_iters",
       [&](const std::string& v) { cfg.ransac_iters = static_cast<int>(parse_long("ransac_iters", v)); }},
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                  std::to_string(line_no));
    }
    it->second(value);
  }

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace tacloc
