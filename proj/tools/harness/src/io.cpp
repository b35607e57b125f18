#include <cdfo/harness/io.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cdfo::harness {

using nlohmann::json;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const SignedLogDet& d) {
  return json{{"sign", d.sign}, {"log_abs", d.sign == 0 ? json(nullptr) : json(d.log_abs)}};
}

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(fmt::format("'{}' must be an array of numbers", what));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw IoError(fmt::format("'{}' must be an array of numbers", what));
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

InterpolationSet parse_set(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(fmt::format("invalid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw IoError("point set must be a JSON object");
  for (const char* key : {"base", "radius", "points"}) {
    if (!j.contains(key)) throw IoError(fmt::format("point set is missing '{}'", key));
  }
  InterpolationSet set;
  set.base = vector_from(j["base"], "base");
  if (!j["radius"].is_number()) throw IoError("'radius' must be a number");
  set.radius = j["radius"].get<double>();
  if (!j["points"].is_array()) throw IoError("'points' must be an array");
  for (const auto& p : j["points"]) set.points.push_back(vector_from(p, "points"));
  if (j.contains("values") && !j["values"].is_null()) {
    const auto& vals = j["values"];
    if (!vals.is_array()) throw IoError("'values' must be an array");
    for (const auto& v : vals) {
      if (!v.is_number()) throw IoError("'values' must contain only numbers");
      set.values.push_back(v.get<double>());
    }
  }
  try {
    validate(set);
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  return set;
}

InterpolationSet read_set(const std::filesystem::path& path) {
  try {
    return parse_set(read_text(path));
  } catch (const IoError& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string format_set(const InterpolationSet& set) {
  json j;
  j["base"] = to_json(set.base);
  j["radius"] = set.radius;
  j["points"] = json::array();
  for (const auto& p : set.points) j["points"].push_back(to_json(p));
  if (set.has_values()) j["values"] = set.values;
  return j.dump(2) + "\n";
}

void write_set(const std::filesystem::path& path, const InterpolationSet& set) {
  write_text(path, format_set(set));
}

std::string format_model(const QuadraticModel& model) {
  json j;
  j["c"] = model.c;
  j["g"] = to_json(model.g);
  j["H"] = json::array();
  for (Eigen::Index i = 0; i < model.H.rows(); ++i) j["H"].push_back(to_json(model.H.row(i).transpose()));
  j["base"] = to_json(model.base);
  return j.dump(2) + "\n";
}

void write_model(const std::filesystem::path& path, const QuadraticModel& model) {
  write_text(path, format_model(model));
}

QuadraticModel parse_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(fmt::format("invalid JSON: {}", e.what()));
  }
  for (const char* key : {"c", "g", "H", "base"}) {
    if (!j.contains(key)) throw IoError(fmt::format("model is missing '{}'", key));
  }
  const Vector g = vector_from(j["g"], "g");
  const auto n = g.size();
  Matrix H(n, n);
  if (!j["H"].is_array() || static_cast<Eigen::Index>(j["H"].size()) != n) throw IoError("'H' must be n x n");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = vector_from(j["H"][static_cast<std::size_t>(i)], "H");
    if (row.size() != n) throw IoError("'H' must be n x n");
    H.row(i) = row.transpose();
  }
  return QuadraticModel(j["c"].get<double>(), g, H, vector_from(j["base"], "base"));
}

std::string format_swap_log(const std::vector<SwapRecord>& swaps) {
  json out = json::array();
  for (const auto& s : swaps) {
    out.push_back(json{{"index", s.index},
                       {"old_point", to_json(s.old_point)},
                       {"new_point", to_json(s.new_point)},
                       {"lagrange_value", s.lagrange_value},
                       {"det_before", to_json(s.det_before)},
                       {"det_predicted", to_json(s.det_predicted)},
                       {"det_actual", to_json(s.det_actual)}});
  }
  return out.dump(2) + "\n";
}

void write_swap_log(const std::filesystem::path& path, const std::vector<SwapRecord>& swaps) {
  write_text(path, format_swap_log(swaps));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("CDFO_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace cdfo::harness
