#include "adq/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "adq/csv.hpp"
#include "adq/measure_io.hpp"

namespace adq {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Error config_error(const std::string& key, const std::string& msg) {
  return Error(ErrorKind::InvalidConfig, key + ": " + msg);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw config_error(key, "expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error(key, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error(key, "expected an integer, got '" + v + "'");
  return out;
}

std::string resolve_path(const std::string& base, const std::string& p) {
  namespace fs = std::filesystem;
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::size_t> parse_n_range(const std::string& text) {
  std::vector<std::size_t> out;
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(trim(part));
    if (parts.size() < 2 || parts.size() > 3) throw config_error("n_range", "expected a:b or a:b:step");
    const auto a = to_u64("n_range", parts[0]), b = to_u64("n_range", parts[1]);
    const auto step = parts.size() == 3 ? to_u64("n_range", parts[2]) : 1;
    if (step == 0) throw config_error("n_range", "step must be positive");
    for (auto n = a; n <= b; n += step) out.push_back(n);
  } else {
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(to_u64("n_range", trim(part)));
  }
  if (out.empty()) throw config_error("n_range", "empty range");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw config_error("n_range", "n must be >= 1");
    if (i > 0 && out[i] <= out[i - 1]) throw config_error("n_range", "must be strictly increasing");
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  ExperimentConfig c;
  std::set<std::string> seen;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"measure", [&](auto&, auto& v) { c.measure = v; }},
      {"measure_file", [&](auto&, auto& v) { c.measure = resolve_path(base_dir, v); }},
      {"r", [&](auto& k, auto& v) { c.r = to_double(k, v); }},
      {"n", [&](auto& k, auto& v) { c.n_range = {static_cast<std::size_t>(to_u64(k, v))}; }},
      {"n_range", [&](auto&, auto& v) { c.n_range = parse_n_range(v); }},
      {"method",
       [&](auto& k, auto& v) {
         if (v == "lloyd") c.optimizer.method = OptimizeConfig::Method::Lloyd;
         else if (v == "sgd") c.optimizer.method = OptimizeConfig::Method::Sgd;
         else throw config_error(k, "expected lloyd or sgd");
       }},
      {"restarts", [&](auto& k, auto& v) { c.optimizer.restarts = to_u64(k, v); }},
      {"max_iters", [&](auto& k, auto& v) { c.optimizer.max_iters = to_u64(k, v); }},
      {"pool_size", [&](auto& k, auto& v) { c.optimizer.pool_size = to_u64(k, v); }},
      {"sgd_batch", [&](auto& k, auto& v) { c.optimizer.sgd_batch = to_u64(k, v); }},
      {"sgd_c0", [&](auto& k, auto& v) { c.optimizer.sgd_c0 = to_double(k, v); }},
      {"sgd_decay", [&](auto& k, auto& v) { c.optimizer.sgd_decay = to_double(k, v); }},
      {"tolerance", [&](auto& k, auto& v) { c.optimizer.tolerance = to_double(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"norm",
       [&](auto& k, auto& v) {
         try {
           c.optimizer.norm = parse_norm(v);
         } catch (const Error&) {
           throw config_error(k, "unknown norm '" + v + "'");
         }
       }},
      {"m", [&](auto& k, auto& v) { c.m = to_int(k, v); }},
      {"level_c", [&](auto& k, auto& v) { c.level_c = to_double(k, v); }},
      {"k_min", [&](auto& k, auto& v) { c.k_min = to_int(k, v); }},
      {"k_max", [&](auto& k, auto& v) { c.k_max = to_int(k, v); }},
      {"support_samples", [&](auto& k, auto& v) { c.support_samples = to_u64(k, v); }},
      {"eval_samples", [&](auto& k, auto& v) { c.eval_samples = to_u64(k, v); }},
      {"band_min", [&](auto& k, auto& v) { c.band_min = to_double(k, v); }},
      {"band_max", [&](auto& k, auto& v) { c.band_max = to_double(k, v); }},
      {"probe_eps_min", [&](auto& k, auto& v) { c.probe_eps_min = to_double(k, v); }},
      {"probe_eps_max", [&](auto& k, auto& v) { c.probe_eps_max = to_double(k, v); }},
      {"probe_scales", [&](auto& k, auto& v) { c.probe_scales = to_u64(k, v); }},
      {"probe_centers", [&](auto& k, auto& v) { c.probe_centers = to_u64(k, v); }},
      {"probe_threshold", [&](auto& k, auto& v) { c.probe_threshold = to_double(k, v); }},
      {"codebook_file", [&](auto&, auto& v) { c.codebook_file = resolve_path(base_dir, v); }},
      {"structural_ratio_slack", [&](auto& k, auto& v) { c.structural_ratio_slack = to_double(k, v); }},
      {"structural_m_cap", [&](auto& k, auto& v) { c.structural_m_cap = to_u64(k, v); }},
      {"structural_band_cap", [&](auto& k, auto& v) { c.structural_band_cap = to_double(k, v); }},
      {"oracle_instances", [&](auto& k, auto& v) { c.oracle_instances = to_u64(k, v); }},
      {"out", [&](auto&, auto& v) { c.out = resolve_path(base_dir, v); }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    // '#' starts a comment except inside inline JSON values
    if (const auto eq = body.find('='); eq == std::string::npos || trim(body.substr(eq + 1)).rfind('{', 0) != 0)
      if (const auto hash = body.find('#'); hash != std::string::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    const std::string slot = key == "measure_file" ? "measure" : (key == "n" ? "n_range" : key);
    if (!seen.insert(slot).second)
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.empty()) throw config_error(key, "empty value");
    it->second(key, value);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(read_file(path), dir.empty() ? "." : dir);
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw Error(ErrorKind::InvalidConfig, "seed is required (config key 'seed' or --seed)");
  return *seed;
}

void ExperimentConfig::validate() const {
  if (!(r > 0.0)) throw config_error("r", "must be positive");
  if (optimizer.restarts < 1) throw config_error("restarts", "must be >= 1");
  if (optimizer.pool_size < 1) throw config_error("pool_size", "must be positive");
  if (m < 2) throw config_error("m", "must be >= 2");
  if (!(level_c > 0.0)) throw config_error("level_c", "must be positive");
  if (k_min < 0 || k_max < k_min) throw config_error("k_max", "need 0 <= k_min <= k_max");
  if (support_samples < 1) throw config_error("support_samples", "must be positive");
  if (eval_samples < 100) throw config_error("eval_samples", "must be >= 100");
  if (!(band_min > 0.0) || !(band_max >= band_min)) throw config_error("band_max", "need 0 < band_min <= band_max");
  if (!(probe_eps_min > 0.0) || !(probe_eps_max > probe_eps_min))
    throw config_error("probe_eps_max", "need 0 < probe_eps_min < probe_eps_max");
  if (probe_scales < 3) throw config_error("probe_scales", "must be >= 3");
  if (probe_centers < 1) throw config_error("probe_centers", "must be positive");
  if (!(probe_threshold > 1.0)) throw config_error("probe_threshold", "must exceed 1");
  if (!(structural_ratio_slack >= 0.0)) throw config_error("structural_ratio_slack", "must be nonnegative");
  if (!(structural_band_cap >= 1.0)) throw config_error("structural_band_cap", "must be >= 1");
  if (oracle_instances < 1) throw config_error("oracle_instances", "must be positive");
  if (!codebook_file.empty() && !std::filesystem::exists(codebook_file))
    throw config_error("codebook_file", "no such file " + codebook_file);
  if (measure.empty()) throw config_error("measure", "empty");
  try {
    resolve_measure(measure);  // referenced files must exist and parse
    optimizer.validate(r);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
}

std::string normalized_config(const ExperimentConfig& c) {
  std::string n_list;
  for (std::size_t i = 0; i < c.n_range.size(); ++i) n_list += (i ? "," : "") + std::to_string(c.n_range[i]);
  std::map<std::string, std::string> kv{
      {"measure", c.measure},
      {"r", fmt17(c.r)},
      {"n_range", n_list},
      {"method", std::string(to_string(c.optimizer.method))},
      {"restarts", std::to_string(c.optimizer.restarts)},
      {"max_iters", std::to_string(c.optimizer.max_iters)},
      {"pool_size", std::to_string(c.optimizer.pool_size)},
      {"sgd_batch", std::to_string(c.optimizer.sgd_batch)},
      {"sgd_c0", fmt17(c.optimizer.sgd_c0)},
      {"sgd_decay", fmt17(c.optimizer.sgd_decay)},
      {"tolerance", fmt17(c.optimizer.tolerance)},
      {"seed", c.seed ? std::to_string(*c.seed) : ""},
      {"norm", std::string(to_string(c.optimizer.norm))},
      {"m", std::to_string(c.m)},
      {"level_c", fmt17(c.level_c)},
      {"k_min", std::to_string(c.k_min)},
      {"k_max", std::to_string(c.k_max)},
      {"support_samples", std::to_string(c.support_samples)},
      {"eval_samples", std::to_string(c.eval_samples)},
      {"band_min", fmt17(c.band_min)},
      {"band_max", fmt17(c.band_max)},
      {"probe_eps_min", fmt17(c.probe_eps_min)},
      {"probe_eps_max", fmt17(c.probe_eps_max)},
      {"probe_scales", std::to_string(c.probe_scales)},
      {"probe_centers", std::to_string(c.probe_centers)},
      {"probe_threshold", fmt17(c.probe_threshold)},
      {"codebook_file", c.codebook_file},
      {"structural_ratio_slack", fmt17(c.structural_ratio_slack)},
      {"structural_m_cap", std::to_string(c.structural_m_cap)},
      {"structural_band_cap", fmt17(c.structural_band_cap)},
      {"oracle_instances", std::to_string(c.oracle_instances)},
  };
  // Unset entries are left out so the listing parses back.
  std::string out;
  for (const auto& [k, v] : kv)
    if (!v.empty()) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a64(normalized_config(c)); }

std::string provenance_comment(const ExperimentConfig& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx seed=%llu\n", static_cast<unsigned long long>(config_hash(c)),
                static_cast<unsigned long long>(c.seed.value_or(0)));
  return buf;
}

}  // namespace adq
