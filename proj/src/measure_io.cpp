#include "adq/measure_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace adq {

using nlohmann::json;

namespace {

json point_json(std::span<const double> p) { return json(std::vector<double>(p.begin(), p.end())); }

Point point_from(const json& j, std::size_t dim, const char* what) {
  auto p = j.get<std::vector<double>>();
  if (p.size() != dim) throw Error(ErrorKind::Parse, std::string(what) + " has wrong dimension");
  return p;
}

json similitude_json(const Similitude& s) {
  const std::size_t q = s.dim();
  json rows = json::array();
  for (std::size_t i = 0; i < q; ++i)
    rows.push_back(std::vector<double>(s.rotation().begin() + i * q, s.rotation().begin() + (i + 1) * q));
  return {{"ratio", s.ratio()}, {"rotation", rows}, {"translation", s.translation()}};
}

Similitude similitude_from(const json& j, std::size_t dim) {
  std::vector<double> rot;
  if (j.contains("rotation")) {
    const auto& rows = j.at("rotation");
    if (rows.size() != dim) throw Error(ErrorKind::Parse, "rotation has wrong row count");
    for (const auto& row : rows) {
      const Point r = point_from(row, dim, "rotation row");
      rot.insert(rot.end(), r.begin(), r.end());
    }
  } else {
    rot.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) rot[i * dim + i] = 1.0;
  }
  Point t = j.contains("translation") ? point_from(j.at("translation"), dim, "translation") : Point(dim, 0.0);
  return {j.at("ratio").get<double>(), std::move(rot), std::move(t)};
}

json region_json(const Region& r) {
  switch (r.kind()) {
    case Region::Kind::Ball:
      return {{"type", "ball"}, {"center", r.center()}, {"radius", r.radius()}};
    case Region::Kind::Enlarged:
      return {{"type", "enlarged"}, {"base", region_json(r.parts().front())}, {"delta", r.delta()}};
    case Region::Kind::Difference:
      return {{"type", "difference"}, {"a", region_json(r.parts()[0])}, {"b", region_json(r.parts()[1])}};
    case Region::Kind::Union:
    case Region::Kind::Intersection: {
      json parts = json::array();
      for (const auto& p : r.parts()) parts.push_back(region_json(p));
      return {{"type", r.kind() == Region::Kind::Union ? "union" : "intersection"}, {"parts", parts}};
    }
  }
  return {};
}

Region region_from(const json& j, std::size_t dim) {
  const auto type = j.at("type").get<std::string>();
  if (type == "ball") return Region::ball(point_from(j.at("center"), dim, "ball center"), j.at("radius").get<double>());
  if (type == "enlarged") return Region::enlarged(region_from(j.at("base"), dim), j.at("delta").get<double>());
  if (type == "difference") return Region::difference(region_from(j.at("a"), dim), region_from(j.at("b"), dim));
  if (type == "union" || type == "intersection") {
    std::vector<Region> parts;
    for (const auto& p : j.at("parts")) parts.push_back(region_from(p, dim));
    return type == "union" ? Region::union_of(std::move(parts)) : Region::intersection(std::move(parts));
  }
  throw Error(ErrorKind::Parse, "unknown region type '" + type + "'");
}

json measure_json(const Measure& m) {
  json j{{"dim", m.dim()}};
  if (const auto* box = m.as<UniformBox>()) {
    j["kind"] = "uniform_box";
    j["lo"] = box->lo;
    j["hi"] = box->hi;
  } else if (const auto* ifs = m.as<SelfSimilarIFS>()) {
    j["kind"] = "ifs";
    json maps = json::array();
    for (const auto& f : ifs->maps) maps.push_back(similitude_json(f));
    j["maps"] = maps;
    j["probs"] = ifs->probs;
  } else if (const auto* d = m.as<Discrete>()) {
    j["kind"] = "discrete";
    json atoms = json::array();
    for (std::size_t i = 0; i < d->atoms.size(); ++i) atoms.push_back(point_json(d->atoms[i]));
    j["atoms"] = atoms;
    j["weights"] = d->weights;
  } else if (const auto* cr = m.as<ConditionalRescaled>()) {
    j["kind"] = "conditional";
    j["base"] = measure_json(*cr->base);
    j["region"] = region_json(cr->region);
    j["similitude"] = similitude_json(cr->sim);
    j["norm"] = std::string(to_string(cr->norm));
  }
  return j;
}

Measure measure_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto dim = j.at("dim").get<std::size_t>();
  if (dim == 0) throw Error(ErrorKind::Parse, "dim must be positive");
  if (kind == "uniform_box")
    return Measure::uniform_box(point_from(j.at("lo"), dim, "lo"), point_from(j.at("hi"), dim, "hi"));
  if (kind == "ifs") {
    std::vector<Similitude> maps;
    for (const auto& f : j.at("maps")) maps.push_back(similitude_from(f, dim));
    return make_ifs(std::move(maps), j.at("probs").get<std::vector<double>>());
  }
  if (kind == "discrete") {
    PointSet atoms(dim);
    for (const auto& a : j.at("atoms")) atoms.push_back(point_from(a, dim, "atom"));
    return Measure::discrete(std::move(atoms), j.at("weights").get<std::vector<double>>());
  }
  if (kind == "conditional") {
    const Measure base = measure_from(j.at("base"));
    const NormKind norm = j.contains("norm") ? parse_norm(j.at("norm").get<std::string>()) : NormKind::Euclidean;
    return condition_rescale(base, region_from(j.at("region"), dim), similitude_from(j.at("similitude"), dim), norm);
  }
  throw Error(ErrorKind::Parse, "unknown measure kind '" + kind + "'");
}

}  // namespace

std::string measure_to_json(const Measure& measure) { return measure_json(measure).dump(); }

Measure measure_from_json(const std::string& text) {
  try {
    return measure_from(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("measure JSON: ") + e.what());
  }
}

Measure resolve_measure(const std::string& source) {
  if (source == "uniform1d") return builtin::uniform_interval();
  if (source == "uniform_square") return builtin::uniform_square();
  if (source == "cantor") return builtin::cantor();
  if (source == "cantor_weighted") return builtin::cantor(1.0 / 3.0);
  if (source == "cantor_dust") return builtin::cantor_dust();
  const auto first = source.find_first_not_of(" \t");
  if (first != std::string::npos && source[first] == '{') return measure_from_json(source).with_id("inline");
  if (!std::filesystem::exists(source))
    throw Error(ErrorKind::InvalidConfig, "measure '" + source + "' is neither a builtin nor an existing file");
  std::ifstream in(source);
  std::stringstream buf;
  buf << in.rdbuf();
  return measure_from_json(buf.str()).with_id(std::filesystem::path(source).stem().string());
}

}  // namespace adq
