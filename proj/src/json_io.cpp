#include "wpt/json_io.hpp"

#include <cstdio>
#include <json.hpp>

namespace wpt {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i)));
  return rows;
}

Mat mat_from_json(const json& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

}  // namespace

json manifold_to_json(const Manifold& m) {
  json j;
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      j["manifold"] = "euclidean";
      j["dim"] = m.dim();
      break;
    case ManifoldKind::FlatTorus:
      j["manifold"] = "flat_torus";
      j["dim"] = m.dim();
      j["period"] = vec_to_json(m.period());
      break;
    case ManifoldKind::Sphere:
      j["manifold"] = "sphere";
      j["dim"] = 2;
      j["radius"] = m.radius();
      break;
  }
  return j;
}

Manifold manifold_from_json(const json& j) {
  const std::string kind = j.at("manifold").get<std::string>();
  if (kind == "euclidean") return Manifold::euclidean(j.at("dim").get<int>());
  if (kind == "flat_torus")
    return Manifold::flat_torus(vec_from_json(j.at("period")));
  if (kind == "sphere") return Manifold::sphere(j.value("radius", 1.0));
  throw InvalidPoint("unknown manifold kind: " + kind);
}

json measure_to_json(const DiscreteMeasure& mu) {
  json j;
  j["manifold"] = manifold_to_json(mu.manifold());
  json atoms = json::array();
  for (const auto& a : mu.atoms())
    atoms.push_back({{"x", vec_to_json(a.x)}, {"w", a.w}});
  j["atoms"] = atoms;
  return j;
}

DiscreteMeasure measure_from_json(const json& j) {
  const Manifold m = manifold_from_json(j.at("manifold"));
  std::vector<Atom> atoms;
  for (const auto& ja : j.at("atoms"))
    atoms.push_back({vec_from_json(ja.at("x")), ja.at("w").get<double>()});
  return DiscreteMeasure(m, std::move(atoms));
}

json gaussian_to_json(const GaussianMeasure& g) {
  return {{"gaussian",
           {{"mean", vec_to_json(g.mean())}, {"cov", mat_to_json(g.cov())}}}};
}

GaussianMeasure gaussian_from_json(const json& j) {
  const json& g = j.contains("gaussian") ? j.at("gaussian") : j;
  return GaussianMeasure(vec_from_json(g.at("mean")),
                         mat_from_json(g.at("cov")));
}

json plan_to_json(const TransportPlan& p) {
  json pairs = json::array();
  for (const auto& e : p.entries())
    pairs.push_back(json::array({e.i, e.j, e.mass}));
  return {{"pairs", pairs}};
}

json field_to_json(const TangentField& f) {
  if (std::holds_alternative<DiscreteField>(f)) {
    const auto& df = std::get<DiscreteField>(f);
    json values = json::array();
    for (const auto& v : df.values) values.push_back(vec_to_json(v));
    return {{"values", values}};
  }
  const auto& gf = std::get<GaussianField>(f);
  return {{"linear", mat_to_json(gf.lin)}, {"const", vec_to_json(gf.cst)}};
}

json cone_element_to_json(const ConeElement& e) {
  json legs = json::array();
  for (const auto& l : e.legs)
    legs.push_back(json::array({l.src, vec_to_json(l.target), l.mass}));
  return {{"base", measure_to_json(e.base)},
          {"plan", legs},
          {"radius", e.radius}};
}

ConeElement cone_element_from_json(const json& j) {
  DiscreteMeasure base = measure_from_json(j.at("base"));
  std::vector<ConeLeg> legs;
  for (const auto& jl : j.at("plan"))
    legs.push_back({jl[0].get<int>(), vec_from_json(jl[1]),
                    jl[2].get<double>()});
  return ConeElement{std::move(base), std::move(legs),
                     j.at("radius").get<double>()};
}

}  // namespace wpt
