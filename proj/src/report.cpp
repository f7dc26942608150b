#include "bergman/report.hpp"

namespace bergman {

namespace {

const char* variable_name(LawVariable v) {
  switch (v) {
    case LawVariable::rho_to_0: return "rho_to_0";
    case LawVariable::tau_to_inf: return "tau_to_inf";
    case LawVariable::u_to_0: return "u_to_0";
    case LawVariable::s_to_pole: return "s_to_pole";
  }
  return "?";
}

Json rho_json(const std::vector<std::optional<Rat>>& rho) {
  Json arr = Json::array();
  for (const auto& r : rho) arr.push_back(r ? to_string(*r) : "inf");
  return arr;
}

}  // namespace

Json to_json(const NewtonPolyhedron& P) {
  Json j;
  j["support"] = P.support.points;
  j["vertices"] = P.vertices;
  Json facets = Json::array();
  for (const auto& h : P.facets) {
    Json row = Json::array();
    for (long long a : h.a) row.push_back(a);
    row.push_back(h.l);
    facets.push_back(row);
  }
  j["facets"] = facets;
  return j;
}

Json to_json(const NewtonData& nd, const ModelFunction& f) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["input"] = render(f);
  j["n"] = nd.dim;
  j["d"] = to_string(nd.d);
  j["m"] = nd.m;
  j["compact"] = nd.principal_compact;
  j["convenient"] = nd.convenient;
  j["rho"] = rho_json(nd.rho);
  j["dangelo_type"] = nd.rho_max ? Json(to_string(*nd.rho_max)) : Json("inf");
  ModelFunction pp;
  pp.dim = nd.dim;
  pp.monomials = nd.principal_part;
  j["principal_part"] = render(pp);
  j["polyhedron"] = to_json(nd.P);
  Json warnings = Json::array();
  if (!nd.principal_compact)
    warnings.push_back(
        "principal face is noncompact: the leading law is not determined by the "
        "polyhedron and may depend on the flat terms; only raw curves apply");
  if (!positive_away_from_origin(f))
    warnings.push_back(
        "model vanishes on a coordinate subspace away from the origin; "
        "localization decay rates degenerate");
  j["warnings"] = warnings;
  return j;
}

Json to_json(const AsymptoticLaw& law) {
  Json j;
  j["a"] = to_string(law.a);
  j["a_value"] = to_double(law.a);
  j["k"] = law.k;
  j["variable"] = variable_name(law.variable);
  if (law.C) j["C"] = *law.C;
  return j;
}

Json to_json(const FitReport& fit) {
  Json j;
  j["law"] = to_json(fit.law);
  j["drift"] = fit.drift;
  j["threshold"] = fit.threshold;
  j["passed"] = fit.passed;
  j["final_decade"] = Json::array({fit.samples_used.first, fit.samples_used.second});
  return j;
}

Json to_json(const PoleProbeReport& probe) {
  Json j;
  j["location"] = to_string(probe.location);
  j["order"] = probe.order;
  Json g = Json::array();
  for (const auto& s : probe.g) g.push_back(Json::array({s.abscissa, s.value}));
  j["g"] = g;
  j["spread"] = probe.spread;
  j["c_Z_estimate"] = probe.c_Z_estimate;
  j["passed"] = probe.passed;
  return j;
}

Json to_json(const SandwichReport& s) {
  Json j;
  j["M"] = s.M;
  j["R_used"] = s.R_used;
  j["face_preserved"] = s.face_preserved;
  j["pointwise_ok"] = s.pointwise_ok;
  j["ordering_ok"] = s.ordering_ok;
  j["min_margin"] = s.min_margin;
  j["lower_fit"] = to_json(s.lower_fit);
  j["upper_fit"] = to_json(s.upper_fit);
  j["passed"] = s.passed;
  return j;
}

Json fixtures_json() {
  Json arr = Json::array();
  for (const auto& fx : corpus()) {
    Json j;
    j["name"] = fx.name;
    j["model"] = fx.model;
    j["d"] = to_string(fx.d);
    j["m"] = fx.m;
    j["compact"] = fx.principal_compact;
    j["convenient"] = fx.convenient;
    j["rho"] = rho_json(fx.rho);
    if (fx.law_a) {
      j["law"] = Json{{"a", to_string(*fx.law_a)}, {"k", *fx.law_k}};
    } else {
      j["law"] = "inapplicable";
    }
    arr.push_back(j);
  }
  Json out;
  out["schema"] = kSchemaVersion;
  out["fixtures"] = arr;
  return out;
}

}  // namespace bergman
