#pragma once

#include <json.hpp>

#include "bergman/asymfit.hpp"
#include "bergman/fixtures.hpp"
#include "bergman/newton.hpp"

namespace bergman {

// All emitted JSON uses insertion order so reports are byte-stable.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "bergman-report/1";

Json to_json(const NewtonPolyhedron& P);
Json to_json(const NewtonData& nd, const ModelFunction& f);
Json to_json(const AsymptoticLaw& law);
Json to_json(const FitReport& fit);
Json to_json(const PoleProbeReport& probe);
Json to_json(const SandwichReport& s);
Json fixtures_json();

}  // namespace bergman
