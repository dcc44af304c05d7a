#pragma once

#include "uclt/lab/checks.hpp"
#include "uclt/serialization.hpp"

namespace uclt::lab {

Json to_json(const ModelSpec& spec);
Json to_json(const Estimate& e);
Json to_json(const OsekowskiReport& r);
Json to_json(const TailDominationReport& r);
Json to_json(const MartingalePropertyReport& r);
Json to_json(const CovarianceReport& r);
Json to_json(const CltReport& r);
Json to_json(const EquicontinuityReport& r);

}  // namespace uclt::lab
