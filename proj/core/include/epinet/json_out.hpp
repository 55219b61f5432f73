#pragma once

#include <string>

#include "epinet/certificate.hpp"
#include "epinet/propcheck.hpp"
#include "epinet/threshold.hpp"

namespace epinet {

// JSON serialization of the report types. Node indices are emitted 1-based to
// match the ring-numbering convention used everywhere in the documentation.
// The documents validate against the schema files shipped under schemas/.

std::string to_json(const StabilityCertificate& cert, int indent = 2);
std::string to_json(const ThresholdReport& report, int indent = 2);
std::string to_json(const VerdictReport& report, int indent = 2);

}  // namespace epinet
