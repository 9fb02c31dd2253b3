#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace aloof {

/// Ordered key/value pairs written as `# key=value` lines ahead of CSV data.
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

void write_provenance(std::ostream& out, const Provenance& provenance);

/// Version tag, physical constants and build identity.
Provenance base_provenance();

} // namespace aloof
