#pragma once

#include <iosfwd>
#include <string>

#include "tropnnc/network.hpp"

namespace tropnnc {

// TNNC v1 container: UTF-8 text header terminated by "end_header", followed
// by one little-endian binary blob of named tensors. See docs/model_format.md.
void save_model(const Network& net, const std::string& path);
Network load_model(const std::string& path);

void save_model(const Network& net, std::ostream& os);
Network load_model(std::istream& is);

} // namespace tropnnc
