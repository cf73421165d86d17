#pragma once

#include <string>

#include "cma/model/model.hpp"

namespace cma {

// Binary checkpoint: JSON header (arch + stage + format version) followed by
// raw little-endian doubles per named parameter block. Round-trips bit-exactly.
void save_checkpoint(CmaModel& model, const std::string& path);
CmaModel load_checkpoint(const std::string& path);

}  // namespace cma
