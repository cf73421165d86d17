#pragma once

#include <string>

#include "cma/toolkit/config.hpp"

namespace cma {

// Command entry points shared by the CLI and tests. Each throws the module
// error types; the CLI maps them to exit codes.
void cmd_generate(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg, const std::string& resume_checkpoint = "");
void cmd_infer(const RunConfig& cfg, const std::string& checkpoint_path,
               const std::string& image_path);
void cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path);

}  // namespace cma
