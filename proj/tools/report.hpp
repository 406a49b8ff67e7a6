#pragma once

#include <string>

#include "blq/pipeline.hpp"

namespace blq {

// Writes the requested artifacts (<name>.csv / <name>.json) into cfg.out_dir.
void write_artifacts(const RunConfig& cfg, const PipelineResult& r);

// One-line JSON error record for stderr.
std::string error_record(const std::string& error_class, const std::string& module, const std::string& detail);

}  // namespace blq
