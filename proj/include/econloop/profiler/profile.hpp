#pragma once

#include <cstddef>
#include <string>

#include "econloop/core/error.hpp"
#include "econloop/core/profile.hpp"
#include "econloop/data/table.hpp"

namespace econloop::profiler {

class ProfilingError : public Error {
public:
    explicit ProfilingError(const std::string& message) : Error("ProfilingError", message) {}
};

/// Thresholds for the diagnostic heuristics. The transform and endogeneity
/// rules are stand-ins; every threshold is tunable.
struct ProfileOptions {
    std::size_t min_pairs = 30;
    double endogeneity_threshold = 0.5;
    double log_skew_threshold = 2.0;
    double high_missing_threshold = 0.2;
    // Standardize is suggested when sd or |mean| exceeds this scale.
    double standardize_scale = 1000.0;
    std::size_t top_categories = 10;
};

DataProfile profile(const data::Table& table, const DatasetAudit& audit, const ProfileOptions& options = {});

/// Fixed-width text rendering for the CLI.
std::string render_profile(const DataProfile& profile);

}  // namespace econloop::profiler
