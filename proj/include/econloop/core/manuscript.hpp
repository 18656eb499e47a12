#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace econloop {

struct Section {
    std::string heading;
    bool present = false;

    bool operator==(const Section&) const = default;
};

struct Draft {
    int version = 1;
    std::string body;
    std::size_t word_count = 0;
    std::vector<Section> sections;
    std::vector<std::string> based_on;  // AnalysisResult ids
    std::vector<std::string> warnings;
    bool redrafted_after_critique = false;

    bool operator==(const Draft&) const = default;
};

}  // namespace econloop
