#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "andova/partition.hpp"

namespace testing_support {

// Groups of replicates given as value lists; labels g1.., r1...
inline andova::Dataset make_dataset(std::initializer_list<std::initializer_list<std::vector<double>>> groups) {
    andova::Dataset d;
    int gi = 0;
    for (const auto& g : groups) {
        andova::Group group{"g" + std::to_string(++gi), {}};
        int ri = 0;
        for (const auto& r : g) group.replicates.push_back({"r" + std::to_string(++ri), r});
        d.groups.push_back(std::move(group));
    }
    return d;
}

}  // namespace testing_support
