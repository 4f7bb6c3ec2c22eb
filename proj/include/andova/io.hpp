#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "andova/partition.hpp"

namespace andova {

// CSV with header `group,replicate,value`; labels map to indices in order of
// first appearance.
Dataset parse_csv(std::istream& in);
// JSON array of {"group": ..., "replicate": ..., "value": ...}.
Dataset parse_json(const std::string& text);
// Dispatches on the extension: `.json` is JSON, anything else CSV.
Dataset read_dataset(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& data);
std::string to_json_text(const Dataset& data);

}  // namespace andova
