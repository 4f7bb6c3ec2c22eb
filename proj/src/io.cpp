#include "andova/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "andova/error.hpp"

namespace andova {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

double parse_value(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw InputError(where + ": invalid value '" + text + "'");
    return v;
}

// Accumulates (group, replicate, value) triples in first-appearance order.
class DatasetBuilder {
public:
    void add(const std::string& group, const std::string& replicate, double value) {
        auto [git, gnew] = group_index_.try_emplace(group, data_.groups.size());
        if (gnew) {
            data_.groups.push_back({group, {}});
            replicate_index_.emplace_back();
        }
        auto& g = data_.groups[git->second];
        auto& index = replicate_index_[git->second];
        auto [rit, rnew] = index.try_emplace(replicate, g.replicates.size());
        if (rnew) g.replicates.push_back({replicate, {}});
        g.replicates[rit->second].values.push_back(value);
    }
    Dataset take() { return std::move(data_); }

private:
    Dataset data_;
    std::map<std::string, std::size_t> group_index_;
    std::vector<std::map<std::string, std::size_t>> replicate_index_;
};

}  // namespace

Dataset parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty CSV input");
    {
        std::vector<std::string> header;
        std::stringstream ss(line);
        for (std::string field; std::getline(ss, field, ',');) header.push_back(trim(field));
        if (header != std::vector<std::string>{"group", "replicate", "value"})
            throw InputError("CSV header must be 'group,replicate,value'");
    }
    DatasetBuilder builder;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string field; std::getline(ss, field, ',');) fields.push_back(trim(field));
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() != 3) throw InputError(where + ": expected 3 fields");
        if (fields[0].empty() || fields[1].empty()) throw InputError(where + ": empty label");
        builder.add(fields[0], fields[1], parse_value(fields[2], where));
    }
    return builder.take();
}

Dataset parse_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw InputError("JSON dataset must be an array of records");
    DatasetBuilder builder;
    std::size_t i = 0;
    for (const auto& rec : doc) {
        const std::string where = "record " + std::to_string(i++);
        if (!rec.is_object() || !rec.contains("group") || !rec.contains("replicate") || !rec.contains("value"))
            throw InputError(where + ": needs group, replicate and value");
        auto label = [&](const nlohmann::json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            throw InputError(where + ": labels must be strings or integers");
        };
        const auto& v = rec["value"];
        if (!v.is_number() || !std::isfinite(v.get<double>())) throw InputError(where + ": value must be a finite number");
        builder.add(label(rec["group"]), label(rec["replicate"]), v.get<double>());
    }
    return builder.take();
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input '" + path.string() + "'");
    if (path.extension() == ".json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json(ss.str());
    }
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "group,replicate,value\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& g : data.groups)
        for (const auto& r : g.replicates)
            for (double v : r.values) out << g.label << ',' << r.label << ',' << v << '\n';
}

std::string to_json_text(const Dataset& data) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& g : data.groups)
        for (const auto& r : g.replicates)
            for (double v : r.values) doc.push_back({{"group", g.label}, {"replicate", r.label}, {"value", v}});
    return doc.dump();
}

}  // namespace andova
