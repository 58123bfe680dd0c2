#include "text_util.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "backflow/errors.hpp"

namespace backflow::detail {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

double parse_double(std::string_view text) {
    const std::string t = trim(text);
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw InvalidArgument("not a number: '" + t + "'");
    }
    return value;
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_double(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::vector<double>> parse_csv(std::string_view csv,
                                           const std::vector<std::string>& header) {
    std::vector<std::vector<double>> rows;
    bool seen_header = false;
    std::size_t start = 0;
    while (start < csv.size()) {
        std::size_t end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        const std::string line = trim(csv.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        if (!seen_header) {
            std::string expected;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (i) expected += ',';
                expected += header[i];
            }
            if (line != expected) {
                throw InvalidArgument("CSV header mismatch: expected '" + expected + "', got '" +
                                      line + "'");
            }
            seen_header = true;
            continue;
        }
        auto values = parse_number_list(line);
        if (values.size() != header.size()) {
            throw InvalidArgument("CSV row has " + std::to_string(values.size()) +
                                  " fields, expected " + std::to_string(header.size()));
        }
        rows.push_back(std::move(values));
    }
    if (!seen_header) throw InvalidArgument("CSV is empty");
    return rows;
}

}  // namespace backflow::detail
