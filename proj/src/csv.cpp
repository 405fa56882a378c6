#include "actembed/csv.hpp"

#include <cstdio>
#include <cstdlib>

namespace actembed::csv {

std::string format_double(double v) {
    char buf[40];
    // %.17g always round-trips; prefer the shortest form that does
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& token, const std::string& what) {
    const std::string t = trim(token);
    if (t.empty()) throw MalformedRow("empty value for " + what);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw MalformedRow("non-numeric value \"" + t + "\" for " + what);
    }
    return v;
}

Writer::Writer(const std::string& path) : out_(path) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
}

void Writer::cell(const std::string& v) {
    if (!at_row_start_) out_ << ',';
    out_ << v;
    at_row_start_ = false;
}

void Writer::cell(double v) { cell(format_double(v)); }

void Writer::cell(long long v) { cell(std::to_string(v)); }

void Writer::end_row() {
    out_ << '\n';
    at_row_start_ = true;
    if (!out_) throw IoError("write failed");
}

void Writer::row(const std::vector<std::string>& cells) {
    for (const auto& c : cells) cell(c);
    end_row();
}

}  // namespace actembed::csv
