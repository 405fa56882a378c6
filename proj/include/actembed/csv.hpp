#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "actembed/errors.hpp"

namespace actembed::csv {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

std::vector<std::string> split(const std::string& line, char sep = ',');

std::string trim(const std::string& s);

// Parses a double; `what` names the value in the error message.
double parse_double(const std::string& token, const std::string& what);

// Minimal comma-separated writer. Fields must not contain commas or
// newlines; ids emitted by this project never do.
class Writer {
public:
    explicit Writer(const std::string& path);

    void cell(const std::string& v);
    void cell(double v);
    void cell(long long v);
    void cell(int v) { cell(static_cast<long long>(v)); }
    void end_row();

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    bool at_row_start_ = true;
};

}  // namespace actembed::csv
