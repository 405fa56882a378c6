#include "actembed/types.hpp"

#include <map>

#include "actembed/errors.hpp"

namespace actembed {

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<int>& rows) {
    FeatureMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), m.dim());
    out.meta.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= m.rows()) throw DimMismatch("row index out of range");
        out.values.row(static_cast<Index>(i)) = m.values.row(r);
        out.meta.push_back(m.meta[static_cast<std::size_t>(r)]);
    }
    return out;
}

std::vector<int> session_keys(const FeatureMatrix& m) {
    std::vector<int> keys(m.meta.size());
    std::map<std::pair<std::string, std::string>, int> seen;
    for (std::size_t i = 0; i < m.meta.size(); ++i) {
        const auto id = std::make_pair(m.meta[i].subject_id, m.meta[i].session_id);
        auto [it, inserted] = seen.emplace(id, static_cast<int>(seen.size()));
        keys[i] = it->second;
    }
    return keys;
}

}  // namespace actembed
