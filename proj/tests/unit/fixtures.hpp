#pragma once

#include "ctrltab/core/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ctrltab::fixture {

/// Table with one header row (the attributes) and the given data rows.
inline Table make_table(const std::string& id, const std::vector<std::string>& attrs,
                        const std::vector<std::vector<std::string>>& rows) {
    Table t;
    t.id = id;
    t.caption = "results for " + id;
    t.n_rows = static_cast<int>(rows.size()) + 1;
    t.n_cols = static_cast<int>(attrs.size());
    for (int c = 0; c < t.n_cols; ++c) t.cells.push_back({0, c, attrs[c], attrs[c], true});
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        for (int c = 0; c < t.n_cols; ++c)
            t.cells.push_back({r + 1, c, attrs[c], rows[r][c], false});
    return t;
}

inline PairRecord make_pair(const std::string& id, Table table, std::vector<CellRef> highlights,
                            const std::vector<std::string>& kb, std::string description) {
    PairRecord p;
    p.id = id;
    table.id = id;
    p.table = std::move(table);
    for (auto r : highlights) p.highlights.refs.insert(r);
    for (std::size_t i = 0; i < kb.size(); ++i)
        p.kb.sentences.push_back({id + ":s" + std::to_string(i), kb[i], KbStatus::automatic, std::nullopt});
    p.description = std::move(description);
    return p;
}

} // namespace ctrltab::fixture
