#include "ctrltab/core/types.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/hash.hpp"

#include <algorithm>
#include <unordered_set>

namespace ctrltab {

const Cell* Table::find(CellRef ref) const {
    for (const auto& c : cells) {
        if (c.row == ref.row && c.col == ref.col) return &c;
    }
    return nullptr;
}

std::vector<const Cell*> Table::row_major() const {
    std::vector<const Cell*> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(&c);
    std::stable_sort(out.begin(), out.end(), [](const Cell* a, const Cell* b) {
        return a->ref() < b->ref();
    });
    return out;
}

void Table::validate() const {
    if (n_rows <= 0 || n_cols <= 0) {
        if (!cells.empty() || n_rows < 0 || n_cols < 0)
            throw ValidationError("table '" + id + "': non-positive dimensions");
    }
    if (cells.size() > static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw ValidationError("table '" + id + "': more cells than n_rows*n_cols");
    std::set<CellRef> seen;
    for (const auto& c : cells) {
        if (c.row < 0 || c.col < 0 || c.row >= n_rows || c.col >= n_cols) {
            throw ValidationError("table '" + id + "': cell (" + std::to_string(c.row) + "," +
                                  std::to_string(c.col) + ") out of range");
        }
        if (!seen.insert(c.ref()).second) {
            throw ValidationError("table '" + id + "': duplicate cell (" +
                                  std::to_string(c.row) + "," + std::to_string(c.col) + ")");
        }
        if (c.attribute.empty() && c.value.empty()) {
            throw ValidationError("table '" + id + "': cell (" + std::to_string(c.row) + "," +
                                  std::to_string(c.col) + ") has empty attribute and value");
        }
    }
}

void HighlightSet::validate_against(const Table& table, std::string_view owner) const {
    for (const auto& r : refs) {
        if (!table.find(r)) {
            throw ValidationError("pair '" + std::string(owner) + "': highlight (" +
                                  std::to_string(r.row) + "," + std::to_string(r.col) +
                                  ") does not resolve to a cell");
        }
    }
}

std::string_view to_string(KbStatus s) {
    switch (s) {
    case KbStatus::automatic: return "auto";
    case KbStatus::accepted: return "accepted";
    case KbStatus::rejected: return "rejected";
    }
    return "auto";
}

KbStatus kb_status_from_string(std::string_view s) {
    if (s == "auto") return KbStatus::automatic;
    if (s == "accepted") return KbStatus::accepted;
    if (s == "rejected") return KbStatus::rejected;
    throw ValidationError("unknown knowledge status '" + std::string(s) + "'");
}

void KnowledgeSentence::transition(KbStatus next) {
    if (status != KbStatus::automatic || next == KbStatus::automatic) {
        throw ValidationError("sentence '" + id + "': illegal status transition " +
                              std::string(to_string(status)) + " -> " +
                              std::string(to_string(next)));
    }
    status = next;
}

const KnowledgeSentence* KnowledgeBase::find(std::string_view id) const {
    for (const auto& s : sentences) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

void KnowledgeBase::validate(std::string_view owner) const {
    std::unordered_set<std::string> ids;
    for (const auto& s : sentences) {
        if (!ids.insert(s.id).second)
            throw ValidationError("pair '" + std::string(owner) + "': duplicate knowledge id '" +
                                  s.id + "'");
        if (s.text.empty())
            throw ValidationError("pair '" + std::string(owner) + "': knowledge sentence '" +
                                  s.id + "' is empty");
    }
}

std::string_view to_string(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    }
    return "train";
}

Split split_from_string(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "dev") return Split::dev;
    if (s == "test") return Split::test;
    throw ValidationError("unknown split '" + std::string(s) + "'");
}

Split split_for_id(std::string_view pair_id) {
    const auto bucket = util::fnv1a64(pair_id) % 10;
    if (bucket < 8) return Split::train;
    return bucket == 8 ? Split::dev : Split::test;
}

void PairRecord::validate() const {
    table.validate();
    highlights.validate_against(table, id);
    kb.validate(id);
    if (description.empty() && split != Split::test)
        throw ValidationError("pair '" + id + "': empty description in " +
                              std::string(to_string(split)) + " split");
}

} // namespace ctrltab
